#include "gist/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gist/errors.hpp"
#include "gist/kernels.hpp"

namespace gist {

namespace {

constexpr double kClamp = 1e-12;

std::vector<const double*> plane_ptrs(const Tensor& t) {
  std::vector<const double*> p(t.channels());
  for (int c = 0; c < t.channels(); ++c) p[c] = t.plane(c).data();
  return p;
}

ChannelStats stats_from(const kernels::Moments& m, int channels) {
  ChannelStats s;
  s.count = m.count;
  s.mean = Eigen::VectorXd::Zero(channels);
  s.cov = Eigen::MatrixXd::Zero(channels, channels);
  const double n = static_cast<double>(m.count);
  for (int i = 0; i < channels; ++i) s.mean[i] = m.sum[i] / n;
  for (int i = 0; i < channels; ++i)
    for (int j = 0; j < channels; ++j)
      s.cov(i, j) = m.sum_sq[static_cast<std::size_t>(i) * channels + j] / n - s.mean[i] * s.mean[j];
  s.cov = 0.5 * (s.cov + s.cov.transpose());
  return s;
}

void check_symmetric(const Eigen::MatrixXd& m, double tol, const char* what) {
  if (m.rows() != m.cols()) throw ArgumentError(std::string(what) + " must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw ArgumentError(std::string(what) + " is not symmetric");
  }
}

void check_psd(const Eigen::MatrixXd& m, const char* what) {
  check_symmetric(m, 1e-8, what);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw ArgumentError(std::string(what) + " is not positive semidefinite");
  }
}

// V f(L) V^T over the clamped spectrum.
template <typename F>
Eigen::MatrixXd spectral(const Eigen::MatrixXd& m, F f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  const double top = std::max(0.0, ev.maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = ev[i] <= kClamp * top ? 0.0 : f(ev[i]);
  Eigen::MatrixXd r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

void check_channels(const Tensor& t, const TransportMap& map) {
  if (t.channels() != map.A.rows()) {
    throw ArgumentError("subband has " + std::to_string(t.channels()) + " channels, map expects " +
                        std::to_string(map.A.rows()));
  }
}

void check_mask(const Tensor& t, const LabelMap& mask) {
  if (mask.width != t.width() || mask.height != t.height()) {
    throw ArgumentError("mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                        ", subband is " + std::to_string(t.width()) + "x" +
                        std::to_string(t.height()));
  }
}

}  // namespace

ChannelStats compute_stats(const Tensor& subband) {
  if (subband.empty()) throw ArgumentError("cannot compute statistics of an empty subband");
  const auto planes = plane_ptrs(subband);
  return stats_from(kernels::omp::moments(planes, subband.plane_size(), {}, 0, false),
                    subband.channels());
}

ChannelStats compute_stats(const Tensor& subband, const MaskSelection& sel) {
  if (sel.mask == nullptr) return compute_stats(subband);
  if (subband.empty()) throw ArgumentError("cannot compute statistics of an empty subband");
  check_mask(subband, *sel.mask);
  const auto planes = plane_ptrs(subband);
  const kernels::Moments m =
      kernels::omp::moments(planes, subband.plane_size(), sel.mask->labels, sel.label, true);
  if (m.count == 0) {
    throw EmptyRegionError("no position carries label " + std::to_string(sel.label));
  }
  return stats_from(m, subband.channels());
}

Eigen::MatrixXd sqrtm_spd(const Eigen::MatrixXd& m) {
  check_symmetric(m, 1e-8, "matrix");
  return spectral(m, [](double v) { return std::sqrt(v); });
}

double bures_distance_sq(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& cov_y) {
  check_psd(cov_x, "covariance");
  check_psd(cov_y, "covariance");
  if (cov_x.rows() != cov_y.rows()) throw ArgumentError("covariance sizes differ");
  const Eigen::MatrixXd ry = sqrtm_spd(cov_y);
  const Eigen::MatrixXd cross = sqrtm_spd(0.5 * (ry * cov_x * ry + (ry * cov_x * ry).transpose()));
  const double b = cov_x.trace() + cov_y.trace() - 2.0 * cross.trace();
  return std::max(0.0, b);
}

double wasserstein2_sq(const ChannelStats& x, const ChannelStats& y) {
  if (x.mean.size() != y.mean.size()) throw ArgumentError("statistics have different channel counts");
  return (x.mean - y.mean).squaredNorm() + bures_distance_sq(x.cov, y.cov);
}

TransportMap optimal_map(const ChannelStats& x, const ChannelStats& y, double eps) {
  if (!(eps >= 0.0)) throw ArgumentError("eps must be >= 0");
  const Eigen::Index c = x.mean.size();
  if (y.mean.size() != c) throw ArgumentError("statistics have different channel counts");
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(c, c);
  const Eigen::MatrixXd sx = x.cov + eps * id;
  const Eigen::MatrixXd sy = y.cov + eps * id;
  check_symmetric(sx, 1e-8, "covariance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sx + sx.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= kClamp * top) {
    throw SingularityError("source covariance is singular; use eps > 0");
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::MatrixXd rx = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
  const Eigen::MatrixXd rx_inv = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();

  TransportMap map;
  map.A = rx_inv * sqrtm_spd(0.5 * (rx * sy * rx + (rx * sy * rx).transpose())) * rx_inv;
  map.A = 0.5 * (map.A + map.A.transpose());
  map.source_mean = x.mean;
  map.target_mean = y.mean;
  return map;
}

void apply_map_inplace(Tensor& subband, const TransportMap& map, const MaskSelection* sel) {
  check_channels(subband, map);
  const int c = subband.channels();
  std::vector<double*> planes(c);
  for (int i = 0; i < c; ++i) planes[i] = subband.plane(i).data();
  std::vector<double> a(static_cast<std::size_t>(c) * c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) a[static_cast<std::size_t>(i) * c + j] = map.A(i, j);
  const std::vector<double> ms(map.source_mean.data(), map.source_mean.data() + c);
  const std::vector<double> mt(map.target_mean.data(), map.target_mean.data() + c);
  if (sel != nullptr && sel->mask != nullptr) {
    check_mask(subband, *sel->mask);
    kernels::omp::affine(planes, subband.plane_size(), a, ms, mt, sel->mask->labels, sel->label, true);
  } else {
    kernels::omp::affine(planes, subband.plane_size(), a, ms, mt, {}, 0, false);
  }
}

Tensor apply_map(const Tensor& subband, const TransportMap& map) {
  Tensor out = subband;
  apply_map_inplace(out, map);
  return out;
}

Tensor apply_map(const Tensor& subband, const TransportMap& map, const MaskSelection& sel) {
  Tensor out = subband;
  apply_map_inplace(out, map, &sel);
  return out;
}

SubbandStack align_stack(const SubbandStack& f_cs, const std::vector<ChannelStats>& style,
                         double eps) {
  if (style.size() != f_cs.subband_count()) {
    throw StructureError("content has " + std::to_string(f_cs.subband_count()) +
                         " subbands, style has " + std::to_string(style.size()));
  }
  if (!f_cs.has_approx()) throw StructureError("stack to align has no approximation");
  SubbandStack out = f_cs;
  for (std::size_t k = 0; k < out.subband_count(); ++k) {
    Tensor& band = out.subband(k);
    apply_map_inplace(band, optimal_map(compute_stats(band), style[k], eps));
  }
  return out;
}

SubbandStack align_stack(const SubbandStack& f_cs, const SubbandStack& f_s, double eps) {
  if (f_cs.subband_count() != f_s.subband_count()) {
    throw StructureError("content has " + std::to_string(f_cs.subband_count()) +
                         " subbands, style has " + std::to_string(f_s.subband_count()));
  }
  if (!f_s.has_approx()) throw StructureError("style stack has no approximation");
  std::vector<ChannelStats> style;
  style.reserve(f_s.subband_count());
  for (std::size_t k = 0; k < f_s.subband_count(); ++k) style.push_back(compute_stats(f_s.subband(k)));
  return align_stack(f_cs, style, eps);
}

}  // namespace gist
