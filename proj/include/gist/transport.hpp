#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gist/image.hpp"
#include "gist/multiscale.hpp"

namespace gist {

// First two moments of a subband, each spatial position being one C-vector.
struct ChannelStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // 1/N normalization
  std::size_t count = 0;

  int channels() const { return static_cast<int>(mean.size()); }
};

// x -> A (x - source_mean) + target_mean
struct TransportMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd source_mean;
  Eigen::VectorXd target_mean;
};

// Restricts an operation to the positions of `mask` carrying `label`.
struct MaskSelection {
  const LabelMap* mask = nullptr;
  std::uint32_t label = 0;
};

inline constexpr double kDefaultEps = 1e-5;

ChannelStats compute_stats(const Tensor& subband);
// Throws EmptyRegionError when no position carries the label.
ChannelStats compute_stats(const Tensor& subband, const MaskSelection& sel);

// Principal square root by eigendecomposition. Eigenvalues below 1e-12 of the
// largest are treated as zero.
Eigen::MatrixXd sqrtm_spd(const Eigen::MatrixXd& m);

double bures_distance_sq(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& cov_y);
double wasserstein2_sq(const ChannelStats& x, const ChannelStats& y);

// Closed-form Gaussian map with eps * I added to both covariances.
TransportMap optimal_map(const ChannelStats& x, const ChannelStats& y, double eps = kDefaultEps);

Tensor apply_map(const Tensor& subband, const TransportMap& map);
Tensor apply_map(const Tensor& subband, const TransportMap& map, const MaskSelection& sel);
void apply_map_inplace(Tensor& subband, const TransportMap& map, const MaskSelection* sel = nullptr);

// Aligns every subband of f_cs to the matching subband of f_s independently.
SubbandStack align_stack(const SubbandStack& f_cs, const SubbandStack& f_s, double eps = kDefaultEps);
// Same, against precomputed per-subband style statistics (approximation first).
SubbandStack align_stack(const SubbandStack& f_cs, const std::vector<ChannelStats>& style,
                         double eps = kDefaultEps);

}  // namespace gist
