#include <doctest.h>

#include <cmath>
#include <vector>

#include "gist/errors.hpp"
#include "gist/wavelet.hpp"
#include "support.hpp"

using gist::Tensor;
using gist::TransformKind;
using gist::TransformSpec;

namespace {

TransformSpec wavelet_spec(TransformKind kind, const char* family, int levels) {
  TransformSpec s;
  s.kind = kind;
  s.wavelet = family;
  s.levels = levels;
  return s;
}

Tensor circshift(const Tensor& t, int dy, int dx) {
  Tensor out(t.channels(), t.height(), t.width());
  for (int c = 0; c < t.channels(); ++c)
    for (int y = 0; y < t.height(); ++y)
      for (int x = 0; x < t.width(); ++x)
        out.at(c, (y + dy) % t.height(), (x + dx) % t.width()) = t.at(c, y, x);
  return out;
}

// Dense periodic undecimated analysis matrix: (H x)[i] = sum_k h[k] x[(i + k) mod n].
std::vector<std::vector<double>> analysis_matrix(const std::vector<double>& h, int n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < h.size(); ++k) m[i][(i + k) % n] += h[k];
  return m;
}

}  // namespace

TEST_CASE("haar filters") {
  const auto f = gist::make_filters("haar");
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(f.h0 == std::vector<double>{r, r});
  CHECK(f.h1[0] == doctest::Approx(r));
  CHECK(f.h1[1] == doctest::Approx(-r));
  CHECK_THROWS_AS(gist::make_filters("sym8"), gist::ArgumentError);
}

TEST_CASE("db2 filters satisfy the Daubechies constraints") {
  const auto f = gist::make_filters("db2");
  REQUIRE(f.h0.size() == 4);
  CHECK(f.h0[0] == doctest::Approx(0.48296).epsilon(1e-4));
  CHECK(f.h0[1] == doctest::Approx(0.83652).epsilon(1e-4));
  CHECK(f.h0[2] == doctest::Approx(0.22414).epsilon(1e-4));
  CHECK(f.h0[3] == doctest::Approx(-0.12941).epsilon(1e-4));
  double sum = 0.0, norm = 0.0, shift2 = 0.0, m0 = 0.0, m1 = 0.0;
  for (int k = 0; k < 4; ++k) {
    sum += f.h0[k];
    norm += f.h0[k] * f.h0[k];
    if (k + 2 < 4) shift2 += f.h0[k] * f.h0[k + 2];
    m0 += f.h1[k];
    m1 += k * f.h1[k];
  }
  CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(norm - 1.0) < 1e-12);
  CHECK(std::abs(shift2) < 1e-12);
  CHECK(std::abs(m0) < 1e-12);  // vanishing moments of the high-pass
  CHECK(std::abs(m1) < 1e-12);
  for (const char* fam : {"haar", "db2"}) {
    const auto g = gist::make_filters(fam);
    std::vector<double> r0(g.h0.rbegin(), g.h0.rend());
    std::vector<double> r1(g.h1.rbegin(), g.h1.rend());
    CHECK(g.g0 == r0);
    CHECK(g.g1 == r1);
  }
}

TEST_CASE("haar DWT of a 2x2 block") {
  Tensor x(1, 2, 2);
  x.at(0, 0, 0) = 1.0;
  x.at(0, 0, 1) = 2.0;
  x.at(0, 1, 0) = 3.0;
  x.at(0, 1, 1) = 5.0;
  const auto s = gist::dwt_analyze_level(x, gist::make_filters("haar"));
  CHECK(s.approx.at(0, 0, 0) == doctest::Approx(11.0 / 2.0));
  // v: low along y, high along x.
  CHECK(s.details[0].at(0, 0, 0) == doctest::Approx((1.0 - 2.0 + 3.0 - 5.0) / 2.0));
  CHECK(s.details[1].at(0, 0, 0) == doctest::Approx((1.0 + 2.0 - 3.0 - 5.0) / 2.0));
  CHECK(s.details[2].at(0, 0, 0) == doctest::Approx((1.0 - 2.0 - 3.0 + 5.0) / 2.0));
}

TEST_CASE("DWT level on constant and zero images") {
  const auto f = gist::make_filters("db2");
  const auto s = gist::dwt_analyze_level(Tensor(3, 8, 12, 0.3), f);
  CHECK(s.approx.height() == 4);
  CHECK(s.approx.width() == 6);
  for (double v : s.approx.values()) CHECK(v == doctest::Approx(0.6).epsilon(1e-13));
  for (const Tensor& d : s.details)
    for (double v : d.values()) CHECK(std::abs(v) < 1e-12);
  const auto z = gist::dwt_analyze_level(Tensor(1, 4, 4), f);
  CHECK(testing::energy(z.approx) == 0.0);

  gist::SubbandStack only;
  only.approx = Tensor(2, 4, 4, 0.8);
  only.details = {Tensor(2, 4, 4), Tensor(2, 4, 4), Tensor(2, 4, 4)};
  const Tensor back = gist::dwt_synthesize_level(only, f);
  for (double v : back.values()) CHECK(v == doctest::Approx(0.4).epsilon(1e-13));
  only.approx = Tensor(2, 4, 4);
  CHECK(testing::energy(gist::dwt_synthesize_level(only, f)) == 0.0);

  CHECK_THROWS_AS(gist::dwt_analyze_level(Tensor(1, 5, 4), f), gist::ArgumentError);
  only.details[1] = Tensor(2, 2, 4);
  CHECK_THROWS_AS(gist::dwt_synthesize_level(only, f), gist::ArgumentError);
}

TEST_CASE("SWT level keeps dimensions and kills constants") {
  const auto f = gist::make_filters("db2");
  for (int level = 1; level <= 3; ++level) {
    const auto s = gist::swt_analyze_level(Tensor(3, 16, 24, 0.7), f, level);
    CHECK(s.approx.height() == 16);
    CHECK(s.approx.width() == 24);
    for (const Tensor& d : s.details) {
      CHECK(d.same_shape(s.approx));
      for (double v : d.values()) CHECK(std::abs(v) < 1e-12);
    }
  }
  CHECK_THROWS_AS(gist::swt_analyze_level(Tensor(1, 12, 16), f, 3), gist::ArgumentError);
  gist::SubbandStack zero;
  zero.approx = Tensor(1, 8, 8);
  zero.details = {Tensor(1, 8, 8), Tensor(1, 8, 8), Tensor(1, 8, 8)};
  CHECK(testing::energy(gist::swt_synthesize_level(zero, f, 2)) == 0.0);
}

TEST_CASE("SWT level-1 approximation at even phase equals the DWT approximation") {
  for (const char* fam : {"haar", "db2"}) {
    const auto f = gist::make_filters(fam);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Tensor x = testing::random_image(2, 16, 16, seed);
      const auto d = gist::dwt_analyze_level(x, f);
      const auto s = gist::swt_analyze_level(x, f, 1);
      for (int c = 0; c < 2; ++c)
        for (int y = 0; y < 8; ++y)
          for (int xx = 0; xx < 8; ++xx) CHECK(s.approx.at(c, 2 * y, 2 * xx) == doctest::Approx(d.approx.at(c, y, xx)));
    }
  }
}

TEST_CASE("SWT with zeroed details equals the dense low-pass reconstruction") {
  const int n = 8;
  for (const char* fam : {"haar", "db2"}) {
    const auto f = gist::make_filters(fam);
    const Tensor x = testing::random_image(1, n, n, 42);
    auto s = gist::swt_analyze_level(x, f, 1);
    for (Tensor& d : s.details) d = Tensor(1, n, n);
    const Tensor got = gist::swt_synthesize_level(s, f, 1);

    // P = 0.5 H^T H per axis; result = P X P^T.
    const auto h = analysis_matrix(f.h0, n);
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) p[i][j] += 0.5 * h[k][i] * h[k][j];
    for (int y = 0; y < n; ++y)
      for (int xx = 0; xx < n; ++xx) {
        double v = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) v += p[y][a] * x.at(0, a, b) * p[xx][b];
        CHECK(got.at(0, y, xx) == doctest::Approx(v).epsilon(1e-12));
      }
  }
}

TEST_CASE("multiscale wavelet round trips") {
  for (TransformKind kind : {TransformKind::dwt, TransformKind::swt}) {
    for (const char* fam : {"haar", "db2"}) {
      for (int levels = 1; levels <= 4; ++levels) {
        CAPTURE(levels);
        const auto t = gist::make_transform(wavelet_spec(kind, fam, levels));
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const Tensor x = testing::random_image(3, 64, 64, seed);
          const auto rep = t->analyze(x);
          REQUIRE(rep.levels() == levels);
          for (int l = 0; l + 1 < levels; ++l) CHECK_FALSE(rep.stacks[l].has_approx());
          CHECK(rep.stacks.back().has_approx());
          CHECK(gist::max_abs_diff(t->synthesize(rep), x) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("DWT subband sizes, critical sampling and energy conservation") {
  const auto t = gist::make_transform(wavelet_spec(TransformKind::dwt, "db2", 3));
  const Tensor big(3, 672, 672, 0.5);
  const auto rep = t->analyze(big);
  CHECK(rep.stacks[2].approx.height() == 84);
  CHECK(rep.stacks[2].details[2].width() == 84);

  const Tensor x = testing::random_image(3, 64, 32, 7);
  const auto r = t->analyze(x);
  CHECK(r.coefficient_count() == x.size());
  double e = 0.0;
  for (const auto& s : r.stacks) {
    if (s.has_approx()) e += testing::energy(s.approx);
    for (const Tensor& d : s.details) e += testing::energy(d);
  }
  CHECK(e == doctest::Approx(testing::energy(x)).epsilon(1e-8));
}

TEST_CASE("single-level analyze equals the level function") {
  const Tensor x = testing::random_image(2, 16, 16, 3);
  const auto f = gist::make_filters("db2");
  const auto rep = gist::analyze(x, wavelet_spec(TransformKind::dwt, "db2", 1));
  const auto lvl = gist::dwt_analyze_level(x, f);
  CHECK(gist::max_abs_diff(rep.stacks[0].approx, lvl.approx) == 0.0);
  CHECK(gist::max_abs_diff(rep.stacks[0].details[2], lvl.details[2]) == 0.0);
}

TEST_CASE("linearity of analysis") {
  const auto t = gist::make_transform(wavelet_spec(TransformKind::swt, "db2", 2));
  const Tensor a = testing::random_image(3, 32, 32, 1);
  const Tensor b = testing::random_image(3, 32, 32, 2);
  const auto ra = t->analyze(a);
  const auto rb = t->analyze(b);
  const auto rab = t->analyze(2.0 * a + (-0.5) * b);
  for (int l = 0; l < 2; ++l)
    for (std::size_t k = 1; k < rab.stacks[l].subband_count(); ++k) {
      const Tensor expect = 2.0 * ra.stacks[l].subband(k) + (-0.5) * rb.stacks[l].subband(k);
      CHECK(gist::max_abs_diff(rab.stacks[l].subband(k), expect) <= 1e-10);
    }
}

TEST_CASE("SWT is shift consistent") {
  const auto t = gist::make_transform(wavelet_spec(TransformKind::swt, "db2", 3));
  const Tensor x = testing::random_image(1, 32, 32, 9);
  const auto r = t->analyze(x);
  const auto rs = t->analyze(circshift(x, 3, 5));
  for (int l = 0; l < 3; ++l)
    for (std::size_t k = 1; k < r.stacks[l].subband_count(); ++k)
      CHECK(gist::max_abs_diff(rs.stacks[l].subband(k), circshift(r.stacks[l].subband(k), 3, 5)) <= 1e-12);
}

TEST_CASE("dimension and structure errors") {
  const auto dwt = gist::make_transform(wavelet_spec(TransformKind::dwt, "haar", 3));
  CHECK_THROWS_AS(dwt->analyze(Tensor(1, 20, 16)), gist::ArgumentError);
  CHECK_NOTHROW(dwt->analyze(Tensor(1, 24, 16)));
  auto rep = dwt->analyze(Tensor(1, 16, 16));
  rep.stacks.back().approx = Tensor();
  CHECK_THROWS_AS(dwt->synthesize(rep), gist::StructureError);
  TransformSpec bad = wavelet_spec(TransformKind::swt, "coif", 1);
  CHECK_THROWS_AS(gist::make_transform(bad), gist::ArgumentError);
}

TEST_CASE("masks follow the decomposition") {
  gist::LabelMap m(8, 8, 1);
  m.at(2, 2) = 2;
  m.at(3, 3) = 5;
  const auto dwt = gist::make_transform(wavelet_spec(TransformKind::dwt, "haar", 2));
  const auto lm = dwt->level_masks(m, 1);
  REQUIRE(lm.size() == 4);
  CHECK(lm[0].width == 4);
  CHECK(lm[0].at(1, 1) == 2);
  CHECK(lm[3].at(1, 1) == 2);
  const auto swt = gist::make_transform(wavelet_spec(TransformKind::swt, "haar", 2));
  const auto ls = swt->level_masks(m, 2);
  REQUIRE(ls.size() == 4);
  for (const auto& x : ls) CHECK(x.labels == m.labels);
}

TEST_CASE("subband dump writes one image per subband") {
  const auto dir = testing::temp_dir("dump");
  const auto rep = gist::analyze(testing::random_image(3, 16, 16, 4), wavelet_spec(TransformKind::dwt, "haar", 2));
  gist::dump_subbands(rep, dir.string(), "x");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 7);
}
