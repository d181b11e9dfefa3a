#include <doctest.h>

#include <cmath>
#include <vector>

#include "gist/errors.hpp"
#include "gist/harness.hpp"
#include "gist/metrics.hpp"
#include "gist/pipeline.hpp"
#include "support.hpp"

using gist::Tensor;

namespace {

gist::StyleJobConfig config(gist::TransformKind kind, int levels, double eps) {
  gist::StyleJobConfig cfg;
  cfg.transform.kind = kind;
  cfg.transform.levels = levels;
  cfg.transform.directions.assign(levels, 4);
  cfg.transform.directions.front() = 1;
  cfg.eps = eps;
  return cfg;
}

double psnr(const Tensor& a, const Tensor& b) {
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mse += std::pow(a.values()[i] - b.values()[i], 2);
  mse /= static_cast<double>(a.size());
  return mse == 0.0 ? 1e9 : 10.0 * std::log10(1.0 / mse);
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

void check_stats_match(const gist::ChannelStats& got, const gist::ChannelStats& want, double tol) {
  CHECK((got.mean - want.mean).norm() <= tol * std::max(1e-3, want.mean.norm()));
  CHECK(rel(got.cov, want.cov) <= tol);
}

// Two labels split at column `split`.
gist::LabelMap halves(int w, int h, int split, std::uint32_t left, std::uint32_t right) {
  gist::LabelMap m(w, h, left);
  for (int y = 0; y < h; ++y)
    for (int x = split; x < w; ++x) m.at(y, x) = right;
  return m;
}

const Tensor& content64() {
  static const Tensor t = testing::pattern_image(3, 64, 64, 0.3);
  return t;
}

const Tensor& style64() {
  static const Tensor t = [] {
    Tensor s = testing::random_image(3, 64, 64, 77);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) s.at(c, y, x) = 0.3 * s.at(c, y, x) + 0.5 * std::sin(0.2 * x + c) * std::sin(0.1 * y);
    return s;
  }();
  return t;
}

}  // namespace

TEST_CASE("self transport is the identity") {
  for (auto kind : {gist::TransformKind::swt, gist::TransformKind::dwt, gist::TransformKind::contourlet}) {
    CAPTURE(gist::to_string(kind));
    const Tensor out = gist::stylize(content64(), content64(), config(kind, 3, 0.0));
    CHECK(out.same_shape(content64()));
    CHECK(gist::max_abs_diff(out, content64()) <= 1e-8);
    const Tensor reg = gist::stylize(content64(), content64(), config(kind, 3, gist::kDefaultEps));
    CHECK(psnr(reg, content64()) >= 60.0);
  }
}

TEST_CASE("aligned subbands carry the style statistics") {
  for (auto kind : {gist::TransformKind::swt, gist::TransformKind::dwt, gist::TransformKind::contourlet}) {
    CAPTURE(gist::to_string(kind));
    auto cfg = config(kind, 2, 0.0);
    const auto style_rep = gist::make_transform(cfg.transform)->analyze(style64(), true);
    int seen = 0;
    cfg.observer = [&](const gist::LevelTrace& t) {
      ++seen;
      for (std::size_t k = 0; k < t.after->subband_count(); ++k) {
        CAPTURE(k);
        check_stats_match(gist::compute_stats(t.after->subband(k)),
                          gist::compute_stats(style_rep.stacks[t.level - 1].subband(k)), 1e-6);
      }
    };
    const Tensor out = gist::stylize(content64(), style64(), cfg);
    CHECK(seen == 2);
    CHECK(out.all_finite());
  }
}

TEST_CASE("details can be left unaligned") {
  auto cfg = config(gist::TransformKind::swt, 2, 1e-5);
  cfg.align_details = false;
  cfg.observer = [](const gist::LevelTrace& t) {
    for (std::size_t k = 1; k < t.after->subband_count(); ++k)
      CHECK(gist::max_abs_diff(t.after->subband(k), t.before->subband(k)) == 0.0);
  };
  gist::stylize(content64(), style64(), cfg);
}

TEST_CASE("style may differ in size from the content") {
  const Tensor style = testing::random_image(3, 48, 80, 5);
  const Tensor out = gist::stylize(content64(), style, config(gist::TransformKind::swt, 2, 1e-5));
  CHECK(out.same_shape(content64()));
  CHECK(out.all_finite());
  CHECK_THROWS_AS(gist::stylize(content64(), testing::random_image(3, 6, 6, 1), config(gist::TransformKind::dwt, 3, 1e-5)),
                  gist::ArgumentError);
}

TEST_CASE("style interpolation") {
  auto cfg = config(gist::TransformKind::swt, 2, 0.0);
  cfg.blend = gist::BlendWeights{1.0, {0.0}};
  CHECK(gist::max_abs_diff(gist::stylize_interpolated(content64(), {style64()}, cfg), content64()) <= 1e-8);

  cfg.eps = 1e-5;
  const Tensor single = gist::stylize(content64(), style64(), config(gist::TransformKind::swt, 2, 1e-5));
  cfg.blend = gist::BlendWeights{0.0, {1.0}};
  CHECK(gist::max_abs_diff(gist::stylize_interpolated(content64(), {style64()}, cfg), single) <= 1e-8);
  cfg.blend = gist::BlendWeights{0.0, {0.5, 0.5}};
  CHECK(gist::max_abs_diff(gist::stylize_interpolated(content64(), {style64(), style64()}, cfg), single) <= 1e-8);

  // Styles of another size are resized to the content first.
  cfg.blend = gist::BlendWeights{0.3, {0.3, 0.4}};
  const Tensor mixed = gist::stylize_interpolated(content64(), {style64(), testing::random_image(3, 40, 50, 3)}, cfg);
  CHECK(mixed.same_shape(content64()));
  CHECK(mixed.all_finite());

  cfg.blend = gist::BlendWeights{0.5, {0.6}};
  CHECK_THROWS_AS(gist::stylize_interpolated(content64(), {style64()}, cfg), gist::ArgumentError);
  cfg.blend = gist::BlendWeights{0.5, {0.5}};
  CHECK_THROWS_AS(gist::stylize_interpolated(content64(), {style64(), style64()}, cfg), gist::ArgumentError);
  cfg.blend = gist::BlendWeights{1.2, {-0.2}};
  CHECK_THROWS_AS(gist::stylize_interpolated(content64(), {style64()}, cfg), gist::ArgumentError);
  CHECK_THROWS_AS(gist::stylize_interpolated(content64(), {style64()}, config(gist::TransformKind::swt, 2, 0.0)),
                  gist::ArgumentError);
}

TEST_CASE("blend weight validation") {
  CHECK_NOTHROW((gist::BlendWeights{0.2, {0.3, 0.5}}.validate(2)));
  CHECK_NOTHROW((gist::BlendWeights{0.1, {0.2, 0.3, 0.4 + 5e-10}}.validate(3)));
  CHECK_THROWS_AS((gist::BlendWeights{0.1, {0.2, 0.3, 0.4 + 1e-6}}.validate(3)), gist::ArgumentError);
  CHECK_THROWS_AS((gist::BlendWeights{0.2, {0.8}}.validate(2)), gist::ArgumentError);
}

TEST_CASE("masked stylization") {
  for (auto kind : {gist::TransformKind::swt, gist::TransformKind::dwt, gist::TransformKind::contourlet}) {
    CAPTURE(gist::to_string(kind));
    const auto cfg = config(kind, 2, 1e-5);
    const Tensor global = gist::stylize(content64(), style64(), cfg);
    const gist::LabelMap all_c(64, 64, 3), all_s(64, 64, 3);
    CHECK(gist::max_abs_diff(gist::stylize_masked(content64(), style64(), all_c, all_s, cfg), global) <= 1e-8);
    const gist::LabelMap other(64, 64, 9);
    CHECK(gist::max_abs_diff(gist::stylize_masked(content64(), style64(), all_c, other, cfg), global) <= 1e-8);
  }
}

TEST_CASE("masked regions take their own statistics") {
  auto cfg = config(gist::TransformKind::swt, 1, 0.0);
  const gist::LabelMap cmask = halves(64, 64, 24, 1, 2);
  const gist::LabelMap smask = halves(64, 64, 40, 1, 5);
  const auto style_rep = gist::make_transform(cfg.transform)->analyze(style64(), true);
  bool called = false;
  cfg.observer = [&](const gist::LevelTrace& t) {
    called = true;
    for (std::size_t k = 0; k < t.after->subband_count(); ++k) {
      CAPTURE(k);
      const Tensor& s = style_rep.stacks[0].subband(k);
      check_stats_match(gist::compute_stats(t.after->subband(k), {&cmask, 1}),
                        gist::compute_stats(s, {&smask, 1}), 1e-6);
      check_stats_match(gist::compute_stats(t.after->subband(k), {&cmask, 2}), gist::compute_stats(s), 1e-6);
    }
  };
  const Tensor out = gist::stylize_masked(content64(), style64(), cmask, smask, cfg);
  CHECK(called);
  CHECK(out.all_finite());
}

TEST_CASE("configuration errors") {
  auto cfg = config(gist::TransformKind::swt, 2, 1e-5);
  cfg.blend = gist::BlendWeights{0.0, {1.0}};
  cfg.content_mask = gist::LabelMap(64, 64, 1);
  cfg.style_mask = gist::LabelMap(64, 64, 1);
  CHECK_THROWS_AS(gist::stylize(content64(), style64(), cfg), gist::ArgumentError);

  cfg = config(gist::TransformKind::swt, 2, 1e-5);
  cfg.content_mask = gist::LabelMap(64, 64, 1);
  CHECK_THROWS_AS(gist::stylize(content64(), style64(), cfg), gist::ArgumentError);
  cfg.style_mask = gist::LabelMap(32, 64, 1);
  CHECK_THROWS_AS(gist::stylize(content64(), style64(), cfg), gist::ArgumentError);

  cfg = config(gist::TransformKind::swt, 2, -1.0);
  CHECK_THROWS_AS(gist::stylize(content64(), style64(), cfg), gist::ArgumentError);
  cfg = config(gist::TransformKind::swt, 0, 1e-5);
  CHECK_THROWS_AS(gist::stylize(content64(), style64(), cfg), gist::ArgumentError);
  cfg = config(gist::TransformKind::dwt, 3, 1e-5);
  CHECK_THROWS_AS(gist::stylize(testing::random_image(3, 60, 64, 1), style64(), cfg), gist::ArgumentError);
  CHECK_THROWS_AS(gist::stylize(content64(), testing::random_image(1, 64, 64, 1), cfg), gist::ArgumentError);
  CHECK_THROWS_AS(gist::run_style_job(content64(), {}, cfg), gist::ArgumentError);
  CHECK_THROWS_AS(gist::run_style_job(content64(), {style64(), style64()}, cfg), gist::ArgumentError);
  CHECK(gist::parse_style_mode("artistic") == gist::StyleMode::artistic);
  CHECK_THROWS_AS(gist::parse_style_mode("cubist"), gist::ArgumentError);
}

TEST_CASE("determinism and finiteness") {
  for (auto mode : {gist::StyleMode::photo, gist::StyleMode::artistic}) {
    auto cfg = config(gist::TransformKind::swt, 3, 1e-5);
    cfg.mode = mode;
    cfg.seed = 11;
    const Tensor a = gist::stylize(content64(), style64(), cfg);
    const Tensor b = gist::stylize(content64(), style64(), cfg);
    CHECK(gist::max_abs_diff(a, b) == 0.0);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Tensor c = testing::random_image(3, 32, 32, seed);
    const Tensor s = testing::random_image(3, 32, 32, seed + 50);
    for (auto kind : {gist::TransformKind::swt, gist::TransformKind::dwt, gist::TransformKind::contourlet})
      CHECK(gist::stylize(c, s, config(kind, 2, 1e-5)).all_finite());
    // A flat style is rank deficient everywhere; the regularizer keeps it finite.
    CHECK(gist::stylize(c, Tensor(3, 32, 32, 0.5), config(gist::TransformKind::swt, 2, 1e-5)).all_finite());
  }
}

TEST_CASE("artistic mode with a flat style keeps the positive content details") {
  auto cfg = config(gist::TransformKind::swt, 2, 1e-5);
  const Tensor flat(3, 64, 64, 0.4);
  const Tensor out = gist::artistic_stylize(content64(), flat, cfg);

  // Independent loop: transported approximation, details clipped at zero.
  const auto t = gist::make_transform(cfg.transform);
  const auto style_rep = t->analyze(flat, true);
  auto rep = t->analyze(content64());
  Tensor approx = rep.stacks.back().approx;
  for (int l = 2; l >= 1; --l) {
    gist::SubbandStack s;
    s.approx = gist::apply_map(approx, gist::optimal_map(gist::compute_stats(approx),
                                                         gist::compute_stats(style_rep.stacks[l - 1].approx), cfg.eps));
    for (const Tensor& d : rep.stacks[l - 1].details) {
      Tensor clipped = d;
      for (double& v : clipped.values()) v = std::max(v, 0.0);
      s.details.push_back(clipped);
    }
    approx = t->synthesize_level(s, l);
  }
  CHECK(gist::max_abs_diff(out, approx) <= 1e-10);
}

TEST_CASE("artistic fusion never lowers a content detail") {
  auto cfg = config(gist::TransformKind::swt, 3, 1e-5);
  cfg.mode = gist::StyleMode::artistic;
  cfg.seed = 4;
  int levels = 0;
  cfg.observer = [&](const gist::LevelTrace& t) {
    ++levels;
    CHECK(gist::max_abs_diff(t.after->approx, t.before->approx) > 0.0);
    for (std::size_t k = 1; k < t.after->subband_count(); ++k) {
      const auto& a = t.after->subband(k).values();
      const auto& b = t.before->subband(k).values();
      for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] >= b[i]);
    }
  };
  gist::stylize(content64(), style64(), cfg);
  CHECK(levels == 3);
}

TEST_CASE("artistic fusion raises the positive detail energy over photo mode") {
  // Photo mode without detail alignment hands the content details through, so
  // it is the reference the element-wise maximum is compared against.
  auto positive_energy = [](const gist::SubbandStack& s) {
    double e = 0.0;
    for (const Tensor& d : s.details)
      for (double v : d.values()) e += v > 0.0 ? v * v : 0.0;
    return e;
  };
  const Tensor c = gist::load_image(testing::data_dir() / "corpus" / "astronaut.png");
  const Tensor s = gist::load_image(testing::data_dir() / "corpus" / "hubble.png");
  double energy[2] = {0.0, 0.0};
  for (int artistic = 0; artistic < 2; ++artistic) {
    auto cfg = config(gist::TransformKind::swt, 3, 1e-5);
    cfg.mode = artistic ? gist::StyleMode::artistic : gist::StyleMode::photo;
    cfg.align_details = false;
    cfg.seed = 1;
    cfg.observer = [&](const gist::LevelTrace& t) {
      if (t.level == 1) energy[artistic] = positive_energy(*t.after);
    };
    gist::stylize(c, s, cfg);
  }
  CHECK(energy[1] >= energy[0] - 1e-6);
  CHECK(energy[1] > energy[0]);
}

TEST_CASE("full-size swt run matches the style statistics at every scale") {
  const Tensor c = gist::resize_bilinear(gist::load_image(testing::data_dir() / "corpus" / "rocket.png"), 672, 672);
  const Tensor s = gist::resize_bilinear(gist::load_image(testing::data_dir() / "corpus" / "retina.png"), 672, 672);
  auto cfg = config(gist::TransformKind::swt, 3, 0.0);
  const auto style_rep = gist::make_transform(cfg.transform)->analyze(s, true);
  int seen = 0;
  cfg.observer = [&](const gist::LevelTrace& t) {
    ++seen;
    for (std::size_t k = 0; k < t.after->subband_count(); ++k)
      check_stats_match(gist::compute_stats(t.after->subband(k)),
                        gist::compute_stats(style_rep.stacks[t.level - 1].subband(k)), 1e-4);
  };
  const Tensor out = gist::stylize(c, s, cfg);
  CHECK(seen == 3);
  CHECK(out.same_shape(c));
  CHECK(out.all_finite());
}

TEST_CASE("stylization preserves content better than the raw style on the corpus") {
  const auto entries = gist::read_manifest(testing::data_dir() / "corpus" / "manifest.csv");
  REQUIRE(entries.size() == 20);
  const auto cfg = config(gist::TransformKind::swt, 3, 1e-5);
  for (const auto& e : entries) {
    CAPTURE(e.id);
    Tensor c, s;
    gist::load_pair(e, std::nullopt, c, s);
    Tensor out = gist::stylize(c, s, cfg);
    REQUIRE(out.all_finite());
    for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
    CHECK(gist::ssim(out, c) > gist::ssim(s, c));
  }
}
