#include "gist/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "gist/errors.hpp"
#include "gist/harness.hpp"
#include "gist/log.hpp"
#include "gist/metrics.hpp"
#include "gist/pipeline.hpp"

namespace gist::cli {

namespace {

struct Options {
  std::string content;
  std::vector<std::string> styles;
  std::string out;
  std::string manifest;
  std::string out_dir;
  std::string transform = "swt";
  std::string wavelet = "db2";
  int levels = 3;
  std::string directions;
  double eps = kDefaultEps;
  std::string mode = "photo";
  std::string lambda;
  std::string content_mask;
  std::string style_mask;
  int etf_radius = 5;
  int etf_iters = 3;
  std::uint64_t seed = 0;
  std::string report;
  int jobs = 1;
  std::string resize;
  std::string dump_subbands;
  std::string align_details = "on";
};

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ArgumentError(std::string("bad ") + what + " value '" + item + "'");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_doubles(text, what)) {
    if (v != static_cast<int>(v)) throw ArgumentError(std::string("bad ") + what + " value");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<int> default_directions(int levels) {
  std::vector<int> d(std::max(levels, 0), 4);
  if (!d.empty()) d.front() = 1;
  return d;
}

StyleJobConfig make_config(const Options& o, std::size_t style_count) {
  StyleJobConfig cfg;
  cfg.transform.kind = parse_transform_kind(o.transform);
  cfg.transform.wavelet = o.wavelet;
  cfg.transform.levels = o.levels;
  cfg.transform.directions =
      o.directions.empty() ? default_directions(o.levels) : parse_ints(o.directions, "--directions");
  cfg.eps = o.eps;
  cfg.mode = parse_style_mode(o.mode);
  cfg.seed = o.seed;
  cfg.etf.radius = o.etf_radius;
  cfg.etf.iterations = o.etf_iters;
  cfg.align_details = o.align_details == "on";
  cfg.dump_dir = o.dump_subbands;
  if (!o.lambda.empty() || style_count > 1) {
    BlendWeights w;
    const auto v = o.lambda.empty() ? std::vector<double>{0.0} : parse_doubles(o.lambda, "--lambda");
    w.lambda0 = v.front();
    if (v.size() == 1) {
      w.lambdas.assign(style_count, (1.0 - w.lambda0) / static_cast<double>(std::max<std::size_t>(style_count, 1)));
    } else {
      w.lambdas.assign(v.begin() + 1, v.end());
    }
    w.validate(style_count);
    cfg.blend = w;
  }
  cfg.validate();
  make_transform(cfg.transform);
  return cfg;
}

int run_single(const Options& o, StyleJobConfig cfg, std::ostream& out) {
  const std::optional<Size> size = o.resize.empty() ? std::nullopt : std::optional(parse_size(o.resize));
  Tensor content = load_image(o.content);
  std::vector<Tensor> styles;
  for (const std::string& s : o.styles) styles.push_back(load_image(s));
  if (size) {
    content = resize_bilinear(content, size->width, size->height);
    for (Tensor& s : styles) s = resize_bilinear(s, size->width, size->height);
  }
  const bool rgb = content.channels() == 3 ||
                   std::any_of(styles.begin(), styles.end(), [](const Tensor& s) { return s.channels() == 3; });
  if (rgb) {
    content = to_rgb(content);
    for (Tensor& s : styles) s = to_rgb(s);
  }
  if (!o.content_mask.empty()) {
    cfg.content_mask = resize_nearest(load_mask(o.content_mask), content.width(), content.height());
  }
  if (!o.style_mask.empty()) {
    cfg.style_mask = resize_nearest(load_mask(o.style_mask), styles.front().width(), styles.front().height());
  }

  const auto t0 = std::chrono::steady_clock::now();
  Tensor result = run_style_job(content, styles, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (double& v : result.values()) v = std::clamp(v, 0.0, 1.0);
  save_image(result, o.out);
  log::info("wrote " + o.out);

  if (!o.report.empty()) {
    JobReport row;
    row.pair_id = std::filesystem::path(o.content).stem().string();
    row.content = o.content;
    row.style = o.styles.front();
    echo_config(row, cfg);
    row.ssim = ssim(result, content);
    row.w2_per_scale = style_distance_per_scale(result, styles.front(), cfg.transform);
    row.seconds = seconds;
    std::ofstream f(o.report);
    if (!f) throw IoError("cannot write report " + o.report);
    write_report(f, {row}, false);
  }
  out << o.out << " " << seconds << " s\n";
  return 0;
}

int run_manifest(const Options& o, const StyleJobConfig& cfg, std::ostream& out) {
  CorpusOptions opts;
  opts.cfg = cfg;
  opts.jobs = o.jobs;
  opts.out_dir = o.out_dir;
  if (!o.resize.empty()) opts.resize = parse_size(o.resize);
  const CorpusResult res = run_corpus(o.manifest, opts);
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) throw IoError("cannot write report " + o.report);
    write_report(f, res.rows);
  } else {
    write_report(out, res.rows);
  }
  return res.failures == 0 ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  log::configure_from_env();
  Options o;
  CLI::App app{"Multiscale geometric style transfer", "gist"};
  app.set_config("--config", "", "TOML file with option values; flags given on the command line win");
  app.add_option("--content", o.content, "Content image (PNG, PPM or PGM)");
  app.add_option("--style", o.styles, "Style image; repeat for interpolation");
  app.add_option("--out", o.out, "Output image");
  app.add_option("--manifest", o.manifest, "Corpus manifest with content,style[,id] lines");
  app.add_option("--out-dir", o.out_dir, "Directory for corpus outputs");
  app.add_option("--transform", o.transform, "Multiscale transform")
      ->check(CLI::IsMember({"dwt", "swt", "contourlet"}));
  app.add_option("--wavelet", o.wavelet, "Wavelet family")->check(CLI::IsMember({"haar", "db1", "db2"}));
  app.add_option("--levels", o.levels, "Number of scales L")->check(CLI::PositiveNumber);
  app.add_option("--directions", o.directions, "Contourlet directions per scale, finest first, e.g. 1,4,4");
  app.add_option("--eps", o.eps, "Covariance regularizer")->check(CLI::NonNegativeNumber);
  app.add_option("--mode", o.mode, "photo or artistic")->check(CLI::IsMember({"photo", "artistic"}));
  app.add_option("--lambda", o.lambda, "Blend weights: lambda0[,lambda1,...]");
  app.add_option("--content-mask", o.content_mask, "Content label image");
  app.add_option("--style-mask", o.style_mask, "Style label image");
  app.add_option("--etf-radius", o.etf_radius, "Edge flow neighborhood radius")->check(CLI::PositiveNumber);
  app.add_option("--etf-iters", o.etf_iters, "Edge flow refinement passes")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for the artistic style crop");
  app.add_option("--report", o.report, "CSV report path");
  app.add_option("--jobs", o.jobs, "Parallel corpus pairs")->check(CLI::PositiveNumber);
  app.add_option("--resize", o.resize, "Resize inputs to WxH");
  app.add_option("--dump-subbands", o.dump_subbands, "Write subbands as PNGs into this directory");
  app.add_option("--align-details", o.align_details, "Transport detail subbands too")
      ->check(CLI::IsMember({"on", "off"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const bool corpus = !o.manifest.empty();
  StyleJobConfig cfg;
  try {
    if (corpus && !o.content.empty()) throw ArgumentError("--manifest and --content are exclusive");
    if (!corpus) {
      if (o.content.empty()) throw ArgumentError("--content is required");
      if (o.styles.empty()) throw ArgumentError("--style is required");
      if (o.out.empty()) throw ArgumentError("--out is required");
    }
    if (!o.resize.empty()) parse_size(o.resize);
    cfg = make_config(o, corpus ? 1 : o.styles.size());
    if (corpus && cfg.blend) throw ArgumentError("--lambda is not supported with --manifest");
    if (cfg.blend && (!o.content_mask.empty() || !o.style_mask.empty())) {
      throw ArgumentError("--lambda cannot be combined with region masks");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    return corpus ? run_manifest(o, cfg, out) : run_single(o, cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gist::cli
