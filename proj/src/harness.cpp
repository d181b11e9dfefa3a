#include "gist/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "gist/errors.hpp"
#include "gist/log.hpp"
#include "gist/metrics.hpp"
#include "gist/transport.hpp"

namespace gist {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(10) << v;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s.empty()) return 0.0;
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw FormatError("not a number in report: '" + s + "'");
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// Splits one CSV record, honoring quotes. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string cur;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          cur += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!any) return false;
  fields.push_back(std::move(cur));
  return true;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::string> to_fields(const JobReport& r, bool with_index) {
  return {with_index ? std::to_string(r.index) : "",
          r.pair_id,
          r.content,
          r.style,
          r.status,
          format_double(r.ssim),
          join_doubles(r.w2_per_scale),
          format_double(r.seconds),
          r.transform,
          r.wavelet,
          r.levels ? std::to_string(r.levels) : "",
          r.directions,
          format_double(r.eps),
          r.mode,
          r.error};
}

JobReport aggregate_row(const std::vector<JobReport>& rows, bool stddev) {
  std::vector<const JobReport*> ok;
  for (const JobReport& r : rows)
    if (r.status == "ok") ok.push_back(&r);
  JobReport a;
  a.pair_id = stddev ? "std" : "mean";
  a.status = a.pair_id;
  if (!rows.empty()) {
    a.transform = rows.front().transform;
    a.wavelet = rows.front().wavelet;
    a.levels = rows.front().levels;
    a.directions = rows.front().directions;
    a.eps = rows.front().eps;
    a.mode = rows.front().mode;
  }
  if (ok.empty()) return a;
  auto stat = [&](auto get) {
    double m = 0.0;
    for (const JobReport* r : ok) m += get(*r);
    m /= static_cast<double>(ok.size());
    if (!stddev) return m;
    double v = 0.0;
    for (const JobReport* r : ok) v += (get(*r) - m) * (get(*r) - m);
    return std::sqrt(v / static_cast<double>(ok.size()));
  };
  a.ssim = stat([](const JobReport& r) { return r.ssim; });
  a.seconds = stat([](const JobReport& r) { return r.seconds; });
  std::size_t scales = ok.front()->w2_per_scale.size();
  for (const JobReport* r : ok) scales = std::min(scales, r->w2_per_scale.size());
  for (std::size_t l = 0; l < scales; ++l) {
    a.w2_per_scale.push_back(stat([l](const JobReport& r) { return r.w2_per_scale[l]; }));
  }
  return a;
}

Tensor clamp01(Tensor t) {
  for (double& v : t.values()) v = std::clamp(v, 0.0, 1.0);
  return t;
}

JobReport run_pair(std::size_t index, const CorpusEntry& entry, const CorpusOptions& opts) {
  JobReport row;
  row.index = index;
  row.pair_id = entry.id;
  row.content = entry.content.string();
  row.style = entry.style.string();
  echo_config(row, opts.cfg);
  try {
    Tensor content;
    Tensor style;
    load_pair(entry, opts.resize, content, style);
    const auto t0 = std::chrono::steady_clock::now();
    const Tensor out = clamp01(stylize(content, style, opts.cfg));
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.ssim = ssim(out, content);
    row.w2_per_scale = style_distance_per_scale(out, style, opts.cfg.transform);
    if (!opts.out_dir.empty()) save_image(out, opts.out_dir / (entry.id + ".png"));
  } catch (const std::exception& e) {
    row.status = "failed";
    row.error = e.what();
    log::error("pair " + entry.id + ": " + e.what());
  }
  return row;
}

}  // namespace

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<CorpusEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto parts = split(line, ',');
    if (parts.size() < 2 || parts.size() > 3) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected content,style[,id]");
    }
    CorpusEntry e;
    e.content = base / trim(parts[0]);
    e.style = base / trim(parts[1]);
    e.id = parts.size() == 3 ? trim(parts[2]) : "pair" + std::to_string(entries.size());
    entries.push_back(std::move(e));
  }
  return entries;
}

Size parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  Size s;
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    s.width = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string h = text.substr(x + 1);
    s.height = std::stoi(h, &used);
    if (used != h.size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw ArgumentError("expected WxH, got '" + text + "'");
  }
  if (s.width < 1 || s.height < 1) throw ArgumentError("size must be positive, got '" + text + "'");
  return s;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{
      "index", "pair_id", "content", "style", "status", "ssim", "w2_per_scale", "seconds",
      "transform", "wavelet", "levels", "directions", "eps", "mode", "error"};
  return cols;
}

void write_report(std::ostream& out, const std::vector<JobReport>& rows, bool aggregate) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  auto emit = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << csv_field(f[i]);
    out << "\n";
  };
  for (const JobReport& r : rows) emit(to_fields(r, true));
  if (aggregate && !rows.empty()) {
    emit(to_fields(aggregate_row(rows, false), false));
    emit(to_fields(aggregate_row(rows, true), false));
  }
}

std::vector<JobReport> read_report(std::istream& in) {
  std::vector<std::string> f;
  if (!read_record(in, f) || f != report_columns()) throw FormatError("unexpected report header");
  std::vector<JobReport> rows;
  while (read_record(in, f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != report_columns().size()) throw FormatError("report row has wrong column count");
    JobReport r;
    r.index = f[0].empty() ? 0 : static_cast<std::size_t>(std::stoull(f[0]));
    r.pair_id = f[1];
    r.content = f[2];
    r.style = f[3];
    r.status = f[4];
    r.ssim = parse_double(f[5]);
    if (!f[6].empty())
      for (const std::string& v : split(f[6], ';')) r.w2_per_scale.push_back(parse_double(v));
    r.seconds = parse_double(f[7]);
    r.transform = f[8];
    r.wavelet = f[9];
    r.levels = f[10].empty() ? 0 : std::stoi(f[10]);
    r.directions = f[11];
    r.eps = parse_double(f[12]);
    r.mode = f[13];
    r.error = f[14];
    rows.push_back(std::move(r));
  }
  return rows;
}

void echo_config(JobReport& row, const StyleJobConfig& cfg) {
  row.transform = to_string(cfg.transform.kind);
  const bool contourlet = cfg.transform.kind == TransformKind::contourlet;
  row.wavelet = contourlet ? "" : cfg.transform.wavelet;
  row.levels = cfg.transform.levels;
  row.directions = contourlet ? join_ints(cfg.transform.directions) : "";
  row.eps = cfg.eps;
  row.mode = to_string(cfg.mode);
}

std::vector<double> style_distance_per_scale(const Tensor& output, const Tensor& style,
                                             const TransformSpec& spec) {
  const auto t = make_transform(spec);
  try {
    t->check_dims(style.height(), style.width());
  } catch (const ArgumentError&) {
    return {};
  }
  std::vector<double> out;
  Tensor a = output;
  Tensor b = style;
  for (int l = 1; l <= t->levels(); ++l) {
    SubbandStack sa = t->analyze_level(a, l);
    SubbandStack sb = t->analyze_level(b, l);
    double sum = 0.0;
    for (std::size_t k = 0; k < sa.subband_count(); ++k) {
      sum += wasserstein2_sq(compute_stats(sa.subband(k)), compute_stats(sb.subband(k)));
    }
    out.push_back(sum / static_cast<double>(sa.subband_count()));
    a = std::move(sa.approx);
    b = std::move(sb.approx);
  }
  return out;
}

void load_pair(const CorpusEntry& entry, const std::optional<Size>& resize, Tensor& content,
               Tensor& style) {
  content = load_image(entry.content);
  style = load_image(entry.style);
  if (resize) {
    content = resize_bilinear(content, resize->width, resize->height);
    style = resize_bilinear(style, resize->width, resize->height);
  }
  if (content.channels() != style.channels()) {
    content = to_rgb(content);
    style = to_rgb(style);
  }
}

CorpusResult run_corpus(const std::vector<CorpusEntry>& entries, const CorpusOptions& opts) {
  opts.cfg.validate();
  if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
  CorpusResult result;
  result.rows.resize(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      result.rows[i] = run_pair(i, entries[i], opts);
      log::info("pair " + entries[i].id + ": " + result.rows[i].status);
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(entries.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const JobReport& r : result.rows)
    if (r.status != "ok") ++result.failures;
  return result;
}

CorpusResult run_corpus(const std::filesystem::path& manifest, const CorpusOptions& opts) {
  return run_corpus(read_manifest(manifest), opts);
}

}  // namespace gist
