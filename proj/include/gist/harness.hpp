#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gist/pipeline.hpp"

namespace gist {

struct CorpusEntry {
  std::string id;
  std::filesystem::path content;
  std::filesystem::path style;
};

// One `content,style[,id]` pair per line; blank lines and '#' comments are
// skipped; relative paths resolve against the manifest's directory.
std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path);

struct Size {
  int width = 0;
  int height = 0;
};

Size parse_size(const std::string& text);  // "WxH"

struct JobReport {
  std::size_t index = 0;
  std::string pair_id;
  std::string content;
  std::string style;
  std::string status = "ok";  // ok | failed | mean | std
  double ssim = 0.0;          // SSIM(output, content)
  std::vector<double> w2_per_scale;  // mean W2^2 between output and style subbands, finest first
  double seconds = 0.0;       // stylization only, I/O excluded
  std::string transform;
  std::string wavelet;
  int levels = 0;
  std::string directions;
  double eps = 0.0;
  std::string mode;
  std::string error;
};

// Column order of the CSV report.
const std::vector<std::string>& report_columns();

void write_report(std::ostream& out, const std::vector<JobReport>& rows, bool aggregate = true);
std::vector<JobReport> read_report(std::istream& in);

// Adds the configuration echo columns of a report row.
void echo_config(JobReport& row, const StyleJobConfig& cfg);

// Per-scale diagnostic: mean over subbands of W2^2 between output and style statistics.
std::vector<double> style_distance_per_scale(const Tensor& output, const Tensor& style,
                                             const TransformSpec& spec);

struct CorpusOptions {
  StyleJobConfig cfg;
  std::optional<Size> resize;
  int jobs = 1;
  std::filesystem::path out_dir;  // stylized images are written here when set
};

struct CorpusResult {
  std::vector<JobReport> rows;  // manifest order
  std::size_t failures = 0;
};

// Loads a pair the way the command line does: optional resize, matching channel counts.
void load_pair(const CorpusEntry& entry, const std::optional<Size>& resize, Tensor& content,
               Tensor& style);

CorpusResult run_corpus(const std::vector<CorpusEntry>& entries, const CorpusOptions& opts);
CorpusResult run_corpus(const std::filesystem::path& manifest, const CorpusOptions& opts);

}  // namespace gist
