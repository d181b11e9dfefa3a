#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "gist/errors.hpp"
#include "gist/image.hpp"

namespace gist {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

struct Raster8 {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3, interleaved
  std::vector<std::uint8_t> bytes;
};

bool has_png_signature(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

Raster8 read_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw FormatError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  // Decoding with alpha and stripping it afterwards drops alpha instead of
  // compositing it over a background.
  image.format = gray ? PNG_FORMAT_GA : PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> withalpha(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, withalpha.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  Raster8 r;
  r.width = static_cast<int>(image.width);
  r.height = static_cast<int>(image.height);
  r.channels = gray ? 1 : 3;
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
  const std::size_t stride = static_cast<std::size_t>(r.channels) + 1;
  r.bytes.resize(n * r.channels);
  for (std::size_t p = 0; p < n; ++p)
    for (int c = 0; c < r.channels; ++c) r.bytes[p * r.channels + c] = withalpha[p * stride + c];
  return r;
}

void write_png(const Raster8& r, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(r.width);
  image.height = static_cast<png_uint_32>(r.height);
  image.format = r.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, r.bytes.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

// Reads the next whitespace-separated header token, skipping '#' comments.
int read_pnm_int(std::istream& in) {
  int c = in.get();
  while (in && (std::isspace(c) || c == '#')) {
    if (c == '#') {
      while (in && c != '\n') c = in.get();
    }
    c = in.get();
  }
  std::string tok;
  while (in && std::isdigit(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (tok.empty()) throw FormatError("malformed PNM header");
  return std::stoi(tok);
}

Raster8 read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5')) {
    throw FormatError("unsupported PNM variant in " + path.string());
  }
  Raster8 r;
  r.channels = magic[1] == '6' ? 3 : 1;
  r.width = read_pnm_int(in);
  r.height = read_pnm_int(in);
  int maxval = read_pnm_int(in);
  if (maxval != 255) throw FormatError("only 8-bit PNM is supported");
  if (r.width < 1 || r.height < 1) throw FormatError("invalid PNM dimensions");
  r.bytes.resize(static_cast<std::size_t>(r.width) * r.height * r.channels);
  in.read(reinterpret_cast<char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != r.bytes.size()) {
    throw FormatError("truncated PNM data in " + path.string());
  }
  return r;
}

void write_pnm(const Raster8& r, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (r.channels == 3 ? "P6" : "P5") << "\n" << r.width << " " << r.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.bytes.data()),
            static_cast<std::streamsize>(r.bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

Raster8 read_raster(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
  }
  if (has_png_signature(path)) return read_png(path);
  std::ifstream in(path, std::ios::binary);
  char magic[2] = {};
  in.read(magic, 2);
  if (in.gcount() == 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
    return read_pnm(path);
  }
  throw FormatError("unsupported image format: " + path.string());
}

void write_raster(const Raster8& r, const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    write_pnm(r, path);
  } else {
    write_png(r, path);
  }
}

std::uint8_t quantize(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

}  // namespace

ImageTensor load_image(const fs::path& path) {
  Raster8 r = read_raster(path);
  ImageTensor img(r.channels, r.height, r.width);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < r.channels; ++c)
        img.at(c, y, x) =
            r.bytes[(static_cast<std::size_t>(y) * r.width + x) * r.channels + c] / 255.0;
  return img;
}

void save_image(const ImageTensor& img, const fs::path& path) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw ArgumentError("save_image supports 1 or 3 channels");
  }
  Raster8 r;
  r.width = img.width();
  r.height = img.height();
  r.channels = img.channels();
  r.bytes.resize(img.size());
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < r.channels; ++c)
        r.bytes[(static_cast<std::size_t>(y) * r.width + x) * r.channels + c] =
            quantize(img.at(c, y, x));
  write_raster(r, path);
}

LabelMap load_mask(const fs::path& path) {
  Raster8 r = read_raster(path);
  LabelMap m(r.width, r.height);
  // Color masks use the first channel as the label id.
  for (std::size_t i = 0; i < m.labels.size(); ++i) m.labels[i] = r.bytes[i * r.channels];
  return m;
}

void save_mask(const LabelMap& mask, const fs::path& path) {
  Raster8 r;
  r.width = mask.width;
  r.height = mask.height;
  r.channels = 1;
  r.bytes.resize(mask.labels.size());
  for (std::size_t i = 0; i < mask.labels.size(); ++i) {
    if (mask.labels[i] > 255) throw ArgumentError("mask labels above 255 cannot be stored as PNG");
    r.bytes[i] = static_cast<std::uint8_t>(mask.labels[i]);
  }
  write_raster(r, path);
}

void save_normalized(const Tensor& t, const fs::path& path) {
  auto v = t.values();
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double span = *hi - *lo;
  Tensor n = t;
  for (double& x : n.values()) x = span > 0 ? (x - *lo) / span : 0.0;
  if (n.channels() != 1 && n.channels() != 3) {
    Tensor first(1, n.height(), n.width());
    std::copy(n.plane(0).begin(), n.plane(0).end(), first.plane(0).begin());
    n = std::move(first);
  }
  save_image(n, path);
}

}  // namespace gist
