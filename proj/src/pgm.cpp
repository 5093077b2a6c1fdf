#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "corpca/error.hpp"
#include "corpca/io.hpp"

namespace corpca {

namespace {

class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, const std::string& name) : bytes_(bytes), name_(name) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long long integer(const char* what) {
    skip_space_and_comments();
    const size_t start = pos_;
    long long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000) fail(std::string("PGM ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) fail(std::string("PGM header: expected ") + what, start);
    return value;
  }

  [[noreturn]] void fail(const std::string& what, size_t offset) const {
    throw ParseError(name_ + ": " + what, static_cast<long long>(offset));
  }

  size_t pos_ = 0;

 private:
  const std::string& bytes_;
  const std::string& name_;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> matching_files(const std::filesystem::path& dir, const std::string& pattern) {
  if (!std::filesystem::is_directory(dir)) throw InvalidInput("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw InvalidInput("empty sequence: no files matching '" + pattern + "' in " + dir.string());
  return files;
}

}  // namespace

PgmImage parse_pgm(const std::string& bytes, const std::string& name) {
  HeaderReader rd(bytes, name);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') rd.fail("not a binary PGM (expected magic P5)", 0);
  rd.pos_ = 2;
  PgmImage img;
  img.width = rd.integer("width");
  img.height = rd.integer("height");
  const size_t maxval_at = rd.pos_;
  const long long maxval = rd.integer("maxval");
  if (img.width < 1 || img.height < 1) rd.fail("PGM header: zero image dimension", maxval_at);
  if (maxval < 1 || maxval > 65535) rd.fail("PGM header: maxval outside [1, 65535]", maxval_at);
  img.maxval = static_cast<int>(maxval);
  if (rd.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[rd.pos_])))
    rd.fail("PGM header: missing whitespace before raster", rd.pos_);
  ++rd.pos_;

  const size_t count = static_cast<size_t>(img.width * img.height);
  const size_t bpp = img.maxval < 256 ? 1 : 2;
  if (bytes.size() - rd.pos_ < count * bpp) rd.fail("PGM raster truncated", bytes.size());
  img.pixels.resize(count);
  const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + rd.pos_);
  for (size_t i = 0; i < count; ++i) {
    const unsigned value = bpp == 1 ? raster[i] : (unsigned{raster[2 * i]} << 8) | raster[2 * i + 1];
    if (value > static_cast<unsigned>(img.maxval)) rd.fail("PGM pixel exceeds maxval", rd.pos_ + i * bpp);
    img.pixels[i] = static_cast<std::uint16_t>(value);
  }
  return img;
}

PgmImage read_pgm(const std::filesystem::path& path) { return parse_pgm(slurp(path), path.string()); }

std::string encode_pgm(const PgmImage& img) {
  if (img.maxval < 1 || img.maxval > 65535) throw InvalidInput("PGM maxval outside [1, 65535]");
  if (img.pixels.size() != static_cast<size_t>(img.width * img.height))
    throw InvalidInput("PGM pixel count does not match dimensions");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(img.maxval) + "\n";
  const bool wide = img.maxval > 255;
  out.reserve(out.size() + img.pixels.size() * (wide ? 2 : 1));
  for (std::uint16_t p : img.pixels) {
    if (wide) out.push_back(static_cast<char>(p >> 8));
    out.push_back(static_cast<char>(p & 0xff));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& img) {
  const std::string bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Vector pgm_to_vector(const PgmImage& img) {
  Vector v(img.width * img.height);
  for (Eigen::Index c = 0; c < img.width; ++c)
    for (Eigen::Index r = 0; r < img.height; ++r) v(c * img.height + r) = img.at(r, c) / static_cast<double>(img.maxval);
  return v;
}

PgmImage vector_to_pgm(const Eigen::Ref<const Vector>& v, Eigen::Index height, Eigen::Index width, int maxval) {
  if (v.size() != height * width) throw InvalidInput("vector length does not match image dimensions");
  if (maxval < 1 || maxval > 65535) throw InvalidInput("PGM maxval outside [1, 65535]");
  PgmImage img;
  img.width = width;
  img.height = height;
  img.maxval = maxval;
  img.pixels.resize(static_cast<size_t>(height * width));
  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index r = 0; r < height; ++r) {
      const double x = std::isfinite(v(c * height + r)) ? std::clamp(v(c * height + r), 0.0, 1.0) : 0.0;
      img.pixels[static_cast<size_t>(r * width + c)] = static_cast<std::uint16_t>(std::lround(x * maxval));
    }
  return img;
}

Matrix FrameSequence::columns(size_t first, size_t last) const {
  Matrix M(n(), static_cast<Eigen::Index>(last - first));
  for (size_t t = first; t < last; ++t) M.col(static_cast<Eigen::Index>(t - first)) = frames[t];
  return M;
}

FrameSequence load_pgm_sequence(const std::filesystem::path& dir, const std::string& pattern) {
  FrameSequence seq;
  for (const auto& path : matching_files(dir, pattern)) {
    const PgmImage img = read_pgm(path);
    if (seq.frames.empty()) {
      seq.width = img.width;
      seq.height = img.height;
    } else if (img.width != seq.width || img.height != seq.height) {
      throw FormatError(path.string() + ": dimensions " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " differ from " + std::to_string(seq.width) + "x" +
                        std::to_string(seq.height));
    }
    seq.frames.push_back(pgm_to_vector(img));
    seq.names.push_back(path.filename().string());
  }
  return seq;
}

void load_masks(FrameSequence& seq, const std::filesystem::path& dir, const std::string& pattern) {
  const auto files = matching_files(dir, pattern);
  if (files.size() != seq.size())
    throw FormatError("mask count " + std::to_string(files.size()) + " differs from frame count " +
                      std::to_string(seq.size()));
  std::vector<std::vector<bool>> masks;
  for (const auto& path : files) {
    const PgmImage img = read_pgm(path);
    if (img.width != seq.width || img.height != seq.height)
      throw FormatError(path.string() + ": mask dimensions differ from the frames");
    std::vector<bool> mask(static_cast<size_t>(seq.n()));
    for (Eigen::Index c = 0; c < img.width; ++c)
      for (Eigen::Index r = 0; r < img.height; ++r)
        mask[static_cast<size_t>(c * img.height + r)] = 2 * static_cast<int>(img.at(r, c)) > img.maxval;
    masks.push_back(std::move(mask));
  }
  seq.masks = std::move(masks);
}

}  // namespace corpca
