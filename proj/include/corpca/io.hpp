#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "corpca/experiments.hpp"
#include "corpca/linalg.hpp"
#include "corpca/solvers.hpp"

namespace corpca {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// PGM

/// Binary greyscale image, pixels stored row by row.
struct PgmImage {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(Eigen::Index row, Eigen::Index col) const { return pixels[static_cast<size_t>(row * width + col)]; }
};

/// Parses a P5 image. `name` labels error messages.
PgmImage parse_pgm(const std::string& bytes, const std::string& name = "<memory>");
PgmImage read_pgm(const std::filesystem::path& path);
std::string encode_pgm(const PgmImage& img);
void write_pgm(const std::filesystem::path& path, const PgmImage& img);

/// Pixels / maxval, column-major.
Vector pgm_to_vector(const PgmImage& img);
/// Rounds values clipped to [0, 1] onto 0..maxval.
PgmImage vector_to_pgm(const Eigen::Ref<const Vector>& v, Eigen::Index height, Eigen::Index width, int maxval = 255);

struct FrameSequence {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  std::vector<Vector> frames;
  std::vector<std::vector<bool>> masks;  ///< empty, or one per frame
  std::vector<std::string> names;

  Eigen::Index n() const { return width * height; }
  size_t size() const { return frames.size(); }
  bool has_masks() const { return !masks.empty(); }
  /// n x (last - first) block of frames.
  Matrix columns(size_t first, size_t last) const;
};

/// Loads the P5 files of `dir` whose names match the glob `pattern`, sorted by
/// filename.
FrameSequence load_pgm_sequence(const std::filesystem::path& dir, const std::string& pattern = "*.pgm");

/// Loads masks (pixel > maxval/2) into `seq`; counts and sizes must match.
void load_masks(FrameSequence& seq, const std::filesystem::path& dir, const std::string& pattern = "*.pgm");

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip decimal representation.
std::string format_number(double v);

/// Comment line, header row, then data rows; comma separated, LF endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& comment, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  size_t columns_;
};

/// "# corpca <version> key=value ..."
std::string csv_comment(const std::vector<std::pair<std::string, std::string>>& fields);

void write_phase_csv(std::ostream& out, const PhaseGrid& grid, const std::string& comment);

// ---------------------------------------------------------------------------
// Sequence separation

struct SeparateOptions {
  double rate = 1.0;
  size_t train = 0;
  int J = 3;
  std::uint64_t seed = 0;
  Method method = Method::Nl1;
  SolverConfig solver;
  PcpOptions pcp;
};

struct FrameReport {
  size_t frame = 0;  ///< index into the sequence
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double f1 = 0.0;
  double threshold = 0.0;
  double auc = 0.0;
  std::vector<RocPoint> roc;
};

struct SeparateResult {
  Eigen::Index m = 0;
  std::vector<Vector> x_hat;
  std::vector<Vector> v_hat;
  std::vector<FrameReport> frames;
};

/// m = round(rate n) measurements per frame; rate 1 observes frames directly.
Eigen::Index measurement_count(double rate, Eigen::Index n);

/// Bootstraps on the first `train` frames, then separates each later frame
/// with one fixed sensing matrix.
SeparateResult separate_sequence(const FrameSequence& seq, const SeparateOptions& opts);

}  // namespace corpca
