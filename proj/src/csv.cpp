#include <charconv>
#include <cmath>
#include <ostream>

#include "corpca/error.hpp"
#include "corpca/io.hpp"

namespace corpca {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_comment(const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string out = std::string("# corpca ") + kVersion;
  for (const auto& [key, value] : fields) out += " " + key + "=" + value;
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& comment, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  if (!comment.empty()) out_ << (comment.front() == '#' ? comment : "# " + comment) << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidInput("CSV row width does not match the header");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out_ << c;
    } else {
      out_ << '"';
      for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    }
  }
  out_ << '\n';
}

void write_phase_csv(std::ostream& out, const PhaseGrid& grid, const std::string& comment) {
  CsvWriter csv(out, comment, {"s0", "m", "trials", "successes", "bound_nl1", "bound_l1l1", "bound_l1"});
  for (const PhaseCell& c : grid.cells)
    csv.row({static_cast<double>(c.s0), static_cast<double>(c.m), static_cast<double>(c.trials),
             static_cast<double>(c.successes), c.bound_nl1, c.bound_l1l1, c.bound_l1});
}

}  // namespace corpca
