#include "fffopt/scan_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "fffopt/error.hpp"
#include "fffopt/text.hpp"

namespace fffopt {

namespace {
constexpr std::string_view kScanHeader = "layer_index,position_mm,height_um";
}

PartScan read_scan_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty scan file");
  ++line_no;
  if (text::chomp(line) != kScanHeader)
    throw ParseError(line_no, "expected header '" + std::string(kScanHeader) + "'");

  std::vector<ScanProfile> profiles;
  std::set<long long> finished;
  long long current = -1;
  std::size_t current_start = 0;
  std::vector<double> pos;
  std::vector<double> h;

  auto flush = [&]() {
    if (current < 0) return;
    try {
      profiles.emplace_back(static_cast<int>(current), std::move(pos), std::move(h));
    } catch (const InvalidInput& e) {
      throw ParseError(current_start, e.what());
    }
    finished.insert(current);
    pos.clear();
    h.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (row.empty()) continue;
    const auto fields = text::split_csv(row);
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields");
    const auto layer = text::parse_int(fields[0]);
    const auto x = text::parse_double(fields[1]);
    const auto z = text::parse_double(fields[2]);
    if (!layer || *layer < 1) throw ParseError(line_no, "bad layer_index");
    if (!x) throw ParseError(line_no, "bad position_mm");
    if (!z) throw ParseError(line_no, "bad height_um");
    if (*layer != current) {
      if (finished.count(*layer)) throw ParseError(line_no, "layer rows are not grouped");
      flush();
      current = *layer;
      current_start = line_no;
    }
    if (pos.size() >= 2) {
      const bool increasing = pos[1] > pos[0];
      if (increasing ? !(*x > pos.back()) : !(*x < pos.back()))
        throw ParseError(line_no, "positions not strictly monotone within layer");
    } else if (pos.size() == 1 && *x == pos.back()) {
      throw ParseError(line_no, "positions not strictly monotone within layer");
    }
    pos.push_back(*x);
    h.push_back(*z);
  }
  flush();
  if (profiles.empty()) throw ParseError(line_no, "scan file has no samples");
  try {
    return PartScan(std::move(profiles));
  } catch (const InvalidInput& e) {
    throw ParseError(0, e.what());
  }
}

PartScan read_scan_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scan file " + path.string());
  return read_scan_csv(in);
}

void write_scan_csv(std::ostream& out, const PartScan& part) {
  out << kScanHeader << '\n';
  for (const auto& p : part.profiles()) {
    const auto pos = p.positions();
    const auto h = p.heights();
    for (std::size_t i = 0; i < p.size(); ++i)
      out << p.layer_index() << ',' << text::format_number(pos[i]) << ','
          << text::format_number(h[i]) << '\n';
  }
}

void write_scan_csv(const std::filesystem::path& path, const PartScan& part) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write scan file " + path.string());
  write_scan_csv(out, part);
}

void write_raster_csv(std::ostream& out, const RasterGrid& grid) {
  out << "pass_index";
  for (double x : grid.cross_positions()) out << ',' << text::format_number(x);
  out << '\n';
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    out << r + 1;
    for (double v : grid.row(r)) out << ',' << text::format_number(v);
    out << '\n';
  }
}

}  // namespace fffopt
