#include "qns/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qns/error.hpp"

namespace qns::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Validation, "not a number: '" + std::string(s) + "'");
  }
  return x;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw Error(ErrorCode::GridMismatch, "row width does not match header");
  rows.push_back(std::move(row));
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::Validation, "missing column '" + std::string(name) + "'");
}

namespace {

void write_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << '\t';
    os << cells[i];
  }
  os << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, '\t')) out.push_back(cell);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

}  // namespace

void write_tsv(const std::filesystem::path& path, const Table& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Validation, "cannot write " + path.string());
  write_line(os, table.header);
  for (const auto& r : table.rows) write_line(os, r);
  if (!os) throw Error(ErrorCode::Validation, "write failed for " + path.string());
}

Table read_tsv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Validation, "cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Validation, path.string() + " is empty");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::Validation, path.string() + ":" + std::to_string(lineno) + ": wrong number of columns");
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

Table waveform_table(const Waveform& w) {
  Table t;
  t.header = {"t_start_s", "omega_rad_s"};
  for (std::size_t j = 0; j < w.values.size(); ++j) t.add_row({format_double(w.edges[j]), format_double(w.values[j])});
  t.add_row({format_double(w.duration()), "0"});
  return t;
}

Table filter_table(const FilterFunction& ff) {
  Table t;
  t.header = {"f_hz", "value"};
  for (std::size_t j = 0; j < ff.omega.size(); ++j) {
    t.add_row({format_double(rad_to_hz(ff.omega[j])), format_double(ff.values[j])});
  }
  return t;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[x & 0xF];
    x >>= 4;
  }
  return s;
}

}  // namespace qns::io
