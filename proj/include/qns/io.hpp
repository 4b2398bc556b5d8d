#pragma once

// Plain-text outputs: tab-separated tables with shortest round-trip number
// formatting, so re-reading a file reproduces every double bit for bit.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qns/filters.hpp"
#include "qns/waveforms.hpp"

namespace qns::io {

std::string format_double(double x);
double parse_double(std::string_view s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(std::string_view name) const;  // throws when absent
};

void write_tsv(const std::filesystem::path& path, const Table& table);
Table read_tsv(const std::filesystem::path& path);

/// Columns t_start_s, omega_rad_s, plus a final row carrying the end time.
Table waveform_table(const Waveform& w);
/// Columns f_hz, value.
Table filter_table(const FilterFunction& ff);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t x);

}  // namespace qns::io
