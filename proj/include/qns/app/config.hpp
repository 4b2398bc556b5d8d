#pragma once

// Experiment configuration. Configs are JSON documents whose physical keys
// carry their unit in the name: *_hz for frequencies, *_s for times,
// *_rad_per_s for drive amplitudes. Spectral densities (level, height) are in
// noise units squared times seconds and tone powers in noise units squared per
// second. Frequencies are converted to rad/s on the way in.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "qns/dpss.hpp"
#include "qns/filters.hpp"
#include "qns/noise.hpp"
#include "qns/waveforms.hpp"

namespace qns::app {

using Json = nlohmann::json;

/// Throws a Validation error naming the field.
[[noreturn]] void invalid(const std::string& path, const std::string& message);

/// A JSON value together with its dotted path, for error messages.
class Node {
 public:
  Node(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const Json& json() const { return *value_; }
  const std::string& path() const { return path_; }

  bool has(std::string_view key) const;
  Node at(std::string_view key) const;
  std::optional<Node> find(std::string_view key) const;
  std::size_t size() const;  // array length
  Node item(std::size_t i) const;

  double number() const;
  double positive() const;
  double nonnegative() const;
  std::size_t count() const;
  bool boolean() const;
  std::string text() const;
  std::vector<double> numbers() const;

  double number_or(std::string_view key, double fallback) const;
  std::size_t count_or(std::string_view key, std::size_t fallback) const;
  std::string text_or(std::string_view key, const std::string& fallback) const;

 private:
  const Json* value_;
  std::string path_;
};

/// Parses JSON text; syntax errors report line and column.
Json parse_json(const std::string& text, const std::string& source);

Spectrum parse_spectrum(const Node& n);

/// W directly, or NW divided by the sequence length.
double parse_half_bandwidth(const Node& n, std::size_t length);

/// {mode: fixed | energy | theta_energy | max_theta, value}.
Scaling parse_scaling(const Node& n);

/// shift_hz, a shifts_hz list, or shifts_hz {start_hz, step_hz, count}; rad/s.
std::vector<double> parse_shifts(const Node& n);

/// Uniform grid {f_min_hz, f_max_hz, points} in rad/s.
std::vector<double> parse_grid(const Node& n);

/// DPSS sets shared between controls with the same (N, W, k).
class DpssCache {
 public:
  const DpssSet& get(std::size_t n, double w, std::size_t order);

 private:
  std::map<std::tuple<std::size_t, double, std::size_t>, DpssSet> sets_;
};

/// One control: a piecewise-constant waveform, or an instantaneous-pulse
/// sequence that has no finite-amplitude rendering.
struct Control {
  std::string label;
  std::string type;
  std::optional<Waveform> waveform;
  std::optional<PulseSequence> pulses;
  double shift = 0.0;  // rad/s
  double dt = 0.0;
  double half_bandwidth = 0.0;
  std::size_t pulse_count = 0;
  bool has_band = false;
  Band band;

  double duration() const;
};

/// Expands a control list. Entries with "shifts_hz" (or "pulses" given as a
/// list) produce one control per value.
std::vector<Control> build_controls(const Node& list, DpssCache& cache);

/// Filters of a control on a grid: F_z, F_Omega and |F_zz|^2. Instantaneous
/// pulse sequences only have the switching filter, stored as F_zz.
struct ControlFilters {
  FilterFunction dephasing;
  FilterFunction amplitude;
  FilterFunction zz_power;
};

ControlFilters control_filters(const Control& c, const std::vector<double>& omega);

/// Default analysis grid for a control list: [0, pi / min dt] (or ten times
/// the fastest pulse rate for pulse sequences) with `points` samples.
std::vector<double> default_control_grid(const std::vector<Control>& controls, std::size_t points);

}  // namespace qns::app
