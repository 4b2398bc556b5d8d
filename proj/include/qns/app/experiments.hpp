#pragma once

// In-memory experiment runners behind the CLI subcommands. Each takes a
// validated-on-the-fly config and returns plain tables plus structured
// results; the CLI layer only writes them out.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qns/app/config.hpp"
#include "qns/io.hpp"
#include "qns/reconstruction.hpp"

namespace qns::app {

/// Named output tables, written as <name>.tsv.
using Tables = std::map<std::string, io::Table>;

// ---- dpss ----

struct DpssRun {
  DpssSet set;
  std::vector<Dpswf> waveforms;
  Tables tables;
};

DpssRun run_dpss(const Json& config);

// ---- filters ----

struct FiltersRun {
  std::vector<Control> controls;
  std::vector<ControlFilters> filters;
  std::vector<double> omega;
  Tables tables;
};

FiltersRun run_filters(const Json& config);

// ---- simulate ----

struct DatasetRow {
  std::size_t control = 0;
  std::string label;
  double shift = 0.0;  // rad/s
  double probe = 0.0;  // rad/s; 0 when no probe sweep
  std::array<double, 3> probability{};  // readout-corrected P(up_x), P(up_y), P(up_z)
  std::array<double, 3> probability_error{};
  SignalProjections projections;        // S_x, S_y, S_z
  std::size_t realizations = 0;
};

struct Dataset {
  Json config;
  std::uint64_t seed = 0;
  std::vector<DatasetRow> rows;
};

Dataset run_simulate(const Json& config, std::uint64_t seed);
io::Table dataset_table(const Dataset& d);
Dataset dataset_from_table(const io::Table& t, Json config, std::uint64_t seed);

// ---- reconstruct ----

struct Series {
  std::string name;
  std::vector<PointEstimate> points;
  std::vector<Band> bands;     // band or segment behind each point
  std::vector<double> truth;   // empty when the dataset has no known truth
};

struct ReconstructionRun {
  std::string method;
  std::vector<Series> series;
  Tables tables;
  Json info;
};

ReconstructionRun run_reconstruct(const Json& config, const Dataset& dataset);

// ---- compare ----

struct MethodMetrics {
  std::string method;
  std::size_t points = 0;            // inside the shared range
  double mean_abs_rel_error = 0.0;   // over the shared range
  double low_frequency_bias = 0.0;   // mean signed relative error below a quarter of the shared range
  double mean_signed_rel_error = 0.0;
};

struct CompareRun {
  std::vector<Series> series;  // dpss, cpmg, as
  std::vector<MethodMetrics> metrics;
  Band shared;                 // rad/s
  double as_max = 0.0;         // m_max omega_0
  double weight_above_as_max = 0.0;
  Tables tables;
};

CompareRun run_compare(const Json& config);

/// Mean of the continuous spectrum over a band (Simpson, 256 panels).
double band_average(const Spectrum& s, Band b);

}  // namespace qns::app
