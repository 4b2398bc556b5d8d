#include "qns/app/presets.hpp"

#include <map>

namespace qns::app {

namespace {

// Concentration check of the Slepian tapers.
constexpr const char* kDpss = R"json({
  "seed": 1,
  "dpss": {"N": 128, "W": 0.03125, "k_max": 5, "dt_s": 1e-5, "grid_points": 2048}
})json";

// Finite-difference filter and its response to a swept single-tone probe.
constexpr const char* kFig1 = R"json({
  "seed": 1,
  "waveforms": [
    {"label": "fd", "type": "finite_difference", "N": 600, "NW": 2, "order": 0, "dt_s": 5e-6,
     "shift_hz": 10000, "normalization": {"mode": "max_theta", "value": 0.05}},
    {"label": "cpmg8", "type": "cpmg", "pulses": 8, "tau_s": 3e-3, "pulse_width_s": 35e-6, "buffer_s": 2e-6,
     "grid_step_s": 5e-6}
  ],
  "grid": {"f_max_hz": 25000, "points": 2501},
  "probe": {"f_start_hz": 7000, "f_stop_hz": 13000, "points": 61, "phases": 5, "power": 2e6},
  "noise": {"step_s": 1.25e-6},
  "ensemble": {"mode": "exact", "shots": 0, "readout_fidelity": 0.997}
})json";

// Mixed 1/f plus two-spur dephasing spectrum: coarse scan, fine scan and the
// two-stage Bayesian estimate on 19 segments.
constexpr const char* kFig2 = R"json({
  "seed": 1,
  "waveforms": [
    {"label": "coarse", "type": "finite_difference", "N": 500, "NW": 4, "order": 0, "dt_s": 5e-6,
     "shifts_hz": [0, 2100, 4200, 6200, 8300, 10400, 12500, 14600, 16700],
     "normalization": {"mode": "theta_energy", "value": 1e-4}},
    {"label": "fine", "type": "finite_difference", "N": 1000, "NW": 2, "order": 0, "dt_s": 5e-6,
     "shifts_hz": [8100, 8400, 8600, 8900, 9200, 9400, 9900, 10200, 10500, 10900, 11200, 11500],
     "normalization": {"mode": "theta_energy", "value": 1e-4}}
  ],
  "noise": {
    "dephasing": {"form": "one_over_f_with_spurs", "level": 4, "exponent": 1, "knee_hz": 1500,
                  "spurs": [{"center_hz": 8900, "width_hz": 300, "height": 8},
                            {"center_hz": 10500, "width_hz": 300, "height": 6}],
                  "cutoff_hz": 17750}
  },
  "ensemble": {"mode": "first_order", "realizations": 4000, "shots": 0, "readout_fidelity": 0.997},
  "reconstruction": {
    "method": "bayesian",
    "coarse_label": "coarse",
    "fine_label": "fine",
    "segments_hz": [0, 1050, 3150, 5200, 7950, 8250, 8500, 8750, 9050, 9300, 9650, 10050, 10350,
                    10700, 11050, 11350, 11650, 13550, 15650, 17750],
    "lambda": 0.35,
    "regularized_segments": [4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
    "grid": {"f_max_hz": 40000, "points": 8001}
  }
})json";

// Overlapping Gaussian dephasing and amplitude spectra reconstructed from
// three-axis measurements with 13 band shifts.
constexpr const char* kFig3 = R"json({
  "seed": 1,
  "waveforms": [
    {"label": "fd", "type": "finite_difference", "N": 500, "NW": 3, "order": 0, "dt_s": 5e-6,
     "shifts_hz": {"start_hz": 2000, "step_hz": 1500, "count": 13},
     "normalization": {"mode": "theta_energy", "value": 1e-5}}
  ],
  "noise": {
    "dephasing": {"form": "gaussian_bump", "center_hz": 6000, "width_hz": 3000, "height": 500, "cutoff_hz": 30000},
    "amplitude": {"form": "gaussian_bump", "center_hz": 13000, "width_hz": 3000, "height": 3e-7,
                  "cutoff_hz": 30000}
  },
  "ensemble": {"mode": "first_order", "realizations": 1000, "shots": 0, "readout_fidelity": 0.997},
  "reconstruction": {"method": "multi_axis", "grid": {"f_max_hz": 60000, "points": 8001}}
})json";

// Pulsed and DPSS protocols with trapped-ion parameters.
constexpr const char* kFig4e = R"json({
  "seed": 1,
  "compare": {
    "tau_s": 3e-3,
    "pulse_width_s": 35e-6,
    "buffer_s": 2e-6,
    "spectrum": {"form": "one_over_f_with_spurs", "level": 1, "exponent": 1, "knee_hz": 1000,
                 "spurs": [{"center_hz": 2000, "width_hz": 250, "height": 2},
                           {"center_hz": 6000, "width_hz": 800, "height": 0.8}],
                 "cutoff_hz": 14000},
    "dpss": {"N": 600, "NW": 2, "order": 0, "shifts_hz": {"start_hz": 100, "step_hz": 211, "count": 100},
             "normalization": {"mode": "max_theta", "value": 0.05}},
    "cpmg": {"first": 1},
    "as": {"base_duration_s": 0.75e-3, "m_max": 10, "repetition_factor": 4},
    "idle_ratios": [0, 0.05, 0.1, 0.2, 0.5],
    "grid": {"f_max_hz": 40000, "points": 4001}
  }
})json";

// Pulsed and DPSS protocols with superconducting-qubit parameters.
constexpr const char* kFig4f = R"json({
  "seed": 1,
  "compare": {
    "tau_s": 1e-5,
    "pulse_width_s": 11e-9,
    "buffer_s": 7e-9,
    "spectrum": {"form": "one_over_f_with_spurs", "level": 1, "exponent": 1, "knee_hz": 2e6,
                 "spurs": [{"center_hz": 15e6, "width_hz": 2e6, "height": 0.3},
                           {"center_hz": 40e6, "width_hz": 6e6, "height": 0.2}],
                 "cutoff_hz": 65e6},
    "dpss": {"N": 2000, "NW": 2, "order": 0, "shifts_hz": {"start_hz": 1e5, "step_hz": 6.15e5, "count": 100},
             "normalization": {"mode": "max_theta", "value": 0.05}},
    "cpmg": {"first": 1},
    "as": {"base_duration_s": 1e-6, "m_max": 27, "repetition_factor": 10},
    "idle_ratios": [0, 0.05, 0.1, 0.2, 0.5],
    "grid": {"f_max_hz": 80e6, "points": 8001}
  }
})json";

const std::map<std::string, const char*>& table() {
  static const std::map<std::string, const char*> t{
      {"dpss", kDpss}, {"fig1", kFig1}, {"fig2", kFig2}, {"fig3", kFig3}, {"fig4e", kFig4e}, {"fig4f", kFig4f}};
  return t;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : table()) out.push_back(name);
  return out;
}

Json preset(const std::string& name) {
  const auto it = table().find(name);
  if (it == table().end()) invalid("--preset", "unknown preset '" + name + "'");
  return Json::parse(it->second);
}

}  // namespace qns::app
