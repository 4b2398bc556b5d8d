#include "qns/app/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qns/common.hpp"
#include "qns/error.hpp"
#include "qns/rng.hpp"

namespace qns::app {

namespace {

using io::format_double;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string padded(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return buf;
}

// Library validation failures raised while building from a config are
// reported against the config field.
template <class F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (is_validation_error(e.code())) invalid(path, e.what());
    throw;
  }
}

std::optional<Spectrum> optional_spectrum(const Node& parent, std::string_view key) {
  if (!parent.has(key)) return std::nullopt;
  return parse_spectrum(parent.at(key));
}

double truth_at(const std::optional<Spectrum>& s, double omega) {
  if (!s || s->is_delta()) return kNan;
  return (*s)(omega);
}

double truth_over(const std::optional<Spectrum>& s, Band b) {
  if (!s || s->is_delta()) return kNan;
  return band_average(*s, b);
}

Series point_series(std::string name, std::vector<PointEstimate> points, std::vector<Band> bands,
                    const std::optional<Spectrum>& truth) {
  Series s{std::move(name), std::move(points), std::move(bands), {}};
  if (truth && !truth->is_delta()) {
    for (const auto& p : s.points) s.truth.push_back(truth_at(truth, p.omega));
  }
  return s;
}

// Estimates are written unclipped; `floor` adds a display column floored at 0.
io::Table series_table(const std::vector<Series>& all, bool floor) {
  io::Table t;
  t.header = {"series", "f_hz", "estimate", "std_error", "band_lo_hz", "band_hi_hz", "truth"};
  if (floor) t.header.push_back("display_estimate");
  for (const auto& s : all) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      const Band b = i < s.bands.size() ? s.bands[i] : Band{kNan, kNan};
      const double truth = i < s.truth.size() ? s.truth[i] : kNan;
      t.add_row({s.name, format_double(rad_to_hz(p.omega)), format_double(p.value), format_double(p.std_error),
                 format_double(rad_to_hz(b.lo)), format_double(rad_to_hz(b.hi)), format_double(truth)});
      if (floor) t.rows.back().push_back(format_double(std::max(0.0, p.value)));
    }
  }
  return t;
}

double segment_step(const Waveform& w) {
  if (w.step > 0.0) return w.step;
  double shortest = w.duration();
  for (std::size_t j = 0; j < w.size(); ++j) shortest = std::min(shortest, w.edges[j + 1] - w.edges[j]);
  return shortest;
}

}  // namespace

double band_average(const Spectrum& s, Band b) {
  if (!(b.width() > 0.0)) return s(b.lo);
  const std::size_t panels = 256;
  const double h = b.width() / static_cast<double>(panels);
  double acc = s(b.lo) + s(b.hi);
  for (std::size_t i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * s(b.lo + h * static_cast<double>(i));
  return acc * h / 3.0 / b.width();
}

// ---------------------------------------------------------------- dpss

DpssRun run_dpss(const Json& config) {
  const Node root(config, "");
  const Node n = root.at("dpss");
  const std::size_t length = n.at("N").count();
  if (length < 2) invalid("dpss.N", "need N >= 2");
  const double w = parse_half_bandwidth(n, length);
  const std::size_t k_max = n.count_or("k_max", 0);
  if (k_max >= length) invalid("dpss.k_max", "must be below N");
  const double dt = n.has("dt_s") ? n.at("dt_s").positive() : 1.0;
  const std::size_t points = n.count_or("grid_points", 1024);
  if (points < 2) invalid("dpss.grid_points", "need at least two points");

  DpssRun run;
  run.set = guarded("dpss", [&] { return compute_dpss({length, w, k_max}); });
  const auto omega = uniform_grid(0.0, kPi / dt, points);
  for (std::size_t k = 0; k <= k_max; ++k) run.waveforms.push_back(evaluate_dpswf(run.set, k, dt, omega));

  io::Table seq;
  seq.header = {"n"};
  for (std::size_t k = 0; k <= k_max; ++k) seq.header.push_back("k" + std::to_string(k));
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (std::size_t k = 0; k <= k_max; ++k) row.push_back(format_double(run.set.sequences[k][i]));
    seq.add_row(std::move(row));
  }
  io::Table eig;
  eig.header = {"k", "lambda"};
  for (std::size_t k = 0; k <= k_max; ++k) eig.add_row({std::to_string(k), format_double(run.set.eigenvalues[k])});
  io::Table wf;
  wf.header = {"f_hz"};
  for (std::size_t k = 0; k <= k_max; ++k) wf.header.push_back("U_k" + std::to_string(k));
  for (std::size_t i = 0; i < points; ++i) {
    std::vector<std::string> row{format_double(rad_to_hz(omega[i]))};
    for (std::size_t k = 0; k <= k_max; ++k) row.push_back(format_double(run.waveforms[k].values[i]));
    wf.add_row(std::move(row));
  }
  run.tables["dpss_sequences"] = std::move(seq);
  run.tables["dpss_eigenvalues"] = std::move(eig);
  run.tables["dpswf"] = std::move(wf);
  return run;
}

// ------------------------------------------------------------- filters

FiltersRun run_filters(const Json& config) {
  const Node root(config, "");
  DpssCache cache;
  FiltersRun run;
  run.controls = build_controls(root.at("waveforms"), cache);
  run.omega = root.has("grid") ? parse_grid(root.at("grid")) : default_control_grid(run.controls, kDefaultGridPoints);

  io::Table summary;
  summary.header = {"index", "label", "type", "shift_hz", "duration_s", "band_lo_hz", "band_hi_hz", "in_band_fraction"};
  const Band whole{run.omega.front(), run.omega.back()};
  for (std::size_t i = 0; i < run.controls.size(); ++i) {
    const auto& c = run.controls[i];
    run.filters.push_back(guarded("waveforms", [&] { return control_filters(c, run.omega); }));
    const auto& f = run.filters.back();
    const FilterFunction& main = c.waveform ? f.dephasing : f.zz_power;
    double fraction = kNan;
    if (c.has_band) {
      const double total = band_integral(main, whole);
      if (total > 0.0) fraction = band_integral(main, c.band) / total;
    }
    summary.add_row({std::to_string(i), c.label, c.type, format_double(rad_to_hz(c.shift)), format_double(c.duration()),
                     format_double(c.has_band ? rad_to_hz(c.band.lo) : kNan),
                     format_double(c.has_band ? rad_to_hz(c.band.hi) : kNan), format_double(fraction)});

    io::Table ft;
    ft.header = {"f_hz", "F_z", "F_Omega", "F_zz_power"};
    for (std::size_t q = 0; q < run.omega.size(); ++q) {
      ft.add_row({format_double(rad_to_hz(run.omega[q])), format_double(f.dephasing.values[q]),
                  format_double(f.amplitude.values[q]), format_double(f.zz_power.values[q])});
    }
    run.tables["filter_" + padded(i)] = std::move(ft);
    if (c.waveform) {
      run.tables["waveform_" + padded(i)] = io::waveform_table(*c.waveform);
    } else {
      io::Table pt;
      pt.header = {"pulse", "center_s"};
      for (std::size_t j = 0; j < c.pulses->centers.size(); ++j) {
        pt.add_row({std::to_string(j), format_double(c.pulses->centers[j])});
      }
      run.tables["pulses_" + padded(i)] = std::move(pt);
    }
  }
  run.tables["filters_summary"] = std::move(summary);
  return run;
}

// ------------------------------------------------------------ simulate

namespace {

struct EnsembleSettings {
  bool exact = true;
  std::size_t realizations = 100;
  std::size_t shots = 0;
  double fidelity = kDefaultReadoutFidelity;
  std::size_t substeps = kDefaultSubsteps;
};

EnsembleSettings parse_ensemble(const Node& root) {
  EnsembleSettings e;
  const auto n = root.find("ensemble");
  if (!n) return e;
  const std::string mode = n->text_or("mode", "exact");
  if (mode == "exact") {
    e.exact = true;
  } else if (mode == "first_order") {
    e.exact = false;
  } else {
    invalid(n->path() + ".mode", "expected 'exact' or 'first_order'");
  }
  e.realizations = n->count_or("realizations", e.realizations);
  if (e.realizations == 0) invalid(n->path() + ".realizations", "need at least one realization");
  e.shots = n->count_or("shots", 0);
  e.fidelity = n->number_or("readout_fidelity", e.fidelity);
  if (!(e.fidelity > 0.5 && e.fidelity <= 1.0)) invalid(n->path() + ".readout_fidelity", "must lie in (0.5, 1]");
  e.substeps = n->count_or("substeps", e.substeps);
  if (e.substeps == 0) invalid(n->path() + ".substeps", "must be positive");
  return e;
}

DatasetRow make_row(const SimulationRecord& rec, const EnsembleSettings& e, std::uint64_t shot_seed) {
  TomographyOptions opt;
  opt.mode = e.exact ? TomographyMode::Exact : TomographyMode::FirstOrder;
  opt.shots = e.shots;
  opt.fidelity = e.fidelity;
  opt.seed = shot_seed;
  const auto t = readout_corrected(tomography(rec, opt));
  DatasetRow row;
  row.probability = t.probability;
  row.probability_error = t.std_error;
  row.projections = signal_projections(t);
  row.realizations = t.realizations;
  return row;
}

}  // namespace

Dataset run_simulate(const Json& config, std::uint64_t seed) {
  const Node root(config, "");
  DpssCache cache;
  const auto controls = build_controls(root.at("waveforms"), cache);
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (!controls[i].waveform) {
      invalid("waveforms", "control '" + controls[i].label + "' has instantaneous pulses and cannot be simulated");
    }
  }
  const EnsembleSettings ens = parse_ensemble(root);

  NoiseSpec spec;
  double step = 0.0;
  double spacing = 0.0;
  if (auto noise = root.find("noise")) {
    spec.dephasing = optional_spectrum(*noise, "dephasing");
    spec.amplitude = optional_spectrum(*noise, "amplitude");
    if (noise->has("step_s")) step = noise->at("step_s").positive();
    if (noise->has("comb_spacing_hz")) spacing = hz_to_rad(noise->at("comb_spacing_hz").positive());
  }
  double tau_max = 0.0;
  double finest = INFINITY;
  for (const auto& c : controls) {
    tau_max = std::max(tau_max, c.duration());
    finest = std::min(finest, segment_step(*c.waveform));
  }
  if (step == 0.0) step = 0.25 * finest;
  spec.comb_spacing = spacing > 0.0 ? spacing : default_comb_spacing(tau_max);
  const PropagationOptions popt{ens.substeps, 0.0};

  Dataset d;
  d.config = config;
  d.seed = seed;

  if (auto probe = root.find("probe")) {
    if (spec.dephasing) invalid(probe->path(), "a probe sweep replaces noise.dephasing; remove one of them");
    const double f0 = probe->at("f_start_hz").positive();
    const double f1 = probe->at("f_stop_hz").positive();
    const std::size_t points = probe->at("points").count();
    const std::size_t phases = probe->count_or("phases", 5);
    const double power = probe->at("power").nonnegative();
    if (points == 0) invalid(probe->path() + ".points", "need at least one point");
    if (phases < 2) invalid(probe->path() + ".phases", "need at least two phases");
    const auto freqs = points == 1 ? std::vector<double>{f0} : uniform_grid(f0, f1, points);
    for (std::size_t i = 0; i < controls.size(); ++i) {
      const auto& c = controls[i];
      const TimeGrid grid = covering_grid(c.duration(), step);
      for (std::size_t j = 0; j < freqs.size(); ++j) {
        const double w = hz_to_rad(freqs[j]);
        const auto sweep = phase_sweep_tone(w, power, phases, grid, NoiseComponent::Dephasing);
        std::vector<NoisePair> pairs(phases);
        for (std::size_t k = 0; k < phases; ++k) {
          pairs[k].dephasing = sweep[k];
          if (spec.amplitude) {
            pairs[k].amplitude = realize(*spec.amplitude, grid, spec.comb_spacing,
                                         derive_seed(seed, streams::kAmplitude, k), NoiseComponent::Amplitude);
          }
        }
        const auto rec = ens.exact ? simulate(*c.waveform, pairs, true, popt) : simulate_spectral(*c.waveform, pairs);
        DatasetRow row = make_row(rec, ens, derive_seed(seed, streams::kShots, i * freqs.size() + j));
        row.control = i;
        row.label = c.label;
        row.shift = c.shift;
        row.probe = w;
        d.rows.push_back(std::move(row));
      }
    }
    return d;
  }

  // Every control sees the same realizations (seeds depend on the
  // realization index only), each sampled on a grid covering its duration.
  std::vector<NoisePair> phase_only;
  if (!ens.exact) phase_only = generate_ensemble(spec, covering_grid(tau_max, step), ens.realizations, seed, false);
  std::map<double, std::vector<NoisePair>> sampled;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    const auto& c = controls[i];
    SimulationRecord rec;
    if (ens.exact) {
      auto it = sampled.find(c.duration());
      if (it == sampled.end()) {
        it = sampled.emplace(c.duration(),
                             generate_ensemble(spec, covering_grid(c.duration(), step), ens.realizations, seed))
                 .first;
      }
      rec = simulate(*c.waveform, it->second, true, popt);
    } else {
      rec = simulate_spectral(*c.waveform, phase_only);
    }
    DatasetRow row = make_row(rec, ens, derive_seed(seed, streams::kShots, i));
    row.control = i;
    row.label = c.label;
    row.shift = c.shift;
    d.rows.push_back(std::move(row));
  }
  return d;
}

namespace {

const std::vector<std::string> kDatasetHeader{
    "control", "label", "shift_hz", "probe_hz", "P_x",    "P_y",    "P_z",    "P_x_se",      "P_y_se",
    "P_z_se",  "S_x",   "S_y",      "S_z",      "S_x_se", "S_y_se", "S_z_se", "realizations"};

}  // namespace

io::Table dataset_table(const Dataset& d) {
  io::Table t;
  t.header = kDatasetHeader;
  for (const auto& r : d.rows) {
    std::vector<std::string> row{std::to_string(r.control), r.label, format_double(rad_to_hz(r.shift)),
                                 format_double(rad_to_hz(r.probe))};
    for (double x : r.probability) row.push_back(format_double(x));
    for (double x : r.probability_error) row.push_back(format_double(x));
    for (double x : r.projections.value) row.push_back(format_double(x));
    for (double x : r.projections.std_error) row.push_back(format_double(x));
    row.push_back(std::to_string(r.realizations));
    t.add_row(std::move(row));
  }
  return t;
}

Dataset dataset_from_table(const io::Table& t, Json config, std::uint64_t seed) {
  Dataset d;
  d.config = std::move(config);
  d.seed = seed;
  std::vector<std::size_t> col;
  for (const auto& h : kDatasetHeader) col.push_back(t.column(h));
  auto count = [](const std::string& s) {
    try {
      return static_cast<std::size_t>(std::stoull(s));
    } catch (const std::exception&) {
      invalid("dataset", "not a count: '" + s + "'");
    }
  };
  for (const auto& cells : t.rows) {
    DatasetRow r;
    r.control = count(cells[col[0]]);
    r.label = cells[col[1]];
    r.shift = hz_to_rad(io::parse_double(cells[col[2]]));
    r.probe = hz_to_rad(io::parse_double(cells[col[3]]));
    for (std::size_t i = 0; i < 3; ++i) {
      r.probability[i] = io::parse_double(cells[col[4 + i]]);
      r.probability_error[i] = io::parse_double(cells[col[7 + i]]);
      r.projections.value[i] = io::parse_double(cells[col[10 + i]]);
      r.projections.std_error[i] = io::parse_double(cells[col[13 + i]]);
    }
    r.realizations = count(cells[col[16]]);
    d.rows.push_back(std::move(r));
  }
  return d;
}

// --------------------------------------------------------- reconstruct

namespace {

// Variances of zero (a single realization, no shots) would give infinite
// weight; they are floored relative to the measured value.
double variance_of(double value, double std_error) {
  const double floor = 1e-6 * std::abs(value) + 1e-300;
  return std::max(std_error, floor) * std::max(std_error, floor);
}

}  // namespace

ReconstructionRun run_reconstruct(const Json& config, const Dataset& dataset) {
  const Node root(config, "");
  const Node rc = root.at("reconstruction");
  const std::string method = rc.at("method").text();
  const Node dcfg(dataset.config, "dataset.config");
  DpssCache cache;
  const auto controls = build_controls(dcfg.at("waveforms"), cache);
  for (const auto& r : dataset.rows) {
    if (r.control >= controls.size() || controls[r.control].label != r.label) {
      invalid("dataset", "rows do not match the dataset configuration");
    }
    if (r.probe != 0.0) invalid("dataset", "probe-sweep datasets carry no spectrum to reconstruct");
  }
  if (dataset.rows.empty()) invalid("dataset", "no rows");
  const auto omega = rc.has("grid") ? parse_grid(rc.at("grid")) : default_control_grid(controls, 8192);

  std::optional<Spectrum> truth_z, truth_o;
  if (auto noise = dcfg.find("noise")) {
    truth_z = optional_spectrum(*noise, "dephasing");
    truth_o = optional_spectrum(*noise, "amplitude");
  }

  std::vector<ControlFilters> filters(dataset.rows.size());
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    const auto& c = controls[dataset.rows[i].control];
    if (!c.has_band) invalid("dataset", "control '" + c.label + "' has no passband to reconstruct in");
    filters[i] = control_filters(c, omega);
  }

  ReconstructionRun run;
  run.method = method;
  run.info["method"] = method;

  auto eigen = [&](const std::vector<std::size_t>& rows, bool amplitude) {
    std::vector<PointEstimate> pts;
    std::vector<Band> bands;
    for (std::size_t i : rows) {
      const auto& r = dataset.rows[i];
      const auto& c = controls[r.control];
      pts.push_back(amplitude ? amplitude_estimate(r.projections.value[0], r.projections.std_error[0],
                                                   filters[i].amplitude, c.band, c.shift)
                              : single_taper(r.projections.value[1], r.projections.std_error[1], filters[i].dephasing,
                                             c.band, c.shift));
      bands.push_back(c.band);
    }
    return std::make_pair(pts, bands);
  };
  std::vector<std::size_t> all(dataset.rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  if (method == "eigenestimate") {
    const std::string axis = rc.text_or("axis", "dephasing");
    if (axis != "dephasing" && axis != "amplitude") invalid(rc.path() + ".axis", "expected dephasing or amplitude");
    const bool amp = axis == "amplitude";
    auto [pts, bands] = eigen(all, amp);
    run.series.push_back(point_series(axis, std::move(pts), std::move(bands), amp ? truth_o : truth_z));
  } else if (method == "multi_axis") {
    auto [pz, bz] = eigen(all, false);
    auto [po, bo] = eigen(all, true);
    run.series.push_back(point_series("dephasing", std::move(pz), bz, truth_z));
    run.series.push_back(point_series("amplitude", std::move(po), bo, truth_o));
  } else if (method == "bayesian") {
    const std::string coarse_label = rc.text_or("coarse_label", "coarse");
    const std::string fine_label = rc.text_or("fine_label", "fine");
    std::vector<std::size_t> coarse, fine;
    for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
      if (dataset.rows[i].label == coarse_label) coarse.push_back(i);
      if (dataset.rows[i].label == fine_label) fine.push_back(i);
    }
    if (coarse.empty()) invalid(rc.path() + ".coarse_label", "no dataset rows carry label '" + coarse_label + "'");
    if (fine.empty()) invalid(rc.path() + ".fine_label", "no dataset rows carry label '" + fine_label + "'");
    auto bounds = rc.at("segments_hz").numbers();
    for (double& b : bounds) b = hz_to_rad(b);
    const SegmentGrid segments = guarded(rc.path() + ".segments_hz", [&] { return SegmentGrid(bounds); });
    const std::size_t l = segments.size();

    auto [cp, cb] = eigen(coarse, false);
    auto [fp, fb] = eigen(fine, false);

    auto system = [&](const std::vector<std::size_t>& rows, Eigen::MatrixXd& f, Eigen::VectorXd& y,
                      Eigen::VectorXd& var) {
      std::vector<FilterFunction> ffs;
      y.resize(static_cast<Eigen::Index>(rows.size()));
      var.resize(y.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = dataset.rows[rows[k]];
        ffs.push_back(filters[rows[k]].dephasing);
        y(static_cast<Eigen::Index>(k)) = r.projections.value[1];
        var(static_cast<Eigen::Index>(k)) = variance_of(r.projections.value[1], r.projections.std_error[1]);
      }
      f = guarded(rc.path(), [&] { return filter_matrix(ffs, segments); });
    };

    BayesianModel model;
    system(coarse, model.coarse, model.coarse_y, model.coarse_var);
    model.lambda = rc.number_or("lambda", 0.35);
    if (model.lambda < 0.0) invalid(rc.path() + ".lambda", "must be nonnegative");
    model.selector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l));
    if (auto reg = rc.find("regularized_segments")) {
      for (std::size_t k = 0; k < reg->size(); ++k) {
        const std::size_t idx = reg->item(k).count();
        if (idx >= l) invalid(reg->item(k).path(), "segment index out of range");
        model.selector(static_cast<Eigen::Index>(idx)) = 1.0;
      }
    }
    double reference = 0.0;
    if (rc.has("reference") && rc.at("reference").json().is_number()) {
      reference = rc.at("reference").number();
    } else {
      const std::string ref = rc.text_or("reference", "coarse_mean");
      if (ref != "coarse_mean") invalid(rc.path() + ".reference", "expected a number or 'coarse_mean'");
      for (const auto& p : cp) reference += p.value / static_cast<double>(cp.size());
    }
    model.reference = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(l), reference);

    const Prior prior = build_prior(model, false);
    Eigen::MatrixXd ff;
    Eigen::VectorXd fy, fv;
    system(fine, ff, fy, fv);
    const Posterior post = posterior_update(prior, ff, fy, fv);

    run.series.push_back(point_series("coarse", std::move(cp), cb, truth_z));
    run.series.push_back(point_series("fine", std::move(fp), fb, truth_z));
    auto segment_series = [&](std::string name, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
      Series s;
      s.name = std::move(name);
      for (std::size_t k = 0; k < l; ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        const Band b = segments.segment(k);
        s.points.push_back({b.center(), mean(e), std::sqrt(std::max(0.0, cov(e, e)))});
        s.bands.push_back(b);
        if (truth_z) s.truth.push_back(truth_over(truth_z, b));
      }
      return s;
    };
    if (prior.invertible) run.series.push_back(segment_series("prior", prior.mean, prior.covariance));
    run.series.push_back(segment_series("posterior", post.mean, post.covariance));
    run.info["prior_invertible"] = prior.invertible;
    run.info["prior_condition"] = prior.condition;
    run.info["posterior_condition"] = post.condition;
    run.info["reference"] = reference;
  } else {
    invalid(rc.path() + ".method", "unknown method '" + method + "' (eigenestimate, multi_axis, bayesian)");
  }
  const bool floor = rc.has("display_floor") && rc.at("display_floor").boolean();
  run.tables["reconstruction"] = series_table(run.series, floor);
  return run;
}

// ------------------------------------------------------------- compare

namespace {

double relative_error(double estimate, double truth) { return (estimate - truth) / truth; }

// n-pulse CPMG as n copies of its one-pulse block.
FundamentalFfs cpmg_ffs(std::size_t n, double tau, double width, double buffer, const std::vector<double>& omega) {
  return repeated_ffs(render(cpmg(1, tau / static_cast<double>(n), width, buffer)), n, omega);
}

}  // namespace

CompareRun run_compare(const Json& config) {
  const Node root(config, "");
  const Node c = root.at("compare");
  const double tau = c.at("tau_s").positive();
  const double width = c.at("pulse_width_s").nonnegative();
  const double buffer = c.has("buffer_s") ? c.at("buffer_s").nonnegative() : 0.0;
  const Spectrum truth = parse_spectrum(c.at("spectrum"));
  if (truth.is_delta()) invalid(c.path() + ".spectrum", "comparisons need a continuous spectrum");
  const auto omega = parse_grid(c.at("grid"));
  const auto s_grid = truth.evaluate(omega);

  CompareRun run;

  // DPSS: cosine-shifted finite-difference waveforms, one eigenestimate each.
  const Node dn = c.at("dpss");
  const std::size_t length = dn.at("N").count();
  if (length < 2) invalid(dn.path() + ".N", "need N >= 2");
  const double w = parse_half_bandwidth(dn, length);
  const std::size_t order = dn.count_or("order", 0);
  const double dt = tau / static_cast<double>(length);
  const auto shifts = parse_shifts(dn);
  const Scaling scaling = parse_scaling(dn.at("normalization"));
  const DpssSet set = guarded(dn.path(), [&] { return compute_dpss({length, w, order}); });
  Series dpss{"dpss", {}, {}, {}};
  for (double ws : shifts) {
    const Waveform fd =
        guarded(dn.path(), [&] { return finite_difference(cosine_shift(set, order, ws, dt, scaling)); });
    const auto fz = dephasing_ff(fundamental_ffs(fd, omega));
    const Band band = shifted_passband(ws, w, dt);
    const double measured = overlap_integral(fz, s_grid);
    dpss.points.push_back(single_taper(measured, 0.0, fz, band, ws));
    dpss.bands.push_back(band);
  }

  // n-pulse CPMG.
  const Node cn = c.at("cpmg");
  const std::size_t n_limit = cpmg_max_pulses(tau, width, buffer);
  const std::size_t first = cn.count_or("first", 1);
  const std::size_t last = cn.count_or("last", n_limit);
  if (first == 0 || last < first) invalid(cn.path(), "need 1 <= first <= last");
  if (last > n_limit) invalid(cn.path() + ".last", "exceeds the largest pulse count that fits (" + std::to_string(n_limit) + ")");
  Series cp{"cpmg", {}, {}, {}};
  for (std::size_t n = first; n <= last; ++n) {
    const PulseSequence seq = cpmg(n, tau, width, buffer);
    const FilterFunction zz = width > 0.0 ? zz_power_ff(cpmg_ffs(n, tau, width, buffer, omega)) : switching_ff(seq, omega);
    const double measured = overlap_integral(zz, s_grid);
    cp.points.push_back(cpmg_npulse_estimate(n, tau, measured, 0.0, zz));
    cp.bands.push_back(cpmg_passband(zz, kPi * static_cast<double>(n) / tau));
  }

  // A-S: two-pulse CPMG bases of duration T/m repeated f m times.
  const Node an = c.at("as");
  const double tb = an.at("base_duration_s").positive();
  const std::size_t reps = an.count_or("repetition_factor", 4);
  const double spacing = width + buffer;
  const std::size_t m_fit = spacing > 0.0 ? static_cast<std::size_t>(std::floor(tb / (2.0 * spacing) + 1e-9)) : 0;
  const std::size_t m_max = an.count_or("m_max", m_fit);
  if (m_max == 0) invalid(an.path() + ".m_max", "must be positive");
  if (spacing > 0.0 && m_max > m_fit) invalid(an.path() + ".m_max", "base sequences for m > " + std::to_string(m_fit) + " do not fit");
  if (reps == 0) invalid(an.path() + ".repetition_factor", "must be positive");
  const double w0 = kTwoPi / tb;
  std::vector<AsRow> rows;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double t = tb / static_cast<double>(m);
    AsRow row;
    row.m = m;
    row.base_duration = t;
    row.repetitions = reps * m;
    const PulseSequence base = cpmg(2, t, width, buffer);
    const PulseSequence full = cpmg(2 * row.repetitions, t * static_cast<double>(row.repetitions), width, buffer);
    const FilterFunction zz = width > 0.0 ? zz_power_ff(cpmg_ffs(2 * row.repetitions, full.duration, width, buffer, omega))
                                          : switching_ff(full, omega);
    row.measurement = overlap_integral(zz, s_grid);
    if (width > 0.0) {
      row.harmonic_power = as_harmonic_powers(render(base), w0, m_max);
    } else {
      std::vector<double> h(m_max);
      for (std::size_t k = 0; k < m_max; ++k) h[k] = std::norm(switching_transform(base, std::vector<double>{w0 * (k + 1)})[0]);
      row.harmonic_power = std::move(h);
    }
    rows.push_back(std::move(row));
  }
  const AsResult as = as_inversion(rows, w0, m_max);
  Series asr{"as", as.points, {}, {}};
  for (const auto& p : asr.points) asr.bands.push_back({p.omega - 0.5 * w0, p.omega + 0.5 * w0});

  for (Series* s : {&dpss, &cp, &asr}) {
    for (const auto& p : s->points) s->truth.push_back(truth(p.omega));
  }

  // Shared scan range of the DPSS and n-pulse estimates.
  auto span = [](const Series& s) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& p : s.points) {
      lo = std::min(lo, p.omega);
      hi = std::max(hi, p.omega);
    }
    return Band{lo, hi};
  };
  const Band sd = span(dpss), sc = span(cp);
  run.shared = Band{std::max(sd.lo, sc.lo), std::min(sd.hi, sc.hi)};
  run.as_max = w0 * static_cast<double>(m_max);
  const double low_edge = run.shared.lo + 0.25 * run.shared.width();

  io::Table points;
  points.header = {"method", "f_hz", "estimate", "truth", "rel_error", "in_shared_range"};
  io::Table metrics;
  metrics.header = {"method", "points", "mean_abs_rel_error", "low_frequency_bias", "mean_signed_rel_error"};
  for (const Series* s : {&dpss, &cp, &asr}) {
    MethodMetrics m;
    m.method = s->name;
    double sum_abs = 0.0, sum_signed = 0.0, sum_low = 0.0;
    std::size_t low = 0;
    for (std::size_t i = 0; i < s->points.size(); ++i) {
      const auto& p = s->points[i];
      const double t = s->truth[i];
      const bool inside = p.omega >= run.shared.lo && p.omega <= run.shared.hi && t > 0.0;
      const double e = t > 0.0 ? relative_error(p.value, t) : kNan;
      points.add_row({s->name, format_double(rad_to_hz(p.omega)), format_double(p.value), format_double(t),
                      format_double(e), inside ? "1" : "0"});
      if (!inside) continue;
      ++m.points;
      sum_abs += std::abs(e);
      sum_signed += e;
      if (p.omega <= low_edge) {
        sum_low += e;
        ++low;
      }
    }
    if (m.points) {
      m.mean_abs_rel_error = sum_abs / static_cast<double>(m.points);
      m.mean_signed_rel_error = sum_signed / static_cast<double>(m.points);
    }
    m.low_frequency_bias = low ? sum_low / static_cast<double>(low) : kNan;
    metrics.add_row({m.method, std::to_string(m.points), format_double(m.mean_abs_rel_error),
                     format_double(m.low_frequency_bias), format_double(m.mean_signed_rel_error)});
    run.metrics.push_back(m);
  }

  // Fraction of the spectral weight the A-S inversion cannot see.
  double total = 0.0, above = 0.0;
  for (std::size_t q = 1; q < omega.size(); ++q) {
    const double area = 0.5 * (s_grid[q] + s_grid[q - 1]) * (omega[q] - omega[q - 1]);
    total += area;
    if (omega[q - 1] >= run.as_max) above += area;
  }
  run.weight_above_as_max = total > 0.0 ? above / total : 0.0;

  // Scan-range markers: pulse-limited (spacing tau_pi) for each idle ratio,
  // as drawn for the comparison, plus the buffered limit actually used.
  io::Table scan;
  scan.header = {"idle_ratio", "pulsed_max_hz", "pulsed_max_buffered_hz", "dpss_max_hz"};
  std::vector<double> idle{0.0};
  if (auto list = c.find("idle_ratios")) idle = list->numbers();
  for (double r : idle) {
    if (r < 0.0 || r > 1.0) invalid(c.path() + ".idle_ratios", "ratios must lie in [0, 1]");
    const auto bare = scan_range({width, 0.0, r, dt, 0.0, tau, tb, 0.0});
    const auto buffered = scan_range({width, buffer, r, dt, 0.0, tau, tb, 0.0});
    scan.add_row({format_double(r), format_double(rad_to_hz(bare.cpmg_max)), format_double(rad_to_hz(buffered.cpmg_max)),
                  format_double(rad_to_hz(bare.dpss_max))});
  }

  io::Table summary;
  summary.header = {"key", "value"};
  summary.add_row({"shared_lo_hz", format_double(rad_to_hz(run.shared.lo))});
  summary.add_row({"shared_hi_hz", format_double(rad_to_hz(run.shared.hi))});
  summary.add_row({"cpmg_n_max", std::to_string(n_limit)});
  summary.add_row({"as_m_max", std::to_string(m_max)});
  summary.add_row({"as_max_hz", format_double(rad_to_hz(run.as_max))});
  summary.add_row({"as_condition", format_double(as.condition)});
  summary.add_row({"weight_above_as_max", format_double(run.weight_above_as_max)});

  run.series = {std::move(dpss), std::move(cp), std::move(asr)};
  run.tables["compare_points"] = std::move(points);
  run.tables["compare_metrics"] = std::move(metrics);
  run.tables["scan_ranges"] = std::move(scan);
  run.tables["compare_summary"] = std::move(summary);
  return run;
}

}  // namespace qns::app
