// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [criterion numbers...]  (default: all)

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qns/app/commands.hpp"
#include "qns/app/presets.hpp"
#include "qns/error.hpp"
#include "qns/filters.hpp"
#include "qns/reconstruction.hpp"
#include "qns/rng.hpp"
#include "qns/simulator.hpp"

using namespace qns;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> info;  // extra lines printed after the verdict
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome criterion1() {
  const std::size_t n = 128;
  const double w = 4.0 / n;
  const auto set = compute_dpss({n, w, 5});
  double worst = 0.0;
  for (std::size_t k = 0; k <= 5; ++k) {
    const auto& v = set.sequences[k];
    auto f = [&](double om) { return oracle::dpswf_power(v, 1.0, om); };
    const double in = oracle::simpson(f, 0.0, kTwoPi * w, 4000);
    const double all = oracle::simpson(f, 0.0, kPi, 40000);
    worst = std::max(worst, std::abs(in / all - set.eigenvalues[k]));
  }
  const double l0 = set.eigenvalues[0];
  return {worst <= 1e-6 && l0 >= 0.99999,
          "max |in-band fraction - lambda_k| = " + fmt("%.2e", worst) + " (<= 1e-6), lambda_0 = " + fmt("%.10f", l0)};
}

// ---------------------------------------------------------------- 2

Outcome criterion2() {
  const std::size_t n = 600;
  const auto set = compute_dpss({n, 2.0 / n, 0});
  const double dt = 5e-6;
  const double ws = hz_to_rad(10e3);
  const Waveform base = cosine_shift(set, 0, ws, dt, {Normalization::MaxTheta, 0.05});
  const Waveform fd = finite_difference(base);
  const Band band = shifted_passband(ws, set.params.half_bandwidth, dt);
  const auto grid = uniform_grid(band.lo, band.hi, 801);
  const auto f = fundamental_ffs(fd, grid);
  const auto fz = dephasing_ff(f);
  const auto fo = amplitude_ff(f);

  // 16 sin^4(w dt / 2) / w^4 |V~(w)|^2 with V~ the transform of the base samples.
  std::vector<double> closed(grid.size()), sidebands(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double om = grid[i];
    std::complex<double> vt{};
    for (std::size_t m = 0; m < n; ++m) vt += base.values[m] * std::polar(1.0, om * dt * static_cast<double>(m));
    const double s4 = std::pow(std::sin(0.5 * om * dt), 4) / std::pow(om, 4);
    closed[i] = 16.0 * s4 * std::norm(vt);
    const double up = dpswf_value(set.sequences[0], 0, dt, om - ws);
    const double um = dpswf_value(set.sequences[0], 0, dt, om + ws);
    sidebands[i] = 8.0 * base.recipe.scale * base.recipe.scale * s4 * (up * up + um * um);
  }
  const double err = oracle::rel_l2(fz.values, closed);
  double worst_ratio = 0.0;
  const double peak = *std::max_element(fz.values.begin(), fz.values.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (fz.values[i] < 1e-3 * peak) continue;
    const double r = fo.values[i] / fz.values[i] / (grid[i] * grid[i] / 4.0);
    worst_ratio = std::max(worst_ratio, std::abs(r - 1.0));
  }
  Outcome o{err <= 0.05 && worst_ratio <= 0.05,
            "rel-L2(numeric F_z, 16 sin^4/w^4 |V~|^2) over B_s = " + fmt("%.2e", err) +
                " (<= 5%), max |F_Omega/F_z / (w^2/4) - 1| = " + fmt("%.2e", worst_ratio) + " (<= 5%)"};
  o.info.push_back("info: sideband form with the printed prefactor 8 Omega_s^2: rel-L2 = " +
                   fmt("%.3f", oracle::rel_l2(fz.values, sidebands)) +
                   " (the cosine expansion gives 4 Omega_s^2; see README)");
  return o;
}

// ---------------------------------------------------------------- 3

Outcome criterion3() {
  const std::size_t n = 100;
  const auto set = compute_dpss({n, 2.0 / n, 0});
  const double dt = 10e-6;
  const double ws = hz_to_rad(12e3);
  const Waveform fd = finite_difference(cosine_shift(set, 0, ws, dt, {Normalization::MaxTheta, 0.05}));
  const double cutoff = hz_to_rad(50e3);
  const TimeGrid grid = covering_grid(fd.duration(), dt / 8);
  const auto omega = uniform_grid(0.0, cutoff, 20001);
  const auto f = fundamental_ffs(fd, omega);
  const auto fz = dephasing_ff(f);
  const auto fo = amplitude_ff(f);

  struct Case {
    const char* name;
    Spectrum z, o;
  };
  const Case cases[] = {
      {"white", white(0.2, cutoff), white(1e-4, cutoff)},
      {"gaussian", gaussian_bump(ws, hz_to_rad(3e3), 0.5, cutoff), gaussian_bump(ws, hz_to_rad(3e3), 2e-4, cutoff)}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    NoiseSpec spec{c.z, c.o, 0.0};
    const auto rec = simulate(fd, generate_ensemble(spec, grid, 500, 303), false);
    const auto m = moments(rec);
    const double py = overlap_integral(fz, c.z.evaluate(omega));
    const double px = overlap_integral(fo, c.o.evaluate(omega));
    const double zy = (m.second[1].mean - py) / m.second[1].std_error;
    const double zx = (m.second[0].mean - px) / m.second[0].std_error;
    pass = pass && std::abs(zy) < 3.0 && std::abs(zx) < 3.0;
    detail += std::string(c.name) + ": a_y^2 " + fmt("%+.2f", zy) + " SE, a_x^2 " + fmt("%+.2f", zx) + " SE; ";
  }
  return {pass, detail + "500 realizations, bound 3 SE"};
}

// ---------------------------------------------------------------- 4

Outcome criterion4() {
  // Weak noise: exact propagator against first-order probabilities.
  const std::size_t n = 80;
  const auto set = compute_dpss({n, 2.0 / n, 0});
  const double dt = 10e-6;
  const Waveform fd = finite_difference(cosine_shift(set, 0, hz_to_rad(8e3), dt, {Normalization::MaxTheta, 0.05}));
  NoiseSpec weak;
  weak.dephasing = white(0.5, hz_to_rad(40e3));
  weak.amplitude = white(1e-7, hz_to_rad(40e3));
  const auto rec = simulate(fd, generate_ensemble(weak, covering_grid(fd.duration(), dt / 8), 100, 5));
  double amax = 0.0, worst = 0.0;
  for (const auto& o : rec.outcomes) {
    const auto& a = o.first_order;
    for (double x : a) amax = std::max(amax, std::abs(x));
    const std::array<double, 3> p1{1 - a[1] * a[1] - a[2] * a[2], 1 - a[0] * a[0] - a[2] * a[2],
                                   1 - a[0] * a[0] - a[1] * a[1]};
    for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(o.exact[i] - p1[i]));
  }
  const bool part1 = amax <= 0.05 && worst <= 5e-3;

  // Stronger noise, same realizations for both controls: embedded DD against
  // plain finite difference. The dephasing sits mostly at 250 Hz, inside the
  // band the two-pulse switching pattern suppresses, plus a band at the probe
  // shift so that <a_y^2> is well defined for both waveforms. Quasi-static
  // noise is avoided on purpose: the two pi ramps sample it directly into a_y.
  const std::size_t nd = 200;
  const auto sd = compute_dpss({nd, 2.0 / nd, 0});
  const double ws = hz_to_rad(10e3);
  const Scaling sc{Normalization::MaxTheta, 0.05};
  const Waveform plain = finite_difference(cosine_shift(sd, 0, ws, dt, sc));
  const Waveform dd = finite_difference_embedded_dd(sd, 0, ws, dt, sc);
  NoiseSpec strong;
  strong.dephasing = one_over_f_with_spurs(
      0.0, 1.0, 1.0, {{hz_to_rad(250.0), hz_to_rad(50.0), 400.0}, {ws, hz_to_rad(2e3), 100.0}}, hz_to_rad(40e3));
  const auto ens = generate_ensemble(strong, covering_grid(plain.duration(), dt / 8), 2000, 17);
  const auto rp = simulate(plain, ens);
  const auto rd = simulate(dd, ens);
  const auto cmp = compare_bias(rd, rp, 2000, derive_seed(17, streams::kBootstrap, 0));
  double azp = 0.0;
  for (const auto& o : rp.outcomes) azp += o.first_order[2] * o.first_order[2] / static_cast<double>(rp.outcomes.size());
  const bool part2 = cmp.a_smaller;
  return {part1 && part2, "weak noise: max|a| = " + fmt("%.3f", amax) + ", max |P_exact - P_first| = " +
                              fmt("%.2e", worst) + " (<= 5e-3); strong noise (<a_z^2> FD = " + fmt("%.3f", azp) +
                              "): bias embedded-DD " + fmt("%+.4f", cmp.bias_a) + " vs FD " + fmt("%+.4f", cmp.bias_b) +
                              ", 95% upper bound on |b_DD|-|b_FD| = " + fmt("%+.4f", cmp.upper_quantile)};
}

// ---------------------------------------------------------------- 5, 6

const app::Series& series(const app::ReconstructionRun& r, const std::string& name) {
  for (const auto& s : r.series)
    if (s.name == name) return s;
  throw std::runtime_error("missing series " + name);
}

Outcome criterion5() {
  const app::Json cfg = app::preset("fig2");
  const auto data = app::run_simulate(cfg, 1);
  const auto run = app::run_reconstruct(cfg, data);
  const auto& post = series(run, "posterior");
  const double peak = *std::max_element(post.truth.begin(), post.truth.end());
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < post.points.size(); ++i) {
    if (post.truth[i] <= 0.1 * peak) continue;
    ++checked;
    worst = std::max(worst, std::abs(post.points[i].value - post.truth[i]) / post.truth[i]);
  }
  // Spurs: the posterior is a local maximum at the segment holding each spur centre.
  auto local_max_at = [&](double f_hz) {
    const double w = hz_to_rad(f_hz);
    for (std::size_t i = 1; i + 1 < post.points.size(); ++i) {
      if (post.bands[i].contains(w)) {
        return post.points[i].value > post.points[i - 1].value && post.points[i].value > post.points[i + 1].value;
      }
    }
    return false;
  };
  const bool spurs = local_max_at(8900) && local_max_at(10500);
  return {worst <= 0.25 && spurs, "max relative error " + fmt("%.3f", worst) + " over " + std::to_string(checked) +
                                      " segments with truth > 10% of peak (<= 0.25); spurs at 8.9 and 10.5 kHz " +
                                      (spurs ? "resolved" : "NOT resolved") + " as local maxima"};
}

Outcome criterion6() {
  const app::Json cfg = app::preset("fig3");
  const auto data = app::run_simulate(cfg, 1);
  const auto run = app::run_reconstruct(cfg, data);
  bool pass = true;
  std::string detail;
  std::set<double> above_z, above_o;
  for (const char* name : {"dephasing", "amplitude"}) {
    const auto& s = series(run, name);
    const double peak = *std::max_element(s.truth.begin(), s.truth.end());
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (s.truth[i] <= 0.2 * peak) continue;
      ++checked;
      (std::string(name) == "dephasing" ? above_z : above_o).insert(s.points[i].omega);
      worst = std::max(worst, std::abs(s.points[i].value - s.truth[i]) / s.truth[i]);
    }
    pass = pass && worst <= 0.25;
    detail += std::string(name) + ": max rel error " + fmt("%.3f", worst) + " at " + std::to_string(checked) + " centres; ";
  }
  std::size_t overlap = 0;
  for (double w : above_z) overlap += above_o.count(w);
  pass = pass && overlap > 0;
  return {pass, detail + std::to_string(overlap) + " centres in the overlap band (bound 0.25)"};
}

// ---------------------------------------------------------------- 7

Outcome criterion7() {
  const app::Json base = app::preset("fig4e");
  const auto run = app::run_compare(base);
  const auto& dpss = run.metrics[0];
  const auto& cpmg = run.metrics[1];
  const bool part1 = dpss.mean_abs_rel_error < cpmg.mean_abs_rel_error;
  const bool part2 = cpmg.low_frequency_bias > 0.0;

  // A-S: the same spectrum truncated below m_max w0, and with added weight above it.
  app::Json below = base;
  below["compare"]["spectrum"]["cutoff_hz"] = 13000;
  app::Json above = base;
  above["compare"]["spectrum"]["cutoff_hz"] = 30000;
  above["compare"]["spectrum"]["spurs"].push_back({{"center_hz", 20000}, {"width_hz", 1500}, {"height", 2}});
  const auto rb = app::run_compare(below);
  const auto ra = app::run_compare(above);
  const auto& asb = rb.series[2];
  const auto& asa = ra.series[2];
  // Harmonics below the cutoff carry the same truth in both cases, so the
  // shift of each estimate is the bias caused by the weight above m_max w0.
  // Individual shifts are not sign-definite: the least-squares solve can move
  // the lowest harmonics slightly down while the upper ones absorb the excess.
  double min_shift = INFINITY, mean_shift = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < asb.points.size(); ++i) {
    if (!(asb.truth[i] > 0.0)) continue;
    const double shift = (asa.points[i].value - asb.points[i].value) / asb.truth[i];
    min_shift = std::min(min_shift, shift);
    mean_shift += shift;
    ++count;
  }
  mean_shift /= static_cast<double>(count);
  const bool part3 = rb.weight_above_as_max == 0.0 && ra.weight_above_as_max > 0.0 && mean_shift > 0.05;
  Outcome o{part1 && part2 && part3,
            "MARE dpss " + fmt("%.4f", dpss.mean_abs_rel_error) + " < cpmg " + fmt("%.4f", cpmg.mean_abs_rel_error) +
                "; cpmg low-frequency bias " + fmt("%+.3f", cpmg.low_frequency_bias) + " (> 0); A-S shift from weight " +
                "above m_max w0 (fraction " + fmt("%.2f", ra.weight_above_as_max) + "): mean " + fmt("%+.3f", mean_shift) +
                " (> 0.05), none without it"};
  o.info.push_back("info: A-S mean signed error " + fmt("%+.3f", rb.metrics[2].mean_signed_rel_error) +
                   " without and " + fmt("%+.3f", ra.metrics[2].mean_signed_rel_error) + " with weight above m_max w0");
  o.info.push_back("info: smallest per-harmonic A-S shift " + fmt("%+.4f", min_shift));
  return o;
}

// ---------------------------------------------------------------- 8

// Independent objective: (1/2) r^T Sigma^-1 r + || lambda D (S - S_bar) ||^2.
double objective(const BayesianModel& m, const Eigen::VectorXd& s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.coarse.rows(); ++i) {
    double r = m.coarse_y(i);
    for (Eigen::Index j = 0; j < m.coarse.cols(); ++j) r -= m.coarse(i, j) * s(j);
    acc += 0.5 * r * r / m.coarse_var(i);
  }
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double d = m.lambda * m.selector(j) * (s(j) - m.reference(j));
    acc += d * d;
  }
  return acc;
}

Outcome criterion8() {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t done = 0;
  while (done < 20) {
    const Eigen::Index mc = 9, l = 6, mf = 5;
    BayesianModel m;
    m.coarse = Eigen::MatrixXd(mc, l);
    m.coarse_y = Eigen::VectorXd(mc);
    m.coarse_var = Eigen::VectorXd(mc);
    for (Eigen::Index i = 0; i < mc; ++i) {
      for (Eigen::Index j = 0; j < l; ++j) m.coarse(i, j) = u(g);
      m.coarse_y(i) = 2.0 * u(g);
      m.coarse_var(i) = 0.05 + u(g);
    }
    m.lambda = 0.35;
    m.selector = Eigen::VectorXd(l);
    m.reference = Eigen::VectorXd(l);
    for (Eigen::Index j = 0; j < l; ++j) {
      m.selector(j) = u(g) < 0.5 ? 1.0 : 0.0;
      m.reference(j) = u(g);
    }
    const Prior p = build_prior(m);
    if (!p.invertible || p.condition > 1e6) continue;  // well-conditioned instances only
    ++done;
    const Eigen::VectorXd x = oracle::minimize([&](const Eigen::VectorXd& s) { return objective(m, s); },
                                               Eigen::VectorXd::Zero(l));
    worst = std::max(worst, (p.mean - x).norm() / x.norm());

    Eigen::MatrixXd fine(mf, l);
    Eigen::VectorXd fy(mf), fv(mf);
    for (Eigen::Index i = 0; i < mf; ++i) {
      for (Eigen::Index j = 0; j < l; ++j) fine(i, j) = u(g);
      fy(i) = u(g);
      fv(i) = 0.1 + u(g);
    }
    const Posterior post = posterior_update(p, fine, fy, fv);
    // Prior term from the prior's own covariance (inverted here), plus the fine misfit.
    const Eigen::MatrixXd p_inv = p.covariance.inverse();
    auto pobj = [&](const Eigen::VectorXd& s) {
      const Eigen::VectorXd d = s - p.mean;
      double acc = 0.5 * d.dot(p_inv * d);
      for (Eigen::Index i = 0; i < mf; ++i) {
        const double r = fy(i) - fine.row(i).dot(s);
        acc += 0.5 * r * r / fv(i);
      }
      return acc;
    };
    const Eigen::VectorXd y = oracle::minimize(pobj, Eigen::VectorXd::Zero(l));
    worst = std::max(worst, (post.mean - y).norm() / y.norm());
  }
  return {worst <= 1e-6, "20 instances, max relative deviation from brute-force minimization " + fmt("%.2e", worst) +
                             " (<= 1e-6)"};
}

// ---------------------------------------------------------------- 9

Outcome criterion9() {
  const std::size_t n = 400;
  const auto set = compute_dpss({n, 2.0 / n, 0});
  const double dt = 5e-6;
  const double ws = 0.06 / dt;
  double vmax = 0.0;
  for (double x : set.sequences[0]) vmax = std::max(vmax, std::abs(x));
  const Band band = shifted_passband(ws, set.params.half_bandwidth, dt);
  const auto grid = uniform_grid(band.lo, band.hi, 301);
  const double c = 0.5 * dt / vmax;
  const auto seq = pulsed_dpss(set, 0, ws, c, dt, n);
  const auto num = switching_ff(seq, grid);
  // |sum_m e^{i w m dt} c cos(m ws dt) v_m|^2: each cosine sideband carries
  // c/2, so the separated-sideband form is (c^2/4)[U^2(w-ws) + U^2(w+ws)].
  std::vector<double> direct(grid.size()), literal(grid.size()), quarter(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::complex<double> acc{};
    for (std::size_t m = 0; m < n; ++m) {
      const double t = static_cast<double>(m) * dt;
      acc += c * std::cos(ws * t) * set.sequences[0][m] * std::polar(1.0, grid[i] * t);
    }
    direct[i] = std::norm(acc);
    const double up = dpswf_value(set.sequences[0], 0, dt, grid[i] - ws);
    const double um = dpswf_value(set.sequences[0], 0, dt, grid[i] + ws);
    literal[i] = c * c * (up * up + um * um);
    quarter[i] = 0.25 * literal[i];
  }
  const double e_direct = oracle::rel_l2(num.values, direct);
  const double e_quarter = oracle::rel_l2(num.values, quarter);

  // Segment harmonic at 2 pi / dt for a sequence centred at w_s = 0.
  const std::size_t nh = 50;
  const auto sh = compute_dpss({nh, 2.0 / nh, 0});
  const double dth = 220e-6;
  double vh = 0.0;
  for (double x : sh.sequences[0]) vh = std::max(vh, std::abs(x));
  const auto hseq = pulsed_dpss(sh, 0, 0.0, 0.5 * dth / vh, dth, nh);
  const double harmonic = kTwoPi / dth;
  const auto hgrid = uniform_grid(0.5 * harmonic, 1.5 * harmonic, 2001);
  const auto hf = switching_ff(hseq, hgrid);
  const auto peak = static_cast<std::size_t>(std::max_element(hf.values.begin(), hf.values.end()) - hf.values.begin());
  const double off = std::abs(hgrid[peak] / harmonic - 1.0);

  Outcome o{band.hi * dt <= 0.1 && e_direct <= 0.1 && e_quarter <= 0.1 && off < 2e-3,
            "w_c dt = " + fmt("%.3f", band.hi * dt) + "; rel-L2 vs c^2 |sum cos v e^{iwt}|^2 = " + fmt("%.2e", e_direct) +
                ", vs (c^2/4)[U^2(w-ws)+U^2(w+ws)] = " + fmt("%.2e", e_quarter) + " (<= 0.1); segment harmonic at " +
                fmt("%.1f", rad_to_hz(hgrid[peak])) + " Hz vs 1/dt = " + fmt("%.1f", 1.0 / dth) + " Hz"};
  o.info.push_back("info: against the printed c^2[U^2(w-ws)+U^2(w+ws)] without the 1/4: rel-L2 = " +
                   fmt("%.3f", oracle::rel_l2(num.values, literal)) + " (see README)");
  return o;
}

// ---------------------------------------------------------------- 10

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

Outcome criterion10() {
  const fs::path root = fs::temp_directory_path() / "qns_acceptance_determinism";
  fs::remove_all(root);
  struct Step {
    std::string preset, command, dataset_from;
  };
  const std::vector<Step> steps{{"dpss", "dpss", ""},         {"fig1", "filters", ""},
                                {"fig1", "simulate", ""},     {"fig2", "simulate", ""},
                                {"fig2", "reconstruct", "fig2_simulate"}, {"fig3", "simulate", ""},
                                {"fig3", "reconstruct", "fig3_simulate"}, {"fig4e", "compare", ""},
                                {"fig4f", "compare", ""}};
  std::size_t files = 0;
  std::vector<std::string> differing;
  const int threads = omp_get_max_threads();
  for (int pass = 0; pass < 2; ++pass) {
    // The second pass uses a different thread count.
    omp_set_num_threads(pass == 0 ? threads : threads + 2);
    for (const auto& s : steps) {
      app::Invocation inv;
      inv.command = s.command;
      if (s.command != "reconstruct") inv.preset = s.preset;
      inv.out = root / std::to_string(pass) / (s.preset + "_" + s.command);
      if (!s.dataset_from.empty()) inv.dataset = root / std::to_string(pass) / s.dataset_from;
      app::execute(inv);
    }
  }
  omp_set_num_threads(threads);
  for (const auto& s : steps) {
    const std::string name = s.preset + "_" + s.command;
    const auto a = snapshot(root / "0" / name);
    const auto b = snapshot(root / "1" / name);
    files += a.size();
    if (a != b) differing.push_back(name);
  }
  fs::remove_all(root);
  std::string detail = std::to_string(files) + " files from " + std::to_string(steps.size()) +
                       " preset runs compared byte for byte across two runs (thread counts " + std::to_string(threads) +
                       " and " + std::to_string(threads + 2) + ")";
  for (const auto& d : differing) detail += "; differs: " + d;
  return {differing.empty() && files > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "DPSS concentration", 5, criterion1},
      {2, "closed-form FF agreement", 30, criterion2},
      {3, "overlap-integral law", 120, criterion3},
      {4, "Magnus validity", 0, criterion4},
      {5, "mixed-spectrum Bayesian reconstruction", 300, criterion5},
      {6, "simultaneous dephasing and amplitude reconstruction", 300, criterion6},
      {7, "DPSS versus pulsed protocols (ion parameters)", 600, criterion7},
      {8, "Bayesian formula oracle", 60, criterion8},
      {9, "pulsed DPSS", 60, criterion9},
      {10, "determinism", 0, criterion10},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_s > 0) timing += fmt(" (< %.0f s)", c.budget_s);
    std::printf("CRITERION %d %s: %s | %s | %s\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(),
                timing.c_str());
    for (const auto& line : o.info) std::printf("  %s\n", line.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
