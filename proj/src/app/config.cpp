#include "qns/app/config.hpp"

#include <algorithm>
#include <cmath>

#include "qns/common.hpp"
#include "qns/error.hpp"

namespace qns::app {

void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::Validation, (path.empty() ? std::string("config") : path) + ": " + message);
}

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

}  // namespace

bool Node::has(std::string_view key) const { return value_->is_object() && value_->contains(key); }

Node Node::at(std::string_view key) const {
  if (!value_->is_object()) invalid(path_, "expected an object");
  auto it = value_->find(key);
  if (it == value_->end()) invalid(join(path_, key), "required field is missing");
  return Node(*it, join(path_, key));
}

std::optional<Node> Node::find(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

std::size_t Node::size() const {
  if (!value_->is_array()) invalid(path_, "expected an array");
  return value_->size();
}

Node Node::item(std::size_t i) const {
  if (!value_->is_array() || i >= value_->size()) invalid(path_, "index out of range");
  return Node((*value_)[i], path_ + "[" + std::to_string(i) + "]");
}

double Node::number() const {
  if (!value_->is_number()) invalid(path_, "expected a number");
  const double x = value_->get<double>();
  if (!std::isfinite(x)) invalid(path_, "expected a finite number");
  return x;
}

double Node::positive() const {
  const double x = number();
  if (!(x > 0.0)) invalid(path_, "must be positive");
  return x;
}

double Node::nonnegative() const {
  const double x = number();
  if (x < 0.0) invalid(path_, "must be nonnegative");
  return x;
}

std::size_t Node::count() const {
  if (!value_->is_number_integer() || value_->get<long long>() < 0) invalid(path_, "expected a nonnegative integer");
  return value_->get<std::size_t>();
}

bool Node::boolean() const {
  if (!value_->is_boolean()) invalid(path_, "expected true or false");
  return value_->get<bool>();
}

std::string Node::text() const {
  if (!value_->is_string()) invalid(path_, "expected a string");
  return value_->get<std::string>();
}

std::vector<double> Node::numbers() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = item(i).number();
  return out;
}

double Node::number_or(std::string_view key, double fallback) const {
  return has(key) ? at(key).number() : fallback;
}

std::size_t Node::count_or(std::string_view key, std::size_t fallback) const {
  return has(key) ? at(key).count() : fallback;
}

std::string Node::text_or(std::string_view key, const std::string& fallback) const {
  return has(key) ? at(key).text() : fallback;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    invalid(source, e.what());
  }
}

Spectrum parse_spectrum(const Node& n) {
  const std::string form = n.at("form").text();
  const double cutoff = n.has("cutoff_hz") ? hz_to_rad(n.at("cutoff_hz").positive()) : INFINITY;
  Spectrum s;
  if (form == "white") {
    s = white(n.at("level").nonnegative(), cutoff);
  } else if (form == "one_over_f_with_spurs") {
    std::vector<GaussianPeak> spurs;
    if (auto list = n.find("spurs")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const Node p = list->item(i);
        spurs.push_back({hz_to_rad(p.at("center_hz").nonnegative()), hz_to_rad(p.at("width_hz").positive()),
                         p.at("height").nonnegative()});
      }
    }
    s = one_over_f_with_spurs(n.at("level").nonnegative(), n.number_or("exponent", 1.0),
                              hz_to_rad(n.at("knee_hz").positive()), std::move(spurs), cutoff);
  } else if (form == "gaussian_bump") {
    s = gaussian_bump(hz_to_rad(n.at("center_hz").nonnegative()), hz_to_rad(n.at("width_hz").positive()),
                      n.at("height").nonnegative(), cutoff);
  } else if (form == "delta_tone") {
    s = delta_tone(hz_to_rad(n.at("frequency_hz").positive()), n.at("power").nonnegative());
  } else if (form == "gridded") {
    auto f = n.at("frequency_hz").numbers();
    for (double& x : f) x = hz_to_rad(x);
    try {
      s = gridded(std::move(f), n.at("values").numbers());
    } catch (const Error& e) {
      invalid(n.path(), e.what());
    }
  } else {
    invalid(n.at("form").path(), "unknown spectrum form '" + form + "'");
  }
  if (n.has("lower_hz")) s.lower = hz_to_rad(n.at("lower_hz").nonnegative());
  return s;
}

std::vector<double> parse_grid(const Node& n) {
  const double lo = n.number_or("f_min_hz", 0.0);
  const double hi = n.at("f_max_hz").positive();
  const std::size_t points = n.count_or("points", kDefaultGridPoints);
  if (lo < 0.0 || !(hi > lo)) invalid(n.path(), "need 0 <= f_min_hz < f_max_hz");
  if (points < 2) invalid(join(n.path(), "points"), "need at least two points");
  return uniform_grid(hz_to_rad(lo), hz_to_rad(hi), points);
}

const DpssSet& DpssCache::get(std::size_t n, double w, std::size_t order) {
  const auto key = std::make_tuple(n, w, order);
  auto it = sets_.find(key);
  if (it == sets_.end()) it = sets_.emplace(key, compute_dpss({n, w, order})).first;
  return it->second;
}

double Control::duration() const {
  if (waveform) return waveform->duration();
  return pulses ? pulses->duration : 0.0;
}

double parse_half_bandwidth(const Node& n, std::size_t length) {
  if (n.has("W") && n.has("NW")) invalid(n.path(), "give either W or NW, not both");
  const double w = n.has("W") ? n.at("W").number() : n.at("NW").number() / static_cast<double>(length);
  if (!(w > 0.0 && w < 0.5)) invalid(join(n.path(), n.has("W") ? "W" : "NW"), "half-bandwidth W must lie in (0, 0.5)");
  return w;
}

Scaling parse_scaling(const Node& n) {
  const std::string mode = n.text_or("mode", "fixed");
  Scaling s;
  if (mode == "fixed") {
    s.mode = Normalization::Fixed;
  } else if (mode == "energy") {
    s.mode = Normalization::Energy;
  } else if (mode == "theta_energy") {
    s.mode = Normalization::ThetaEnergy;
  } else if (mode == "max_theta") {
    s.mode = Normalization::MaxTheta;
  } else {
    invalid(join(n.path(), "mode"), "unknown normalization '" + mode + "'");
  }
  s.value = n.at("value").positive();
  return s;
}

std::vector<double> parse_shifts(const Node& n) {
  if (n.has("shift_hz") && n.has("shifts_hz")) invalid(n.path(), "give either shift_hz or shifts_hz");
  if (n.has("shift_hz")) return {hz_to_rad(n.at("shift_hz").nonnegative())};
  if (!n.has("shifts_hz")) return {0.0};
  const Node s = n.at("shifts_hz");
  std::vector<double> out;
  if (s.json().is_array()) {
    out = s.numbers();
  } else {
    // {start_hz, step_hz, count}
    const double start = s.at("start_hz").nonnegative();
    const double step = s.at("step_hz").positive();
    const std::size_t count = s.at("count").count();
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
  }
  if (out.empty()) invalid(s.path(), "no shifts given");
  for (double& x : out) {
    if (x < 0.0) invalid(s.path(), "shifts must be nonnegative");
    x = hz_to_rad(x);
  }
  return out;
}

namespace {

std::vector<std::size_t> pulse_list(const Node& n) {
  const Node p = n.at("pulses");
  std::vector<std::size_t> out;
  if (p.json().is_array()) {
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back(p.item(i).count());
  } else if (p.json().is_object()) {
    const std::size_t first = p.at("first").count();
    const std::size_t last = p.at("last").count();
    if (last < first) invalid(p.path(), "last must not precede first");
    for (std::size_t k = first; k <= last; ++k) out.push_back(k);
  } else {
    out.push_back(p.count());
  }
  if (out.empty()) invalid(p.path(), "no pulse counts given");
  for (std::size_t k : out) {
    if (k == 0) invalid(p.path(), "pulse counts must be positive");
  }
  return out;
}

template <class F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (is_validation_error(e.code())) invalid(path, e.what());
    throw;
  }
}

void build_one(const Node& n, DpssCache& cache, std::vector<Control>& out) {
  const std::string type = n.at("type").text();
  const std::string label = n.text_or("label", type);
  const double cap = n.has("cap_rad_per_s") ? n.at("cap_rad_per_s").positive() : kNoCap;

  if (type == "dpss" || type == "cosine_shift" || type == "finite_difference" || type == "embedded_dd" ||
      type == "pulsed_dpss") {
    const std::size_t length = n.at("N").count();
    if (length < 2) invalid(join(n.path(), "N"), "need N >= 2");
    const double w = parse_half_bandwidth(n, length);
    const std::size_t order = n.count_or("order", 0);
    if (order >= length) invalid(join(n.path(), "order"), "order must be below N");
    const double dt = n.at("dt_s").positive();
    const DpssSet& set = guarded(n.path(), [&]() -> const DpssSet& { return cache.get(length, w, order); });
    for (double ws : parse_shifts(n)) {
      Control c;
      c.label = label;
      c.type = type;
      c.shift = ws;
      c.dt = dt;
      c.half_bandwidth = w;
      c.has_band = true;
      c.band = shifted_passband(ws, w, dt);
      guarded(n.path(), [&] {
        if (type == "dpss") {
          c.waveform = dpss_waveform(set, order, n.at("scale_rad_per_s").positive(), dt, cap);
          c.band = shifted_passband(0.0, w, dt);
        } else if (type == "cosine_shift") {
          c.waveform = cosine_shift(set, order, ws, dt, parse_scaling(n.at("normalization")), cap);
        } else if (type == "finite_difference") {
          c.waveform = finite_difference(cosine_shift(set, order, ws, dt, parse_scaling(n.at("normalization"))), cap);
        } else if (type == "embedded_dd") {
          c.waveform = finite_difference_embedded_dd(set, order, ws, dt, parse_scaling(n.at("normalization")), cap);
        } else {
          c.pulses = pulsed_dpss(set, order, ws, n.at("c_tau").nonnegative(), dt, length);
          c.pulse_count = c.pulses->centers.size();
        }
        return 0;
      });
      out.push_back(std::move(c));
    }
  } else if (type == "cpmg") {
    const double tau = n.at("tau_s").positive();
    const double width = n.has("pulse_width_s") ? n.at("pulse_width_s").nonnegative() : 0.0;
    const double buffer = n.has("buffer_s") ? n.at("buffer_s").nonnegative() : 0.0;
    const double step = n.has("grid_step_s") ? n.at("grid_step_s").positive() : 0.0;
    for (std::size_t k : pulse_list(n)) {
      Control c;
      c.label = label;
      c.type = type;
      c.pulse_count = k;
      guarded(n.path(), [&] {
        c.pulses = cpmg(k, tau, width, buffer);
        if (width > 0.0) c.waveform = render(*c.pulses, step);
        return 0;
      });
      c.shift = kPi * static_cast<double>(k) / tau;
      out.push_back(std::move(c));
    }
  } else if (type == "rotary_spin_echo") {
    Control c;
    c.label = label;
    c.type = type;
    c.waveform = guarded(n.path(), [&] {
      return rotary_spin_echo(hz_to_rad(n.at("rabi_hz").positive()), n.at("period_s").positive(),
                              n.at("tau_s").positive());
    });
    c.shift = kTwoPi / n.at("period_s").number();
    out.push_back(std::move(c));
  } else {
    invalid(join(n.path(), "type"), "unknown control type '" + type + "'");
  }
}

}  // namespace

std::vector<Control> build_controls(const Node& list, DpssCache& cache) {
  if (!list.json().is_array()) invalid(list.path(), "expected a list of controls");
  if (list.size() == 0) invalid(list.path(), "the control list is empty");
  std::vector<Control> out;
  for (std::size_t i = 0; i < list.size(); ++i) build_one(list.item(i), cache, out);
  return out;
}

ControlFilters control_filters(const Control& c, const std::vector<double>& omega) {
  ControlFilters f;
  if (c.waveform) {
    const auto ffs = fundamental_ffs(*c.waveform, omega);
    f.dephasing = dephasing_ff(ffs);
    f.amplitude = amplitude_ff(ffs);
    f.zz_power = zz_power_ff(ffs);
  } else {
    f.zz_power = switching_ff(*c.pulses, omega);
    f.dephasing = f.zz_power;
    f.dephasing.kind = FilterKind::Dephasing;
    std::fill(f.dephasing.values.begin(), f.dephasing.values.end(), 0.0);
    f.amplitude = f.dephasing;
    f.amplitude.kind = FilterKind::Amplitude;
  }
  for (auto* ff : {&f.dephasing, &f.amplitude, &f.zz_power}) {
    ff->has_passband = c.has_band;
    ff->passband = c.band;
  }
  return f;
}

std::vector<double> default_control_grid(const std::vector<Control>& controls, std::size_t points) {
  double top = 0.0;
  for (const auto& c : controls) {
    if (c.dt > 0.0) {
      top = std::max(top, kPi / c.dt);
    } else if (c.pulses) {
      const double spacing = c.pulses->duration / static_cast<double>(std::max<std::size_t>(1, c.pulse_count));
      top = std::max(top, 10.0 * kPi / spacing);
    } else if (c.waveform) {
      double shortest = c.waveform->duration();
      for (std::size_t j = 0; j < c.waveform->size(); ++j) {
        shortest = std::min(shortest, c.waveform->edges[j + 1] - c.waveform->edges[j]);
      }
      top = std::max(top, kPi / shortest);
    }
  }
  if (!(top > 0.0)) invalid("grid", "cannot infer a frequency grid; give grid.f_max_hz");
  return uniform_grid(0.0, top, points);
}

}  // namespace qns::app
