#include "oemt/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "oemt/errors.hpp"
#include "oemt/linear_system.hpp"
#include "oemt/metrics.hpp"
#include "oemt/propagator.hpp"
#include "oemt/scattering.hpp"

namespace oemt {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

struct KindName {
    ProtocolKind kind;
    const char* name;
};

constexpr KindName kind_names[] = {
    {ProtocolKind::double_swap, "double_swap"},
    {ProtocolKind::precooled_double_swap, "precooled_double_swap"},
    {ProtocolKind::adiabatic_dark_mode, "adiabatic_dark_mode"},
    {ProtocolKind::raman, "raman"},
    {ProtocolKind::itinerant, "itinerant"},
    {ProtocolKind::entangle_red_blue, "entangle_red_blue"},
};

std::complex<double> complex_value(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object()) return {j.value("re", 0.0), j.value("im", 0.0)};
    throw ConfigError("expected a number, [re, im] or {\"re\", \"im\"}");
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

// Inverse of GaussianState::displaced_squeezed for a pure single-mode state.
json state_json(const GaussianState& s) {
    const double r = 0.5 * std::acosh(std::max(1.0, s.cov(0, 0) + s.cov(1, 1)));
    const double theta = std::atan2(-2.0 * s.cov(0, 1), s.cov(1, 1) - s.cov(0, 0));
    return {{"alpha", complex_json(s.amplitude(0))}, {"r0", complex_json(std::polar(r, theta))}};
}

int default_samples(const ProtocolSpec& spec, int fallback) { return spec.samples > 1 ? spec.samples : fallback; }

std::vector<double> grid(double t0, double t1, int samples) {
    return linspace(t0, t1, static_cast<std::size_t>(std::max(samples, 2)));
}

Controls base_controls(const TransducerModel& model) {
    return {0.0, 0.0, model.drive[0].delta, model.drive[1].delta};
}

GaussianState chain_state(const TransducerModel& model, const GaussianState& cavity1) {
    if (cavity1.modes() != 1) throw ConfigError("protocol input state must be single-mode");
    const double n_m[] = {model.mechanics().n_th};
    const double n_2[] = {model.cavity(1).n_th};
    const GaussianState parts[] = {cavity1, GaussianState::thermal(n_m), GaussianState::thermal(n_2)};
    return GaussianState::product(parts);
}

GaussianState thermal_chain(const TransducerModel& model) {
    const double n[] = {model.modes[0].n_th, model.modes[1].n_th, model.modes[2].n_th};
    return GaussianState::thermal(n);
}

void require_positive_couplings(const TransducerModel& model) {
    if (!(model.g(0) > 0.0) || !(model.g(1) > 0.0)) {
        throw PhysicsError("protocol needs g1 > 0 and g2 > 0 (got g1=" + std::to_string(model.g(0)) +
                           ", g2=" + std::to_string(model.g(1)) + ")");
    }
}

double peak_occupation(const Trajectory& traj, int mode) {
    double peak = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const GaussianState s = traj.state(k);
        peak = std::max(peak, s.occupation(mode));
    }
    return peak;
}

Trajectory concatenate(Trajectory a, const Trajectory& b) {
    for (std::size_t k = 1; k < b.size(); ++k) {
        a.t.push_back(b.t[k]);
        a.mean.push_back(b.mean[k]);
        if (!b.cov.empty()) a.cov.push_back(b.cov[k]);
        a.output.push_back(b.output[k]);
    }
    return a;
}

// Fidelity of cavity 2 at the end against the input state carried through the
// lossless phase of the same schedule.
void transfer_metrics(ProtocolResult& r, const TransducerModel& model, const CouplingSchedule& swaps,
                      const GaussianState& input) {
    const std::complex<double> u = lossless_transfer(model, swaps);
    const int keep[] = {2};
    const GaussianState out = r.final_state.reduced(keep);
    GaussianState reference = input;
    reference.rotate_mode(0, std::arg(u));
    r.set("fidelity", gaussian_fidelity(reference, out));
    r.set("fidelity_uncorrected", gaussian_fidelity(input, out));
    r.set("transfer_amplitude", std::abs(u));
    r.set("transfer_phase", std::arg(u));
    r.set("n_cavity1_final", r.final_state.occupation(0));
    r.set("n_mechanics_initial", r.trajectory.state(0).occupation(1));
    r.set("n_mechanics_final", r.final_state.occupation(1));
    r.set("n_cavity2_final", r.final_state.occupation(2));
    r.set("peak_mechanical_occupation", peak_occupation(r.trajectory, 1));
}

CouplingSchedule swap_schedule(const TransducerModel& model, double t_start) {
    const Controls base = base_controls(model);
    Controls c1 = base, c2 = base;
    c1.g1 = model.g(0);
    c2.g2 = model.g(1);
    CouplingSchedule s(t_start);
    s.hold(c1, pi / (2.0 * model.g(0))).hold(c2, pi / (2.0 * model.g(1)));
    return s;
}

// Lossless 3x3 propagator of constant controls.
Eigen::Matrix3cd lossless_propagator(const TransducerModel& model, const Controls& c, double t) {
    const Eigen::Matrix3cd M = coupling_matrix(lossless(model), c);
    const std::complex<double> I(0.0, 1.0);
    return expm(Eigen::MatrixXcd(-I * M * t));
}

}  // namespace

std::string_view to_string(ProtocolKind kind) {
    for (const auto& k : kind_names) {
        if (k.kind == kind) return k.name;
    }
    return "unknown";
}

ProtocolKind protocol_from_string(std::string_view name) {
    for (const auto& k : kind_names) {
        if (name == k.name) return k.kind;
    }
    std::string list;
    for (const auto& k : kind_names) list += std::string(list.empty() ? "" : ", ") + k.name;
    throw ConfigError("unknown protocol '" + std::string(name) + "' (expected one of: " + list + ")");
}

std::vector<std::string> protocol_names() {
    std::vector<std::string> v;
    for (const auto& k : kind_names) v.emplace_back(k.name);
    return v;
}

GaussianState single_mode_state_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("state must be an object {\"alpha\", \"r0\"}", where);
    for (const auto& [key, _] : j.items()) {
        if (key != "alpha" && key != "r0") throw ConfigError("unknown state key '" + key + "'", where + "/" + key);
    }
    try {
        const std::complex<double> alpha = j.contains("alpha") ? complex_value(j.at("alpha")) : 0.0;
        const std::complex<double> r0 = j.contains("r0") ? complex_value(j.at("r0")) : 0.0;
        return GaussianState::displaced_squeezed(alpha, r0);
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), e.location().empty() ? where : e.location());
    } catch (const json::exception& e) {
        throw ConfigError(e.what(), where);
    }
}

ProtocolSpec protocol_spec_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("protocol must be an object", where);
    static const char* known[] = {"kind",  "state",   "T_f",     "ramp",         "delta_offset", "precool_duration",
                                  "delay", "pulse",   "t_start", "t_end",        "steady_state", "duration",
                                  "samples", "steady_start"};
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known)) {
            throw ConfigError("unknown protocol key '" + key + "'", where + "/" + key);
        }
    }
    ProtocolSpec s;
    auto number = [&](const char* key) {
        const json& v = j.at(key);
        if (!v.is_number()) throw ConfigError(std::string("expected a number for '") + key + "'", where + "/" + key);
        return v.get<double>();
    };
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("missing protocol 'kind'", where + "/kind");
    try {
        s.kind = protocol_from_string(j.at("kind").get<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), where + "/kind");
    }
    if (j.contains("state")) s.input = single_mode_state_from_json(j.at("state"), where + "/state");
    if (j.contains("T_f")) s.T_f = number("T_f");
    if (j.contains("ramp")) {
        try {
            s.ramp = ramp_from_string(j.at("ramp").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(e.what(), where + "/ramp");
        }
    }
    if (j.contains("delta_offset")) s.delta_offset = number("delta_offset");
    if (j.contains("precool_duration")) s.precool_duration = number("precool_duration");
    if (j.contains("delay")) s.delay = number("delay");
    if (j.contains("pulse")) s.pulse = pulse_from_json(j.at("pulse"), where + "/pulse");
    if (j.contains("t_start")) s.t_start = number("t_start");
    if (j.contains("t_end")) s.t_end = number("t_end");
    if (j.contains("steady_state")) {
        if (!j.at("steady_state").is_boolean()) throw ConfigError("expected a boolean", where + "/steady_state");
        s.steady_state = j.at("steady_state").get<bool>();
    }
    if (j.contains("steady_start")) {
        if (!j.at("steady_start").is_boolean()) throw ConfigError("expected a boolean", where + "/steady_start");
        s.steady_start = j.at("steady_start").get<bool>();
    }
    if (j.contains("duration")) s.duration = number("duration");
    if (j.contains("samples")) {
        if (!j.at("samples").is_number_integer()) throw ConfigError("expected an integer", where + "/samples");
        s.samples = j.at("samples").get<int>();
    }
    if (s.T_f < 0.0 || s.delay < 0.0 || s.duration < 0.0 || (s.precool_duration && *s.precool_duration <= 0.0)) {
        throw ConfigError("protocol durations must be positive", where);
    }
    return s;
}

json to_json(const ProtocolSpec& s) {
    json j;
    j["kind"] = std::string(to_string(s.kind));
    j["state"] = state_json(s.input);
    j["T_f"] = s.T_f;
    j["ramp"] = to_string(s.ramp);
    j["steady_start"] = s.steady_start;
    j["delta_offset"] = s.delta_offset;
    if (s.precool_duration) j["precool_duration"] = *s.precool_duration;
    j["delay"] = s.delay;
    if (s.pulse) {
        j["pulse"] = {{"kind", s.pulse->kind == PulseShape::Kind::gaussian           ? "gaussian"
                               : s.pulse->kind == PulseShape::Kind::exponential_rise ? "exponential_rise"
                                                                                     : "samples"},
                      {"amplitude", complex_json(s.pulse->amplitude)},
                      {"sigma", s.pulse->width},
                      {"rate", s.pulse->rate},
                      {"center", s.pulse->center}};
    }
    if (s.t_start) j["t_start"] = *s.t_start;
    if (s.t_end) j["t_end"] = *s.t_end;
    j["steady_state"] = s.steady_state;
    j["duration"] = s.duration;
    j["samples"] = s.samples;
    return j;
}

bool ProtocolResult::has(const std::string& name) const {
    return std::any_of(metrics.begin(), metrics.end(), [&](const auto& m) { return m.first == name; });
}

double ProtocolResult::metric(const std::string& name) const {
    for (const auto& m : metrics) {
        if (m.first == name) return m.second;
    }
    throw std::out_of_range("protocol result has no metric '" + name + "'");
}

void ProtocolResult::set(const std::string& name, double value) {
    for (auto& m : metrics) {
        if (m.first == name) {
            m.second = value;
            return;
        }
    }
    metrics.emplace_back(name, value);
}

json ProtocolResult::metrics_json() const {
    json j = json::object();
    j["protocol"] = std::string(to_string(kind));
    json values = json::array();
    for (const auto& [name, v] : metrics) {
        json entry = {{"name", name}};
        if (std::isfinite(v)) {
            entry["value"] = v;
        } else {
            entry["value"] = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
        }
        values.push_back(entry);
    }
    j["metrics"] = values;
    j["notices"] = notices;
    return j;
}

std::complex<double> lossless_transfer(const TransducerModel& model, const CouplingSchedule& schedule) {
    const TransducerModel ideal = lossless(model);
    const GaussianState parts[] = {GaussianState::coherent(1.0), GaussianState::vacuum(1), GaussianState::vacuum(1)};
    const double t[] = {schedule.t_start(), schedule.t_end()};
    EvolveOptions opt;
    opt.track_covariance = false;
    const Trajectory traj = evolve([&](const Controls& c) { return rwa_system(ideal, c); }, schedule,
                                   GaussianState::product(parts), t, {}, opt);
    return traj.amplitude(traj.size() - 1, 2);
}

double dark_mode_overlap(const GaussianState& state, const Controls& c) {
    const double g0 = c.g0();
    double total = 0.0;
    for (int j = 0; j < state.modes(); ++j) total += state.occupation(j);
    if (!(g0 > 0.0) || !(total > 0.0)) return 1.0;
    const double c1 = -c.g2 / g0, c2 = c.g1 / g0;
    const double dd = c1 * c1 * state.occupation(0) + c2 * c2 * state.occupation(2) +
                      2.0 * c1 * c2 * state.normal_moment(0, 2).real();
    return dd / total;
}

double dark_mode_suppression_factor(const TransducerModel& model) {
    const double g0 = std::hypot(model.g(0), model.g(1));
    return g0 > 0.0 ? std::pow((model.kappa(0) - model.kappa(1)) / (4.0 * g0), 2) : 0.0;
}

ProtocolResult run_double_swap(const TransducerModel& model, const ProtocolSpec& spec) {
    require_valid(model);
    require_positive_couplings(model);
    ProtocolResult r;
    r.kind = ProtocolKind::double_swap;
    r.schedule = swap_schedule(model, 0.0);
    const auto t = grid(0.0, r.schedule.t_end(), default_samples(spec, 201));
    r.trajectory = evolve_covariance(model, r.schedule, chain_state(model, spec.input), t);
    r.final_state = r.trajectory.final_state();
    r.set("duration", r.schedule.duration());
    transfer_metrics(r, model, r.schedule, spec.input);
    return r;
}

ProtocolResult run_precooled_double_swap(const TransducerModel& model, const ProtocolSpec& spec) {
    require_valid(model);
    require_positive_couplings(model);
    ProtocolResult r;
    r.kind = ProtocolKind::precooled_double_swap;
    const int samples = default_samples(spec, 201);

    const double tau = spec.precool_duration.value_or(pi / (2.0 * model.g(0)));
    Controls pre = base_controls(model);
    pre.g1 = model.g(0);
    const CouplingSchedule cooling = CouplingSchedule::constant(pre, tau);
    const Trajectory first = evolve_covariance(model, cooling, chain_state(model, GaussianState::vacuum(1)),
                                               grid(0.0, tau, std::max(samples / 4, 2)));
    GaussianState state = first.final_state();
    const double n_after = state.occupation(1);
    state.replace_mode(0, spec.input);

    CouplingSchedule main(tau);
    if (spec.delay > 0.0) main.hold(base_controls(model), spec.delay);
    const CouplingSchedule swaps = swap_schedule(model, main.t_end());
    for (const auto& seg : swaps.segments()) main.append(seg);

    const Trajectory second = evolve_covariance(model, main, state, grid(tau, main.t_end(), samples));
    r.trajectory = concatenate(first, second);
    r.final_state = second.final_state();

    r.schedule = CouplingSchedule(0.0);
    r.schedule.hold(pre, tau);
    for (const auto& seg : main.segments()) r.schedule.append(seg);

    r.set("duration", r.schedule.duration());
    r.set("precool_duration", tau);
    r.set("delay", spec.delay);
    r.set("n_mechanics_after_precool", n_after);
    r.set("effective_temperature", effective_temperature(n_after, model.omega_m(), model.units));
    transfer_metrics(r, model, swaps, spec.input);
    return r;
}

ProtocolResult run_adiabatic_dark_mode(const TransducerModel& model, const ProtocolSpec& spec) {
    require_valid(model);
    require_positive_couplings(model);
    if (spec.ramp == RampKind::gaussian || spec.ramp == RampKind::constant) {
        throw ConfigError("adiabatic passage needs a linear or raised_cosine ramp");
    }
    ProtocolResult r;
    r.kind = ProtocolKind::adiabatic_dark_mode;
    const double g0 = std::hypot(model.g(0), model.g(1));
    const double T_f = spec.T_f > 0.0 ? spec.T_f : 20.0 * pi / g0;
    if (model.drive[0].delta != model.drive[1].delta) {
        r.notices.push_back("two-photon resonance broken: delta1 != delta2, the dark mode is not an exact eigenmode");
    }
    Controls from = base_controls(model), to = base_controls(model);
    from.g2 = -model.g(1);
    to.g1 = model.g(0);
    r.schedule = CouplingSchedule(0.0);
    r.schedule.ramp(spec.ramp, from, to, T_f);

    const bool settle = spec.steady_start && is_stable(rwa_system(model, from).drift());
    if (spec.steady_start && !settle) {
        r.notices.push_back("initial controls have no steady state; starting from the bare thermal chain");
    }
    auto run = [&](const TransducerModel& m) {
        GaussianState start = chain_state(m, spec.input);
        if (settle) {
            start.cov = steady_state_covariance(rwa_system(m, from));
            start.mean.setZero();
            start.replace_mode(0, spec.input);
        }
        return evolve_covariance(m, r.schedule, start, grid(0.0, T_f, default_samples(spec, 201)));
    };
    r.trajectory = run(model);
    r.final_state = r.trajectory.final_state();

    double min_overlap = 1.0;
    for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
        const double o = dark_mode_overlap(r.trajectory.state(k), r.schedule.at(r.trajectory.t[k]));
        r.dark_overlap.push_back(o);
        min_overlap = std::min(min_overlap, o);
    }
    const AdiabaticityDiagnostic diag = r.schedule.adiabaticity();

    r.set("duration", T_f);
    transfer_metrics(r, model, r.schedule, spec.input);
    r.set("min_dark_overlap", min_overlap);
    r.set("adiabaticity_ratio", diag.ratio);
    r.set("T_f_times_g0", T_f * g0);
    r.set("suppression_factor", dark_mode_suppression_factor(model));
    if (model.mechanics().n_th > 0.0) {
        TransducerModel cold = model;
        cold.mechanics().n_th = 0.0;
        const Trajectory ref = run(cold);
        const int keep[] = {2};
        GaussianState reference = spec.input;
        reference.rotate_mode(0, r.metric("transfer_phase"));
        const double F0 = gaussian_fidelity(reference, ref.final_state().reduced(keep));
        r.set("mechanical_infidelity", F0 - r.metric("fidelity"));
    } else {
        r.set("mechanical_infidelity", 0.0);
    }
    return r;
}

ProtocolResult run_raman(const TransducerModel& model, const ProtocolSpec& spec) {
    require_valid(model);
    require_positive_couplings(model);
    ProtocolResult r;
    r.kind = ProtocolKind::raman;
    const double delta = spec.delta_offset;
    const double gmax = std::max(model.g(0), model.g(1));
    const double ratio = std::abs(delta) / gmax;
    if (ratio < 3.0) {
        throw PhysicsError("Raman scheme needs |delta_offset| >> g: |delta_offset|/max(g) = " + std::to_string(ratio) +
                           " < 3");
    }
    if (ratio < 10.0) {
        r.notices.push_back("|delta_offset|/max(g) = " + std::to_string(ratio) +
                            " < 10: mechanics is not far off resonance, transfer is approximate");
    }
    const Controls c{model.g(0), model.g(1), delta, delta};
    const double tau0 = pi * std::abs(delta) / (2.0 * model.g(0) * model.g(1));

    auto transfer = [&](double t) { return std::abs(lossless_propagator(model, c, t)(2, 0)); };
    const double lo = 0.8 * tau0, hi = 1.2 * tau0;
    const int scan = 400;
    double best_t = tau0, best = transfer(tau0);
    for (int k = 0; k <= scan; ++k) {
        const double t = lo + (hi - lo) * k / scan;
        const double v = transfer(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    const double step = (hi - lo) / scan;
    const auto refined = boost::math::tools::brent_find_minima([&](double t) { return -transfer(t); },
                                                               std::max(lo, best_t - step), std::min(hi, best_t + step),
                                                               std::numeric_limits<double>::digits / 2);
    if (-refined.second > best) {
        best = -refined.second;
        best_t = refined.first;
    }

    r.schedule = CouplingSchedule::constant(c, best_t);
    r.trajectory = evolve_covariance(model, r.schedule, chain_state(model, spec.input),
                                     grid(0.0, best_t, default_samples(spec, 401)));
    r.final_state = r.trajectory.final_state();
    r.set("duration", best_t);
    r.set("rabi_estimate_duration", tau0);
    r.set("detuning_ratio", ratio);
    r.set("lossless_transfer_probability", best * best);
    transfer_metrics(r, model, r.schedule, spec.input);
    return r;
}

ProtocolResult run_itinerant(const TransducerModel& model, const ProtocolSpec& spec) {
    require_valid(model);
    if (!spec.pulse) throw ConfigError("itinerant protocol needs an input 'pulse'");
    if (model.drive[0].sideband == Sideband::blue || model.drive[1].sideband == Sideband::blue) {
        throw PhysicsError("itinerant conversion needs beam-splitter drives on both cavities");
    }
    const PulseShape& pulse = *spec.pulse;
    ProtocolResult r;
    r.kind = ProtocolKind::itinerant;

    const Eigen::Matrix3cd M0 = coupling_matrix(model);
    const Eigen::Vector3cd lambda = M0.eigenvalues();
    double slowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) slowest = std::min(slowest, -lambda(k).imag());
    if (!(slowest > 0.0)) throw PhysicsError("itinerant conversion needs every normal mode damped");

    const double bw = pulse.bandwidth();
    double t0 = 0.0, t1 = 0.0;
    switch (pulse.kind) {
        case PulseShape::Kind::gaussian:
            t0 = pulse.center - 8.0 / pulse.width;
            t1 = pulse.center + 8.0 / pulse.width;
            break;
        case PulseShape::Kind::exponential_rise:
            t0 = pulse.center - 30.0 / pulse.rate;
            t1 = pulse.center;
            break;
        case PulseShape::Kind::samples:
            t0 = pulse.times.front();
            t1 = pulse.times.back();
            break;
    }
    t1 += std::min(25.0 / slowest, 400.0 / bw);
    t0 = spec.t_start.value_or(t0);
    t1 = spec.t_end.value_or(t1);
    if (!(t1 > t0)) throw ConfigError("itinerant window must satisfy t_end > t_start");

    r.schedule = CouplingSchedule::constant(model_controls(model), t1 - t0, t0);
    const auto t = grid(t0, t1, default_samples(spec, 4001));
    PortInputs inputs(3);
    inputs[0] = pulse;
    r.trajectory = evolve_mean(model, r.schedule, thermal_chain(model), inputs, t);
    r.final_state = r.trajectory.final_state();

    const std::size_t n = t.size();
    std::vector<std::complex<double>> in(n), out(n);
    for (std::size_t k = 0; k < n; ++k) {
        in[k] = pulse.at(t[k]);
        out[k] = r.trajectory.output[k](2);
    }
    auto trapz = [&](auto&& f) {
        double s = 0.0;
        for (std::size_t k = 1; k < n; ++k) s += 0.5 * (t[k] - t[k - 1]) * (f(k) + f(k - 1));
        return s;
    };
    const double e_in = trapz([&](std::size_t k) { return std::norm(in[k]); });
    const double e_out = trapz([&](std::size_t k) { return std::norm(out[k]); });

    std::size_t k_in = 0, k_out = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(in[k]) > std::abs(in[k_in])) k_in = k;
        if (std::abs(out[k]) > std::abs(out[k_out])) k_out = k;
    }

    const double nu12 = model.nu(0) * model.nu(1);
    r.set("window_start", t0);
    r.set("window_end", t1);
    r.set("input_energy", e_in);
    r.set("output_energy", e_out);
    r.set("t31_0", std::sqrt(nu12) * std::abs(conversion_matrix_at(M0, damping_vector(model), 0.0)(2, 0)));
    if (!(e_in > 0.0)) {
        r.notices.push_back("input pulse carries no energy; efficiencies set to 0");
        r.set("efficiency_time", 0.0);
        r.set("efficiency_frequency", 0.0);
        r.set("efficiency_relative_error", 0.0);
        r.set("peak_ratio", 0.0);
        r.set("peak_delay", 0.0);
        return r;
    }
    const double eta_t = e_out / e_in;

    // Frequency-domain prediction from the numerical Fourier transform of the input.
    auto spectrum = [&](double w) {
        std::complex<double> s = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double h = t[k] - t[k - 1];
            s += 0.5 * h * (in[k] * std::polar(1.0, w * t[k]) + in[k - 1] * std::polar(1.0, w * t[k - 1]));
        }
        return s;
    };
    double span = 6.0 * bw;
    double capture = 0.0;
    std::vector<double> w;
    std::vector<double> power;
    for (int attempt = 0; attempt < 12; ++attempt) {
        w = linspace(-span, span, 1601);
        power.assign(w.size(), 0.0);
        for_each_index(w.size(), Exec::parallel, [&](std::size_t k) { power[k] = std::norm(spectrum(w[k])); });
        double total = 0.0;
        for (std::size_t k = 1; k < w.size(); ++k) total += 0.5 * (w[k] - w[k - 1]) * (power[k] + power[k - 1]);
        capture = total / (2.0 * pi * e_in);
        if (capture >= 0.999) break;
        span *= 2.0;
        r.notices.push_back("frequency grid widened to |omega| <= " + std::to_string(span) +
                            " to capture the input spectrum");
    }
    if (capture < 0.999) {
        throw NumericalError("input spectrum capture stayed at " + std::to_string(capture) +
                             " after widening the frequency grid");
    }
    const ConversionMatrix cm = conversion_matrix(model, w);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k < w.size(); ++k) {
        const double h = w[k] - w[k - 1];
        num += 0.5 * h * (nu12 * std::norm(cm.T[k](2, 0)) * power[k] + nu12 * std::norm(cm.T[k - 1](2, 0)) * power[k - 1]);
        den += 0.5 * h * (power[k] + power[k - 1]);
    }
    const double eta_f = num / den;

    r.set("efficiency_time", eta_t);
    r.set("efficiency_frequency", eta_f);
    r.set("efficiency_relative_error", std::abs(eta_t - eta_f) / eta_f);
    r.set("spectrum_capture", capture);
    r.set("omega_span", span);
    r.set("peak_ratio", std::abs(out[k_out]) / std::abs(in[k_in]));
    r.set("peak_delay", t[k_out] - t[k_in]);
    return r;
}

ProtocolResult run_entangle_red_blue(const TransducerModel& model, const ProtocolSpec& spec) {
    TransducerModel m = model;
    m.drive[0].sideband = Sideband::red;
    m.drive[1].sideband = Sideband::blue;
    require_valid(m);
    ProtocolResult r;
    r.kind = ProtocolKind::entangle_red_blue;

    const LinearSystem sys = rwa_system(m);
    const Eigen::MatrixXd A = sys.drift();
    const double max_eig = max_real_eigenvalue(A);
    const bool stable = max_eig < -1e-12;
    const Controls c = model_controls(m);

    if (spec.steady_state) {
        r.final_state.mean = Eigen::VectorXd::Zero(6);
        r.final_state.cov = steady_state_covariance(sys);
        r.schedule = CouplingSchedule::constant(c, 0.0);
    } else {
        if (!(spec.duration > 0.0)) throw ConfigError("transient entanglement run needs 'duration' > 0");
        if (!stable) {
            r.notices.push_back("drift is unstable (max Re eig = " + std::to_string(max_eig) +
                                "); the state grows without bound");
        }
        r.schedule = CouplingSchedule::constant(c, spec.duration);
        r.trajectory = evolve_covariance(m, r.schedule, thermal_chain(m),
                                         grid(0.0, spec.duration, default_samples(spec, 201)));
        r.final_state = r.trajectory.final_state();
    }

    const GaussianState& s = r.final_state;
    auto pair = [&](int a, int b) {
        const int idx[] = {a, b};
        return s.reduced(idx).cov;
    };
    const EprVariance epr = epr_variance(pair(0, 2));
    r.set("stable", stable ? 1.0 : 0.0);
    r.set("max_real_eigenvalue", max_eig);
    r.set("log_negativity_cavities", log_negativity(pair(0, 2)));
    r.set("log_negativity_cavity2_mechanics", log_negativity(pair(2, 1)));
    r.set("log_negativity_cavity1_mechanics", log_negativity(pair(0, 1)));
    r.set("n_cavity1", s.occupation(0));
    r.set("n_mechanics", s.occupation(1));
    r.set("n_cavity2", s.occupation(2));
    r.set("epr_variance", epr.value);
    r.set("epr_phase", epr.phase);
    const double g1 = m.g(0), g2 = m.g(1);
    if (g1 > 0.0 && g2 < g1) {
        const double rr = std::atanh(g2 / g1);
        const double ch = std::cosh(rr), sh = std::sinh(rr);
        // beta = cosh r a2 + i sinh r a1^dag
        const double nb = ch * ch * s.occupation(2) + sh * sh * (s.occupation(0) + 1.0) +
                          2.0 * ch * sh * s.anomalous_moment(0, 2).imag();
        r.set("squeezing_r", rr);
        r.set("bogoliubov_occupation", nb);
    }
    return r;
}

ProtocolResult run_protocol(const TransducerModel& model, const ProtocolSpec& spec) {
    switch (spec.kind) {
        case ProtocolKind::double_swap: return run_double_swap(model, spec);
        case ProtocolKind::precooled_double_swap: return run_precooled_double_swap(model, spec);
        case ProtocolKind::adiabatic_dark_mode: return run_adiabatic_dark_mode(model, spec);
        case ProtocolKind::raman: return run_raman(model, spec);
        case ProtocolKind::itinerant: return run_itinerant(model, spec);
        case ProtocolKind::entangle_red_blue: return run_entangle_red_blue(model, spec);
    }
    throw ConfigError("unknown protocol kind");
}

}  // namespace oemt
