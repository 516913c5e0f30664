#include "oemt/cli/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "oemt/errors.hpp"
#include "oemt/linear_system.hpp"
#include "oemt/metrics.hpp"
#include "oemt/parallel.hpp"
#include "oemt/scattering.hpp"
#include "oemt/search.hpp"

namespace oemt::cli {

using nlohmann::json;

namespace {

std::string time_unit(const TransducerModel& m) { return m.units == UnitSystem::si_angular ? "s" : "1/omega_m"; }
std::string rate_unit(const TransducerModel& m) { return m.units == UnitSystem::si_angular ? "rad/s" : "omega_m"; }
std::string temperature_unit(const TransducerModel& m) {
    return m.units == UnitSystem::si_angular ? "K" : "hbar*omega_m/k_B";
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown key '" + key + "'", where + "/" + key);
        }
    }
}

double number_at(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string("expected a number for '") + key + "'", where + "/" + key);
    }
    return j.at(key).get<double>();
}

// {"min", "max", "points", "log"} or an explicit array.
std::vector<double> grid_from_json(const json& j, const std::string& where) {
    if (j.is_array()) {
        std::vector<double> v;
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (!j[k].is_number()) throw ConfigError("expected a number", where + "/" + std::to_string(k));
            v.push_back(j[k].get<double>());
        }
        return v;
    }
    if (!j.is_object()) throw ConfigError("grid must be an array or {min, max, points}", where);
    check_keys(j, {"min", "max", "points", "log"}, where);
    const double lo = number_at(j, "min", where), hi = number_at(j, "max", where);
    if (!j.contains("points") || !j.at("points").is_number_unsigned()) {
        throw ConfigError("'points' must be a non-negative integer", where + "/points");
    }
    const std::size_t n = j.at("points").get<std::size_t>();
    const bool log = j.value("log", false);
    if (n == 0) return {};
    if (log) {
        if (!(lo > 0.0 && hi > 0.0)) throw ConfigError("log grid needs positive bounds", where);
        std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
        for (double& x : v) x = std::pow(10.0, x);
        v.front() = lo;
        v.back() = hi;
        return v;
    }
    return linspace(lo, hi, n);
}

json model_summary(const TransducerModel& m) {
    const ValidationReport r = validate_model(m);
    return {{"model", to_json(m)}, {"validation", to_json(r)}, {"metrics", to_json(model_metrics(m))}};
}

// ---------------------------------------------------------------- spectrum

json run_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const json& p = cfg.params;
    check_keys(p, {"omega", "variants", "pulse", "probe"}, "/spectrum");
    const std::vector<double> omega =
        p.contains("omega") ? grid_from_json(p.at("omega"), "/spectrum/omega") : linspace(-5.0, 5.0, 1001);

    std::vector<std::pair<std::string, TransducerModel>> variants;
    if (p.contains("variants")) {
        const json& vs = p.at("variants");
        if (!vs.is_array()) throw ConfigError("'variants' must be an array", "/spectrum/variants");
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const std::string at = "/spectrum/variants/" + std::to_string(k);
            check_keys(vs[k], {"name", "set"}, at);
            TransducerModel m = cfg.model;
            ProtocolSpec unused;
            if (vs[k].contains("set")) {
                for (const auto& [key, value] : vs[k].at("set").items()) {
                    if (!value.is_number()) throw ConfigError("expected a number", at + "/set/" + key);
                    try {
                        apply_parameter(m, unused, key, value.get<double>());
                    } catch (const ConfigError& e) {
                        throw ConfigError(e.what(), at + "/set/" + key);
                    }
                }
            }
            variants.emplace_back(vs[k].value("name", "variant" + std::to_string(k)), m);
        }
    } else {
        variants.emplace_back("base", cfg.model);
    }

    const std::string wu = rate_unit(cfg.model);
    CsvTable spectrum({{"variant", "", "", "model variant"},
                       {"omega", "omega", wu, "interaction-picture frequency"},
                       {"abs_T31", "|T31|", "1", "conversion amplitude cavity 1 -> cavity 2"},
                       {"arg_T31", "arg T31", "rad", "conversion phase"},
                       {"abs_T32", "|T32|", "1", "mechanical noise amplitude"},
                       {"abs_T33", "|T33|", "1", "cavity 2 reflection amplitude"},
                       {"abs_signal", "|sqrt(nu1 nu2) T31|", "1", "port-to-port signal amplitude"},
                       {"snr", "SNR", "1", "nu1 |T31| / (|T32| sqrt(n_th_m))"}});
    json summary = json::object();
    json per_variant = json::array();

    std::optional<CsvTable> pulse_table;
    std::optional<CsvTable> probe_table;
    for (const auto& [name, m] : variants) {
        require_valid(m);
        const ConversionMatrix cm = conversion_matrix(m, omega);
        const double n_m = m.mechanics().n_th;
        for (std::size_t k = 0; k < cm.size(); ++k) {
            const auto t31 = cm.t(k, 2, 0), t32 = cm.t(k, 2, 1), t33 = cm.t(k, 2, 2);
            const double snr = n_m > 0.0 ? m.nu(0) * std::abs(t31) / (std::abs(t32) * std::sqrt(n_m))
                                         : std::numeric_limits<double>::infinity();
            spectrum.add_row({name, cm.omega[k], std::abs(t31), std::arg(t31), std::abs(t32), std::abs(t33),
                              std::abs(cm.signal(k)), snr});
        }
        json v = {{"name", name},
                  {"abs_T31_0", std::abs(cm.evaluate(0.0)(2, 0))},
                  {"t31_closed_form", t31_closed_form(m)},
                  {"Gamma", {m.Gamma(0), m.Gamma(1)}},
                  {"impedance_residual", impedance_residual(m)}};
        try {
            const Halfwidth hw = halfwidth(cm);
            v["halfwidth"] = hw.omega;
            v["halfwidth_crossings"] = hw.crossings;
        } catch (const NumericalError& e) {
            v["halfwidth"] = nullptr;
            v["halfwidth_error"] = e.what();
        }
        const NoiseBudget nb = noise_budget(m, 0.0);
        json channels = json::array();
        for (const auto& c : nb.channels) {
            channels.push_back({{"name", c.name},
                                {"abs", std::abs(c.coefficient)},
                                {"abs_approximate", std::abs(c.approximate)},
                                {"occupation", c.occupation}});
        }
        v["noise_budget_0"] = {{"channels", channels},
                               {"total_weight", nb.total_weight},
                               {"mechanical_to_signal", nb.mechanical_to_signal},
                               {"snr", std::isfinite(nb.snr) ? json(nb.snr) : json("inf")}};

        if (p.contains("pulse")) {
            ProtocolSpec spec;
            spec.kind = ProtocolKind::itinerant;
            spec.pulse = pulse_from_json(p.at("pulse"), "/spectrum/pulse");
            const ProtocolResult r = run_itinerant(m, spec);
            if (!pulse_table) {
                const std::string tu = time_unit(m);
                pulse_table = CsvTable({{"variant", "", "", "model variant"},
                                        {"t", "t", tu, "time"},
                                        {"in_re", "Re<a_in1>", "sqrt(quanta/time)", "input mean field, port 1"},
                                        {"in_im", "Im<a_in1>", "sqrt(quanta/time)", "input mean field, port 1"},
                                        {"out_re", "Re<a_out2>", "sqrt(quanta/time)", "output mean field, port 2"},
                                        {"out_im", "Im<a_out2>", "sqrt(quanta/time)", "output mean field, port 2"},
                                        {"abs_in", "|<a_in1>|", "sqrt(quanta/time)", "input magnitude"},
                                        {"abs_out", "|<a_out2>|", "sqrt(quanta/time)", "output magnitude"}});
            }
            for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
                const auto in = spec.pulse->at(r.trajectory.t[k]);
                const auto out = r.trajectory.output[k](2);
                pulse_table->add_row({name, r.trajectory.t[k], in.real(), in.imag(), out.real(), out.imag(),
                                      std::abs(in), std::abs(out)});
            }
            v["pulse"] = r.metrics_json();
        }
        if (p.contains("probe")) {
            const json& pr = p.at("probe");
            check_keys(pr, {"cavity", "coupling", "omega"}, "/spectrum/probe");
            const int cavity = pr.value("cavity", 0);
            const std::vector<double> w =
                pr.contains("omega") ? grid_from_json(pr.at("omega"), "/spectrum/probe/omega") : omega;
            const ProbeSpectrum ps = probe_spectrum(m, cavity, w, pr.value("coupling", 0.5));
            if (!probe_table) {
                probe_table = CsvTable({{"variant", "", "", "model variant"},
                                        {"omega", "omega", wu, "probe detuning from the cavity resonance"},
                                        {"transmission", "|t|^2", "1", "probe power transmission"}});
            }
            for (std::size_t k = 0; k < ps.omega.size(); ++k) probe_table->add_row({name, ps.omega[k], ps.transmission[k]});
            json maxima = json::array(), minima = json::array();
            for (auto k : ps.maxima) maxima.push_back(ps.omega[k]);
            for (auto k : ps.minima) minima.push_back(ps.omega[k]);
            v["probe"] = {{"cavity", cavity}, {"maxima", maxima}, {"minima", minima}};
        }
        per_variant.push_back(v);
    }
    const json context = {{"units", std::string(to_string(cfg.model.units))}};
    spectrum.write(dir, "spectrum", context);
    if (pulse_table) pulse_table->write(dir, "pulse", context);
    if (probe_table) probe_table->write(dir, "probe", context);
    summary["variants"] = per_variant;
    return summary;
}

// ---------------------------------------------------------------- protocol

void write_protocol(const ProtocolResult& r, const TransducerModel& m, const ProtocolSpec& spec,
                    const std::filesystem::path& dir) {
    const std::string tu = time_unit(m), wu = rate_unit(m);
    if (r.trajectory.size() > 0) {
        trajectory_table(r.trajectory, tu).write(dir, "trajectory", {{"modes", {"cavity1", "mechanics", "cavity2"}}});
        CsvTable sched({{"t", "t", tu, "time"},
                        {"g1", "g1", wu, "coupling cavity 1 - mechanics"},
                        {"g2", "g2", wu, "coupling cavity 2 - mechanics"},
                        {"delta1", "delta1", wu, "interaction-picture detuning, cavity 1"},
                        {"delta2", "delta2", wu, "interaction-picture detuning, cavity 2"}});
        for (double t : r.trajectory.t) {
            const Controls c = r.schedule.empty() ? model_controls(m) : r.schedule.at(t);
            sched.add_row({t, c.g1, c.g2, c.delta1, c.delta2});
        }
        sched.write(dir, "schedule");
    }
    if (!r.dark_overlap.empty()) {
        CsvTable dark({{"t", "t", tu, "time"},
                       {"dark_overlap", "<d^dag d>/sum<a^dag a>", "1", "share of quanta in the instantaneous dark mode"}});
        for (std::size_t k = 0; k < r.dark_overlap.size(); ++k) dark.add_row({r.trajectory.t[k], r.dark_overlap[k]});
        dark.write(dir, "dark_overlap");
    }
    if (r.kind == ProtocolKind::itinerant && spec.pulse) {
        CsvTable pulse({{"t", "t", tu, "time"},
                        {"in_re", "Re<a_in1>", "sqrt(quanta/time)", "input mean field, port 1"},
                        {"in_im", "Im<a_in1>", "sqrt(quanta/time)", "input mean field, port 1"},
                        {"out_re", "Re<a_out2>", "sqrt(quanta/time)", "output mean field, port 2"},
                        {"out_im", "Im<a_out2>", "sqrt(quanta/time)", "output mean field, port 2"}});
        for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
            const auto in = spec.pulse->at(r.trajectory.t[k]);
            const auto out = r.trajectory.output[k](2);
            pulse.add_row({r.trajectory.t[k], in.real(), in.imag(), out.real(), out.imag()});
        }
        pulse.write(dir, "pulse");
    }
    json fin;
    const auto& s = r.final_state;
    fin["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
    json cov = json::array();
    for (int i = 0; i < s.cov.rows(); ++i) {
        std::vector<double> row(s.cov.cols());
        for (int j = 0; j < s.cov.cols(); ++j) row[j] = s.cov(i, j);
        cov.push_back(row);
    }
    fin["cov"] = cov;
    fin["modes"] = {"cavity1", "mechanics", "cavity2"};
    write_json(dir / "final_state.json", fin);
    json metrics = r.metrics_json();
    metrics["units"] = {{"time", tu}, {"rate", wu}, {"temperature", temperature_unit(m)}};
    write_json(dir / "metrics.json", metrics);
}

json run_protocol_task(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    json block = cfg.params;
    const ProtocolSpec spec = protocol_spec_from_json(block, "/protocol");
    const ProtocolResult r = run_protocol(cfg.model, spec);
    write_protocol(r, cfg.model, spec, dir);
    return r.metrics_json();
}

// ---------------------------------------------------------------- sweep

MetricList filtered(const MetricList& all, const std::vector<std::string>& keep) {
    if (keep.empty()) return all;
    MetricList out;
    for (const auto& name : keep) {
        for (const auto& m : all) {
            if (m.first == name) out.push_back(m);
        }
    }
    return out;
}

Cell axis_cell(const SweepAxis& axis, const json& v) {
    if (axis.name == "state") return state_label(v);
    if (v.is_string()) return v.get<std::string>();
    return v.get<double>();
}

json run_sweep_task(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const SweepPlan plan = sweep_plan_from_json(cfg.params);
    SweepOutput out = run_sweep(cfg.model, plan);
    const json context = {{"units", std::string(to_string(cfg.model.units))}, {"evaluator", plan.evaluator}};
    out.long_table.write(dir, "sweep", context);
    out.wide_table.write(dir, "sweep_wide", context);
    return out.summary;
}

// ---------------------------------------------------------------- search

json run_search_task(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    json p = cfg.params;
    const std::string mode = p.value("mode", "optimize");
    if (mode == "match_impedance") {
        check_keys(p, {"mode", "free", "bounds", "numeric"}, "/search");
        if (!p.contains("free") || !p.at("free").is_string()) throw ConfigError("missing 'free'", "/search/free");
        const json& b = p.value("bounds", json());
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
            throw ConfigError("'bounds' must be [lower, upper]", "/search/bounds");
        }
        const MatchResult r = match_impedance(cfg.model, p.at("free").get<std::string>(), b[0].get<double>(),
                                              b[1].get<double>(), p.value("numeric", false));
        json result = {{"mode", mode},
                       {"free", p.at("free")},
                       {"value", r.value},
                       {"residual", r.residual},
                       {"closed_form", r.closed_form},
                       {"iterations", r.iterations},
                       {"Gamma", {r.model.Gamma(0), r.model.Gamma(1)}}};
        write_json(dir / "result.json", result);
        write_json(dir / "model.json", to_json(r.model));
        return result;
    }
    if (mode != "optimize") throw ConfigError("unknown search mode '" + mode + "'", "/search/mode");
    p.erase("mode");
    SearchProblem problem = search_problem_from_json(p, cfg.model, "/search");
    problem.seed = cfg.seed;
    const SearchResult r = optimize(problem);

    std::vector<Column> cols{{"start", "", "", "multi-start index"}, {"evaluation", "", "", "evaluation count within start"}};
    for (const auto& f : problem.free) cols.push_back({f.name, f.name, "", "free parameter"});
    cols.push_back({"objective", std::string(to_string(problem.objective)), "1", "objective value (nan = rejected)"});
    CsvTable trace(cols);
    for (const auto& e : r.trace) {
        std::vector<Cell> row{static_cast<double>(e.start), static_cast<double>(e.evaluation)};
        for (double x : e.x) row.emplace_back(x);
        row.emplace_back(e.objective);
        trace.add_row(std::move(row));
    }
    trace.write(dir, "trace", {{"seed", cfg.seed}, {"objective", std::string(to_string(problem.objective))}});

    json best = json::object();
    for (std::size_t i = 0; i < problem.free.size(); ++i) best[problem.free[i].name] = r.best[i];
    json result = {{"mode", mode},
                   {"objective", std::string(to_string(problem.objective))},
                   {"maximized", maximized(problem.objective)},
                   {"best", best},
                   {"value", r.objective},
                   {"evaluations", r.evaluations},
                   {"best_start", r.best_start},
                   {"converged", r.converged},
                   {"seed", cfg.seed}};
    write_json(dir / "result.json", result);
    write_json(dir / "model.json", to_json(r.model));
    return result;
}

// ---------------------------------------------------------------- validate

json run_validate(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const ValidationReport rep = validate_model(cfg.model);
    if (!rep.ok()) {
        std::string msg = "model validation failed:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw PhysicsError(msg);
    }
    const json s = model_summary(cfg.model);
    write_json(dir / "validation.json", s);
    write_json(dir / "model.json", to_json(cfg.model));
    return s["validation"];
}

}  // namespace

std::vector<std::string> sweep_axis_names() {
    std::vector<std::string> v = parameter_names();
    v.emplace_back("state");
    v.emplace_back("protocol");
    return v;
}

std::vector<std::string> sweep_evaluators() {
    std::vector<std::string> v = protocol_names();
    v.emplace_back("protocol");
    v.emplace_back("precool_comparison");
    v.emplace_back("conversion");
    return v;
}

std::string state_label(const json& state) {
    single_mode_state_from_json(state, "/state");
    auto part = [&](const char* key) {
        if (!state.contains(key)) return std::string("0");
        const json& v = state.at(key);
        if (v.is_number()) return format_number(v.get<double>());
        if (v.is_array() && v.size() == 2) {
            return format_number(v[0].get<double>()) + (v[1].get<double>() < 0 ? "" : "+") +
                   format_number(v[1].get<double>()) + "i";
        }
        return format_number(v.value("re", 0.0)) + (v.value("im", 0.0) < 0 ? "" : "+") +
               format_number(v.value("im", 0.0)) + "i";
    };
    return "alpha=" + part("alpha") + ";r0=" + part("r0");
}

SweepPlan sweep_plan_from_json(const json& j, const std::string& where) {
    check_keys(j, {"evaluator", "protocol", "axes", "metrics"}, where);
    SweepPlan plan;
    if (j.contains("evaluator")) {
        if (!j.at("evaluator").is_string()) throw ConfigError("'evaluator' must be a string", where + "/evaluator");
        plan.evaluator = j.at("evaluator").get<std::string>();
    }
    const auto evals = sweep_evaluators();
    if (std::find(evals.begin(), evals.end(), plan.evaluator) == evals.end()) {
        std::string list;
        for (const auto& e : evals) list += (list.empty() ? "" : ", ") + e;
        throw ConfigError("unknown evaluator '" + plan.evaluator + "' (valid: " + list + ")", where + "/evaluator");
    }
    if (j.contains("protocol")) {
        plan.protocol = protocol_spec_from_json(j.at("protocol"), where + "/protocol");
    }
    if (j.contains("metrics")) plan.metrics = j.at("metrics").get<std::vector<std::string>>();
    if (j.contains("axes")) {
        const json& axes = j.at("axes");
        if (!axes.is_array()) throw ConfigError("'axes' must be an array", where + "/axes");
        const auto valid = sweep_axis_names();
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const std::string at = where + "/axes/" + std::to_string(k);
            check_keys(axes[k], {"name", "values", "range"}, at);
            SweepAxis a;
            if (!axes[k].contains("name") || !axes[k].at("name").is_string()) {
                throw ConfigError("axis needs a 'name'", at + "/name");
            }
            a.name = axes[k].at("name").get<std::string>();
            if (std::find(valid.begin(), valid.end(), a.name) == valid.end()) {
                std::string list;
                for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
                throw ConfigError("unknown sweep parameter '" + a.name + "' (valid: " + list + ")", at + "/name");
            }
            if (axes[k].contains("range")) {
                for (double v : grid_from_json(axes[k].at("range"), at + "/range")) a.values.emplace_back(v);
            } else if (axes[k].contains("values")) {
                if (!axes[k].at("values").is_array()) throw ConfigError("'values' must be an array", at + "/values");
                for (const auto& v : axes[k].at("values")) a.values.push_back(v);
            } else {
                throw ConfigError("axis needs 'values' or 'range'", at);
            }
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                const std::string vat = at + "/values/" + std::to_string(i);
                const json& v = a.values[i];
                if (a.name == "state") {
                    single_mode_state_from_json(v, vat);
                } else if (a.name == "protocol") {
                    if (!v.is_string()) throw ConfigError("protocol axis values are names", vat);
                    try {
                        protocol_from_string(v.get<std::string>());
                    } catch (const ConfigError& e) {
                        throw ConfigError(e.what(), vat);
                    }
                } else if (!v.is_number()) {
                    throw ConfigError("expected a number", vat);
                }
            }
            plan.axes.push_back(std::move(a));
        }
    }
    double points = 1.0;
    for (const auto& a : plan.axes) points *= static_cast<double>(a.values.size());
    if (points > 1e6) throw ConfigError("sweep grid exceeds 1e6 points", where + "/axes");
    return plan;
}

MetricList evaluate_point(const std::string& evaluator, const TransducerModel& model, const ProtocolSpec& spec) {
    if (evaluator == "precool_comparison") {
        ProtocolSpec s = spec;
        s.kind = ProtocolKind::double_swap;
        const ProtocolResult plain = run_double_swap(model, s);
        s.kind = ProtocolKind::precooled_double_swap;
        const ProtocolResult pre = run_precooled_double_swap(model, s);
        return {{"F_plain", plain.metric("fidelity")},
                {"F_precooled", pre.metric("fidelity")},
                {"T_eff", pre.metric("effective_temperature")},
                {"n_mechanics_after_precool", pre.metric("n_mechanics_after_precool")},
                {"n_th_m", model.mechanics().n_th}};
    }
    if (evaluator == "conversion") {
        require_valid(model);
        const double w[] = {0.0};
        const ConversionMatrix cm = conversion_matrix(model, w, Exec::serial);
        const NoiseBudget nb = noise_budget(model, 0.0);
        MetricList out{{"abs_T31_0", std::abs(cm.t(0, 2, 0))},
                       {"t31_closed_form", t31_closed_form(model)},
                       {"mechanical_to_signal", nb.mechanical_to_signal},
                       {"snr", nb.snr},
                       {"impedance_residual", impedance_residual(model)}};
        const std::vector<double> grid = linspace(0.0, 20.0 * (model.Gamma(0) + model.Gamma(1) + model.gamma_m() +
                                                               model.kappa(0) + model.kappa(1)),
                                                  4001);
        try {
            out.emplace_back("halfwidth", halfwidth(conversion_matrix(model, grid, Exec::serial)).omega);
        } catch (const NumericalError&) {
            out.emplace_back("halfwidth", std::numeric_limits<double>::quiet_NaN());
        }
        return out;
    }
    ProtocolSpec s = spec;
    if (evaluator != "protocol") s.kind = protocol_from_string(evaluator);
    const ProtocolResult r = run_protocol(model, s);
    MetricList out = r.metrics;
    if (r.kind != ProtocolKind::itinerant && r.kind != ProtocolKind::entangle_red_blue) {
        out.emplace_back("n_th_m", model.mechanics().n_th);
    }
    return out;
}

SweepOutput run_sweep(const TransducerModel& model, const SweepPlan& plan) {
    std::size_t total = 1;
    for (const auto& a : plan.axes) total *= a.values.size();

    struct Point {
        std::vector<std::size_t> index;
        MetricList metrics;
        std::string error;
    };
    std::vector<Point> points(total);
    for_each_index(total, Exec::parallel, [&](std::size_t flat) {
        Point& pt = points[flat];
        pt.index.resize(plan.axes.size());
        std::size_t rem = flat;
        for (std::size_t a = plan.axes.size(); a-- > 0;) {
            pt.index[a] = rem % plan.axes[a].values.size();
            rem /= plan.axes[a].values.size();
        }
        TransducerModel m = model;
        ProtocolSpec spec = plan.protocol;
        try {
            for (std::size_t a = 0; a < plan.axes.size(); ++a) {
                const SweepAxis& axis = plan.axes[a];
                const json& v = axis.values[pt.index[a]];
                if (axis.name == "state") {
                    spec.input = single_mode_state_from_json(v);
                } else if (axis.name == "protocol") {
                    spec.kind = protocol_from_string(v.get<std::string>());
                } else {
                    apply_parameter(m, spec, axis.name, v.get<double>());
                }
            }
            const bool has_protocol_axis = std::any_of(plan.axes.begin(), plan.axes.end(),
                                                       [](const SweepAxis& a) { return a.name == "protocol"; });
            const std::string evaluator = has_protocol_axis ? "protocol" : plan.evaluator;
            pt.metrics = filtered(evaluate_point(evaluator, m, spec), plan.metrics);
            pt.metrics.insert(pt.metrics.begin(), {"ok", 1.0});
        } catch (const Error& e) {
            pt.metrics = {{"ok", 0.0}};
            pt.error = e.what();
        }
    });

    std::vector<Column> axis_cols;
    for (const auto& a : plan.axes) axis_cols.push_back({a.name, a.name, "", "sweep axis"});

    std::vector<Column> long_cols = axis_cols;
    long_cols.push_back({"metric", "", "", "metric name"});
    long_cols.push_back({"value", "", "", "metric value (unit per metric, see summary)"});
    SweepOutput out;
    out.long_table = CsvTable(long_cols);

    std::vector<std::string> metric_names;
    for (const auto& pt : points) {
        for (const auto& [name, _] : pt.metrics) {
            if (std::find(metric_names.begin(), metric_names.end(), name) == metric_names.end()) {
                metric_names.push_back(name);
            }
        }
    }
    if (metric_names.empty()) metric_names.push_back("ok");
    std::vector<Column> wide_cols = axis_cols;
    for (const auto& n : metric_names) wide_cols.push_back({n, n, "", "metric"});
    out.wide_table = CsvTable(wide_cols);

    json errors = json::array();
    for (std::size_t flat = 0; flat < points.size(); ++flat) {
        const Point& pt = points[flat];
        std::vector<Cell> axes;
        for (std::size_t a = 0; a < plan.axes.size(); ++a) {
            axes.push_back(axis_cell(plan.axes[a], plan.axes[a].values[pt.index[a]]));
        }
        for (const auto& [name, value] : pt.metrics) {
            std::vector<Cell> row = axes;
            row.emplace_back(name);
            row.emplace_back(value);
            out.long_table.add_row(std::move(row));
        }
        std::vector<Cell> wide = axes;
        for (const auto& n : metric_names) {
            double v = std::numeric_limits<double>::quiet_NaN();
            for (const auto& [name, value] : pt.metrics) {
                if (name == n) v = value;
            }
            wide.emplace_back(v);
        }
        out.wide_table.add_row(std::move(wide));
        if (!pt.error.empty()) errors.push_back({{"point", flat}, {"error", pt.error}});
    }
    out.summary = {{"evaluator", plan.evaluator}, {"points", total}, {"metrics", metric_names}, {"errors", errors}};
    return out;
}

json run_task(const ExperimentConfig& config, const std::filesystem::path& dir) {
    switch (config.task) {
        case Task::spectrum: return run_spectrum(config, dir);
        case Task::protocol: return run_protocol_task(config, dir);
        case Task::sweep: return run_sweep_task(config, dir);
        case Task::search: return run_search_task(config, dir);
        case Task::validate: return run_validate(config, dir);
    }
    throw ConfigError("unknown task");
}

}  // namespace oemt::cli
