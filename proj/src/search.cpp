#include "oemt/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "oemt/errors.hpp"
#include "oemt/metrics.hpp"
#include "oemt/parallel.hpp"
#include "oemt/scattering.hpp"

namespace oemt {

namespace {

const char* const names[] = {"g1",         "g2",      "g2_over_g1", "kappa1",      "kappa2",
                             "kappa1_ext", "kappa2_ext", "gamma_m", "n_th_m",     "temperature",
                             "T_f",        "delta_offset", "delay", "precool_duration"};

double gamma_gap(const TransducerModel& m) { return m.Gamma(0) - m.Gamma(1); }

std::string residual_message(const std::string& free, double lo, double hi, double r_lo, double r_hi) {
    std::ostringstream os;
    os << "no impedance-matching point for " << free << " in [" << lo << ", " << hi << "]: residual " << r_lo
       << " at the lower bound, " << r_hi << " at the upper bound";
    return os.str();
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Vertex {
    std::vector<double> u;  // normalized coordinates in [0, 1]
    std::vector<double> x;
    double f = 0.0;         // minimized
};

bool better(const Vertex& a, const Vertex& b) {
    if (a.f != b.f) return a.f < b.f;
    return lex_less(a.x, b.x);
}

constexpr double failed_value = 1e300;
constexpr double pi = std::numbers::pi;

struct StartResult {
    Vertex best;
    int evaluations = 0;
    bool converged = false;
    std::vector<TraceEntry> trace;
};

}  // namespace

std::vector<std::string> parameter_names() { return {std::begin(names), std::end(names)}; }

void apply_parameter(TransducerModel& model, ProtocolSpec& spec, const std::string& name, double value) {
    if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' must be finite");
    if (name == "g1") {
        model.set_g(0, value);
    } else if (name == "g2") {
        model.set_g(1, value);
    } else if (name == "g2_over_g1") {
        model.set_g(1, value * model.g(0));
    } else if (name == "kappa1") {
        model.set_kappa(0, value);
    } else if (name == "kappa2") {
        model.set_kappa(1, value);
    } else if (name == "kappa1_ext") {
        model.set_kappa_ext(0, value);
    } else if (name == "kappa2_ext") {
        model.set_kappa_ext(1, value);
    } else if (name == "gamma_m") {
        model.set_gamma_m(value);
    } else if (name == "n_th_m") {
        model.mechanics().n_th = value;
    } else if (name == "temperature") {
        for (auto& mode : model.modes) {
            if (mode.frequency > 0.0) mode.n_th = bose_occupation(value, mode.frequency, model.units);
        }
    } else if (name == "T_f") {
        spec.T_f = value;
    } else if (name == "delta_offset") {
        spec.delta_offset = value;
    } else if (name == "delay") {
        spec.delay = value;
    } else if (name == "precool_duration") {
        spec.precool_duration = value;
    } else {
        std::string list;
        for (const char* n : names) list += std::string(list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown parameter '" + name + "' (valid: " + list + ")");
    }
}

MatchResult match_impedance(const TransducerModel& model, const std::string& free, double lower, double upper,
                            bool numeric) {
    require_valid(model);
    if (free != "g1" && free != "g2" && free != "kappa1_ext" && free != "kappa2_ext") {
        throw ConfigError("match_impedance frees one of g1, g2, kappa1_ext, kappa2_ext (got '" + free + "')");
    }
    if (!(lower <= upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw ConfigError("match_impedance needs finite bounds with lower <= upper");
    }
    MatchResult r;
    r.model = model;
    ProtocolSpec dummy;
    auto current = [&]() -> double {
        if (free == "g1") return model.g(0);
        if (free == "g2") return model.g(1);
        if (free == "kappa1_ext") return model.cavity(0).kappa_ext;
        return model.cavity(1).kappa_ext;
    };
    if (impedance_residual(model) < 1e-12 && current() >= lower && current() <= upper) {
        r.value = current();
        r.residual = impedance_residual(model);
        r.closed_form = true;
        return r;
    }

    auto residual_at = [&](double v) {
        TransducerModel m = model;
        apply_parameter(m, dummy, free, v);
        return impedance_residual(m);
    };

    if (!numeric) {
        double v = std::numeric_limits<double>::quiet_NaN();
        if (free == "g1") v = 0.5 * std::sqrt(model.Gamma(1) * model.kappa(0));
        if (free == "g2") v = 0.5 * std::sqrt(model.Gamma(0) * model.kappa(1));
        if (free == "kappa1_ext" && model.Gamma(1) > 0.0) {
            v = 4.0 * model.g(0) * model.g(0) / model.Gamma(1) - model.cavity(0).kappa_in;
        }
        if (free == "kappa2_ext" && model.Gamma(0) > 0.0) {
            v = 4.0 * model.g(1) * model.g(1) / model.Gamma(0) - model.cavity(1).kappa_in;
        }
        if (std::isfinite(v) && v >= lower && v <= upper && v >= 0.0) {
            apply_parameter(r.model, dummy, free, v);
            r.value = v;
            r.residual = impedance_residual(r.model);
            r.closed_form = true;
            if (r.residual < 1e-8) return r;
        }
        if (!(std::isfinite(v) && v >= lower && v <= upper)) {
            throw PhysicsError(residual_message(free, lower, upper, residual_at(lower), residual_at(upper)));
        }
    }

    // Bisection on the signed gap Gamma1 - Gamma2.
    auto gap = [&](double v) {
        TransducerModel m = model;
        apply_parameter(m, dummy, free, v);
        return gamma_gap(m);
    };
    double a = lower, b = upper;
    double fa = gap(a), fb = gap(b);
    if (fa == 0.0 || fb == 0.0) {
        b = a = fa == 0.0 ? a : b;
    } else if ((fa > 0.0) == (fb > 0.0)) {
        throw PhysicsError(residual_message(free, lower, upper, residual_at(lower), residual_at(upper)));
    }
    int it = 0;
    while (b - a > 1e-15 * std::max(std::abs(a), std::abs(b)) && it < 400) {
        const double c = 0.5 * (a + b);
        const double fc = gap(c);
        if (fc == 0.0) {
            a = b = c;
            break;
        }
        if ((fc > 0.0) == (fa > 0.0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
        ++it;
    }
    r.value = 0.5 * (a + b);
    r.model = model;
    apply_parameter(r.model, dummy, free, r.value);
    r.residual = impedance_residual(r.model);
    r.closed_form = false;
    r.iterations = it;
    return r;
}

std::string_view to_string(Objective o) {
    switch (o) {
        case Objective::t31_zero: return "t31_zero";
        case Objective::pulse_efficiency: return "pulse_efficiency";
        case Objective::protocol_fidelity: return "protocol_fidelity";
        case Objective::impedance_residual: return "impedance_residual";
    }
    return "unknown";
}

Objective objective_from_string(std::string_view name) {
    for (Objective o : {Objective::t31_zero, Objective::pulse_efficiency, Objective::protocol_fidelity,
                        Objective::impedance_residual}) {
        if (name == to_string(o)) return o;
    }
    throw ConfigError("unknown objective '" + std::string(name) +
                      "' (expected t31_zero, pulse_efficiency, protocol_fidelity, impedance_residual)");
}

bool maximized(Objective o) { return o != Objective::impedance_residual; }

double evaluate_objective(const SearchProblem& problem, const std::vector<double>& x) {
    TransducerModel m = problem.baseline;
    ProtocolSpec spec = problem.protocol;
    for (std::size_t i = 0; i < problem.free.size(); ++i) apply_parameter(m, spec, problem.free[i].name, x[i]);
    require_valid(m);
    switch (problem.objective) {
        case Objective::t31_zero:
            return std::abs(conversion_matrix_at(coupling_matrix(m), damping_vector(m), 0.0)(2, 0));
        case Objective::pulse_efficiency: {
            spec.kind = ProtocolKind::itinerant;
            return run_itinerant(m, spec).metric("efficiency_time");
        }
        case Objective::protocol_fidelity: return run_protocol(m, spec).metric("fidelity");
        case Objective::impedance_residual: return impedance_residual(m);
    }
    return 0.0;
}

SearchResult optimize(const SearchProblem& problem) {
    const std::size_t n = problem.free.size();
    for (const auto& p : problem.free) {
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower <= p.upper)) {
            throw ConfigError("search bounds for '" + p.name + "' must be finite with lower <= upper");
        }
        TransducerModel m = problem.baseline;
        ProtocolSpec s = problem.protocol;
        apply_parameter(m, s, p.name, p.lower);  // rejects unknown names early
    }
    if (problem.starts < 1) throw ConfigError("search needs starts >= 1");
    const double sign = maximized(problem.objective) ? -1.0 : 1.0;
    gsl_set_error_handler_off();

    SearchResult result;
    result.protocol = problem.protocol;
    if (n == 0) {
        result.objective = evaluate_objective(problem, {});
        result.evaluations = 1;
        result.converged = true;
        result.model = problem.baseline;
        result.trace.push_back({0, 1, {}, result.objective});
        return result;
    }

    auto to_x = [&](const std::vector<double>& u) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ui = std::clamp(u[i], 0.0, 1.0);
            x[i] = problem.free[i].lower + ui * (problem.free[i].upper - problem.free[i].lower);
            x[i] = std::clamp(x[i], problem.free[i].lower, problem.free[i].upper);
        }
        return x;
    };

    // Start points: the declared start (or box centre), then seeded uniform draws.
    std::vector<std::vector<double>> starts(problem.starts, std::vector<double>(n));
    std::mt19937_64 rng(problem.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = problem.free[i];
        const double w = p.upper - p.lower;
        starts[0][i] = p.start && w > 0.0 ? std::clamp((*p.start - p.lower) / w, 0.0, 1.0) : 0.5;
    }
    for (int s = 1; s < problem.starts; ++s) {
        for (std::size_t i = 0; i < n; ++i) starts[s][i] = unit(rng);
    }

    std::vector<StartResult> runs(problem.starts);
    for_each_index(starts.size(), Exec::parallel, [&](std::size_t s) {
        StartResult& run = runs[s];
        // y is unconstrained; u = (1 - cos(pi y)) / 2 stays in [0, 1]
        auto eval = [&](const double* y) {
            std::vector<double> u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = 0.5 * (1.0 - std::cos(pi * y[i]));
            Vertex v{u, to_x(u), 0.0};
            double f;
            try {
                f = evaluate_objective(problem, v.x);
            } catch (const Error& e) {
                if (run.evaluations == 0) {
                    std::ostringstream os;
                    os << e.what() << " (at start point";
                    for (std::size_t i = 0; i < n; ++i) os << ' ' << problem.free[i].name << '=' << v.x[i];
                    os << ')';
                    if (dynamic_cast<const PhysicsError*>(&e)) throw PhysicsError(os.str());
                    if (dynamic_cast<const NumericalError*>(&e)) throw NumericalError(os.str());
                    throw ConfigError(os.str());
                }
                f = std::numeric_limits<double>::quiet_NaN();
            }
            ++run.evaluations;
            run.trace.push_back({static_cast<int>(s), run.evaluations, v.x, f});
            v.f = std::isnan(f) ? std::numeric_limits<double>::infinity() : sign * f;
            if (run.evaluations == 1 || better(v, run.best)) run.best = v;
            return v.f;
        };
        struct Call {
            decltype(eval)* run;
            std::exception_ptr error;
        } call{&eval, nullptr};
        gsl_multimin_function fn;
        fn.n = n;
        fn.params = &call;
        fn.f = [](const gsl_vector* v, void* params) -> double {
            auto& c = *static_cast<Call*>(params);
            if (c.error) return std::numeric_limits<double>::quiet_NaN();
            try {
                // nmsimplex2 rejects non-finite values
                return std::min((*c.run)(v->data), failed_value);
            } catch (...) {
                c.error = std::current_exception();
                return std::numeric_limits<double>::quiet_NaN();
            }
        };

        gsl_vector* x0 = gsl_vector_alloc(n);
        gsl_vector* step = gsl_vector_alloc(n);
        for (std::size_t i = 0; i < n; ++i) {
            gsl_vector_set(x0, i, std::acos(1.0 - 2.0 * starts[s][i]) / pi);
            gsl_vector_set(step, i, starts[s][i] < 0.5 ? 0.1 : -0.1);
        }
        gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
        int status = gsl_multimin_fminimizer_set(nm, &fn, x0, step);
        while (status == GSL_SUCCESS && run.evaluations < problem.max_evaluations) {
            status = gsl_multimin_fminimizer_iterate(nm);
            if (status != GSL_SUCCESS) break;
            if (gsl_multimin_fminimizer_size(nm) < problem.tolerance) {
                run.converged = true;
                break;
            }
        }
        gsl_multimin_fminimizer_free(nm);
        gsl_vector_free(step);
        gsl_vector_free(x0);
        if (call.error) std::rethrow_exception(call.error);
    });

    std::size_t best = 0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        result.evaluations += runs[s].evaluations;
        result.trace.insert(result.trace.end(), runs[s].trace.begin(), runs[s].trace.end());
        if (s > 0 && better(runs[s].best, runs[best].best)) best = s;
    }
    result.best = runs[best].best.x;
    result.objective = sign * runs[best].best.f;
    result.best_start = static_cast<int>(best);
    result.converged = runs[best].converged;
    result.model = problem.baseline;
    for (std::size_t i = 0; i < n; ++i) apply_parameter(result.model, result.protocol, problem.free[i].name, result.best[i]);
    return result;
}

SearchProblem search_problem_from_json(const nlohmann::json& j, const TransducerModel& baseline,
                                       const std::string& where) {
    if (!j.is_object()) throw ConfigError("search must be an object", where);
    for (const auto& [key, _] : j.items()) {
        static const char* known[] = {"objective", "free", "starts", "max_evaluations", "tolerance", "protocol"};
        if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown search key '" + key + "'", where + "/" + key);
        }
    }
    SearchProblem p;
    p.baseline = baseline;
    try {
        if (!j.contains("objective")) throw ConfigError("missing 'objective'", where + "/objective");
        try {
            p.objective = objective_from_string(j.at("objective").get<std::string>());
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), where + "/objective");
        }
        if (j.contains("protocol")) p.protocol = protocol_spec_from_json(j.at("protocol"), where + "/protocol");
        if (j.contains("starts")) p.starts = j.at("starts").get<int>();
        if (j.contains("max_evaluations")) p.max_evaluations = j.at("max_evaluations").get<int>();
        if (j.contains("tolerance")) p.tolerance = j.at("tolerance").get<double>();
        if (j.contains("free")) {
            const auto& f = j.at("free");
            if (!f.is_array()) throw ConfigError("'free' must be an array", where + "/free");
            for (std::size_t k = 0; k < f.size(); ++k) {
                const std::string at = where + "/free/" + std::to_string(k);
                FreeParameter fp;
                fp.name = f[k].at("name").get<std::string>();
                const auto& b = f[k].at("bounds");
                if (!b.is_array() || b.size() != 2) throw ConfigError("'bounds' must be [lower, upper]", at + "/bounds");
                fp.lower = b[0].get<double>();
                fp.upper = b[1].get<double>();
                if (f[k].contains("start")) fp.start = f[k].at("start").get<double>();
                TransducerModel m = baseline;
                ProtocolSpec s;
                try {
                    apply_parameter(m, s, fp.name, fp.lower);
                } catch (const ConfigError& e) {
                    throw ConfigError(e.what(), at + "/name");
                } catch (const Error&) {
                }
                p.free.push_back(fp);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(e.what(), where);
    }
    return p;
}

}  // namespace oemt
