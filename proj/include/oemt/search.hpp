#pragma once

// Parameter search: closed-form impedance matching and a bounded
// Nelder-Mead simplex with seeded multi-start.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "oemt/model.hpp"
#include "oemt/protocols.hpp"

namespace oemt {

/// Names accepted by apply_parameter.
std::vector<std::string> parameter_names();

/// Sets a named model or protocol parameter:
///   g1, g2, g2_over_g1, kappa1, kappa2 (fixed nu), kappa1_ext, kappa2_ext,
///   gamma_m, n_th_m, temperature (all bath occupations from the Bose law),
///   T_f, delta_offset, delay, precool_duration.
/// Throws ConfigError for unknown names.
void apply_parameter(TransducerModel& model, ProtocolSpec& spec, const std::string& name, double value);

struct MatchResult {
    TransducerModel model;
    double value = 0.0;      // chosen value of the free parameter
    double residual = 0.0;   // |Gamma1 - Gamma2| / (Gamma1 + Gamma2)
    bool closed_form = false;
    int iterations = 0;
};

/// Tunes one of g1, g2, kappa1_ext, kappa2_ext so that Gamma1 = Gamma2.
/// `numeric` forces the bisection path. Throws PhysicsError when the bounds
/// hold no matching point (reporting the residual at both ends).
MatchResult match_impedance(const TransducerModel& model, const std::string& free, double lower, double upper,
                            bool numeric = false);

enum class Objective { t31_zero, pulse_efficiency, protocol_fidelity, impedance_residual };

std::string_view to_string(Objective objective);
Objective objective_from_string(std::string_view name);
/// True for objectives that are maximized.
bool maximized(Objective objective);

struct FreeParameter {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> start;
};

struct SearchProblem {
    TransducerModel baseline;
    ProtocolSpec protocol;  // used by pulse_efficiency and protocol_fidelity
    Objective objective = Objective::t31_zero;
    std::vector<FreeParameter> free;
    int starts = 1;
    std::uint64_t seed = 0;
    int max_evaluations = 2000;  // per start
    double tolerance = 1e-6;     // simplex size in bound-normalized coordinates
};

struct TraceEntry {
    int start = 0;
    int evaluation = 0;
    std::vector<double> x;
    double objective = 0.0;  // NaN when the candidate was rejected
};

struct SearchResult {
    std::vector<double> best;
    double objective = 0.0;
    int evaluations = 0;
    int best_start = 0;
    bool converged = false;
    std::vector<TraceEntry> trace;
    TransducerModel model;   // baseline with `best` applied
    ProtocolSpec protocol;
};

/// Objective value (natural sign) at x.
double evaluate_objective(const SearchProblem& problem, const std::vector<double>& x);

SearchResult optimize(const SearchProblem& problem);

SearchProblem search_problem_from_json(const nlohmann::json& j, const TransducerModel& baseline,
                                       const std::string& where = "");

}  // namespace oemt
