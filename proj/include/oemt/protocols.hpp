#pragma once

// State-conversion and entanglement protocols on the three-mode chain.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oemt/dynamics.hpp"
#include "oemt/gaussian.hpp"
#include "oemt/model.hpp"
#include "oemt/schedule.hpp"

namespace oemt {

enum class ProtocolKind { double_swap, precooled_double_swap, adiabatic_dark_mode, raman, itinerant, entangle_red_blue };

std::string_view to_string(ProtocolKind kind);
ProtocolKind protocol_from_string(std::string_view name);
std::vector<std::string> protocol_names();

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::double_swap;
    /// Single-mode state prepared in cavity 1 (transfer protocols).
    GaussianState input = GaussianState::vacuum(1);

    // adiabatic_dark_mode
    double T_f = 0.0;  // 0 picks 20 pi / g0
    RampKind ramp = RampKind::raised_cosine;
    /// Mechanics and cavity 2 start in the steady state of the initial
    /// controls (g2 is already on at t = 0) instead of their bare baths.
    bool steady_start = true;

    // raman
    double delta_offset = 0.0;

    // precooled_double_swap
    std::optional<double> precool_duration;  // default pi / 2 g1
    double delay = 0.0;                      // idle time between pre-pulse and swaps

    // itinerant
    std::optional<PulseShape> pulse;
    std::optional<double> t_start;
    std::optional<double> t_end;

    // entangle_red_blue
    bool steady_state = true;
    double duration = 0.0;

    int samples = 0;  // 0 picks a per-protocol default
};

ProtocolSpec protocol_spec_from_json(const nlohmann::json& j, const std::string& where = "");
nlohmann::json to_json(const ProtocolSpec& spec);
/// |alpha, r0> from {"alpha": [re, im] | x, "r0": [re, im] | x}.
GaussianState single_mode_state_from_json(const nlohmann::json& j, const std::string& where = "");

struct ProtocolResult {
    ProtocolKind kind = ProtocolKind::double_swap;
    CouplingSchedule schedule;
    Trajectory trajectory;
    GaussianState final_state;
    /// Trace of <d^dag d> / sum_j <a_j^dag a_j> for the instantaneous dark
    /// mode d = (-g2 a1 + g1 a2)/g0 (empty when not applicable).
    std::vector<double> dark_overlap;
    /// Ordered (name, value) pairs.
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> notices;

    bool has(const std::string& name) const;
    double metric(const std::string& name) const;
    void set(const std::string& name, double value);
    nlohmann::json metrics_json() const;
};

ProtocolResult run_double_swap(const TransducerModel& model, const ProtocolSpec& spec);
ProtocolResult run_precooled_double_swap(const TransducerModel& model, const ProtocolSpec& spec);
ProtocolResult run_adiabatic_dark_mode(const TransducerModel& model, const ProtocolSpec& spec);
ProtocolResult run_raman(const TransducerModel& model, const ProtocolSpec& spec);
ProtocolResult run_itinerant(const TransducerModel& model, const ProtocolSpec& spec);
ProtocolResult run_entangle_red_blue(const TransducerModel& model, const ProtocolSpec& spec);

ProtocolResult run_protocol(const TransducerModel& model, const ProtocolSpec& spec);

/// Lossless cavity-1 to cavity-2 amplitude map u of a schedule (a2 = u a1 + ...).
std::complex<double> lossless_transfer(const TransducerModel& model, const CouplingSchedule& schedule);

/// Occupation of the instantaneous dark mode over the total occupation.
double dark_mode_overlap(const GaussianState& state, const Controls& c);

/// [(kappa1 - kappa2) / (4 g0)]^2 with g0 = sqrt(g1^2 + g2^2).
double dark_mode_suppression_factor(const TransducerModel& model);

}  // namespace oemt
