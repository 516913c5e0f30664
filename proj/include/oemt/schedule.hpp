#pragma once

#include <complex>
#include <span>
#include <vector>

#include "json.hpp"

namespace oemt {

/// Instantaneous control values: couplings g1, g2 (real, may be negative)
/// and interaction-picture detunings delta1, delta2.
struct Controls {
    double g1 = 0.0;
    double g2 = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;

    double g0() const;
    Controls operator+(const Controls& o) const { return {g1 + o.g1, g2 + o.g2, delta1 + o.delta1, delta2 + o.delta2}; }
    Controls operator-(const Controls& o) const { return {g1 - o.g1, g2 - o.g2, delta1 - o.delta1, delta2 - o.delta2}; }
    Controls operator*(double s) const { return {g1 * s, g2 * s, delta1 * s, delta2 * s}; }
    double max_abs() const;
    bool operator==(const Controls&) const = default;
};

enum class RampKind { constant, linear, raised_cosine, gaussian };

const char* to_string(RampKind kind);
RampKind ramp_from_string(const std::string& name);

/// One piece of a schedule. `constant` holds `start`; `linear` and
/// `raised_cosine` go from `start` to `end`; `gaussian` is `start` plus a
/// Gaussian bump of height `end - start` centred in the segment with
/// standard deviation `width`.
struct Segment {
    double duration = 0.0;
    RampKind kind = RampKind::constant;
    Controls start;
    Controls end;
    double width = 0.0;

    Controls at(double s) const;  // s in [0, duration]
    /// Upper bound of |d/dt| over the segment, per channel.
    Controls max_rate() const;
};

struct AdiabaticityDiagnostic {
    double max_mixing_rate = 0.0;  // max |d theta / dt|, theta = atan2(g1, -g2)
    double min_g0 = 0.0;
    double ratio = 0.0;            // max_mixing_rate / min_g0; << 1 for adiabatic passage
};

class CouplingSchedule {
public:
    CouplingSchedule() = default;
    explicit CouplingSchedule(double t_start) : t_start_(t_start) {}

    static CouplingSchedule constant(const Controls& c, double duration, double t_start = 0.0);

    CouplingSchedule& append(const Segment& segment);
    CouplingSchedule& hold(const Controls& c, double duration);
    CouplingSchedule& ramp(RampKind kind, const Controls& from, const Controls& to, double duration);

    double t_start() const { return t_start_; }
    double t_end() const;
    double duration() const { return t_end() - t_start_; }
    const std::vector<Segment>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }

    /// Right-continuous evaluation; clamps outside the span.
    Controls at(double t) const;
    /// Segment boundary times, including t_start and t_end.
    std::vector<double> breakpoints() const;
    /// Largest per-channel rate inside [t0, t1].
    Controls max_rate(double t0, double t1) const;
    /// Largest |value| of any channel over the schedule.
    double max_abs() const;
    bool covers(double t0, double t1) const;
    std::vector<Controls> sample(std::span<const double> t_grid) const;

    AdiabaticityDiagnostic adiabaticity(int samples = 2001) const;

private:
    double t_start_ = 0.0;
    std::vector<Segment> segments_;
};

/// Mean input field <a_p,in(t)> driving a port.
struct PulseShape {
    enum class Kind { gaussian, exponential_rise, samples };

    Kind kind = Kind::gaussian;
    std::complex<double> amplitude = 1.0;
    double width = 1.0;   // sigma_p (gaussian)
    double rate = 1.0;    // Gamma_prep (exponential rise)
    double center = 0.0;  // peak time (gaussian) or cut-off time (exponential rise)
    std::vector<double> times;                      // samples: strictly increasing
    std::vector<std::complex<double>> values;       // samples: linear interpolation, zero outside

    static PulseShape gaussian(std::complex<double> amplitude, double sigma, double center = 0.0);
    static PulseShape exponential_rise(std::complex<double> amplitude, double rate, double cutoff = 0.0);
    static PulseShape sampled(std::vector<double> times, std::vector<std::complex<double>> values);

    std::complex<double> at(double t) const;
    /// Integral of |a(t)|^2 over [t0, t1] (analytic where available).
    double energy(double t0, double t1) const;
    /// Rough spectral width used to size frequency grids.
    double bandwidth() const;
};

nlohmann::json to_json(const CouplingSchedule& schedule);
CouplingSchedule schedule_from_json(const nlohmann::json& j, const std::string& where = "");
PulseShape pulse_from_json(const nlohmann::json& j, const std::string& where = "");

}  // namespace oemt
