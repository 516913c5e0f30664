#pragma once

// Frequency-domain response of the RWA chain with constant couplings:
//   T(omega) = I - i sqrt(K) (omega I - M0)^-1 sqrt(K)
// omega is measured in the interaction picture: omega = 0 is the resonance of
// cavity 1 on the input port and of cavity 2 on the output port.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oemt/model.hpp"
#include "oemt/parallel.hpp"

namespace oemt {

/// Single-frequency conversion matrix for an explicit M0 and K.
/// Throws PhysicsError when omega I - M0 is singular (undamped pole).
Eigen::Matrix3cd conversion_matrix_at(const Eigen::Matrix3cd& M0, const Eigen::Vector3d& K, double omega);

struct ConversionMatrix {
    std::vector<double> omega;
    std::vector<Eigen::Matrix3cd> T;
    double nu1 = 1.0;
    double nu2 = 1.0;
    Eigen::Matrix3cd M0;
    Eigen::Vector3d K;

    std::size_t size() const { return omega.size(); }
    /// Entry (row, col) with zero-based indices, e.g. t(k, 2, 0) = T31.
    std::complex<double> t(std::size_t k, int row, int col) const { return T[k](row, col); }
    std::complex<double> signal(std::size_t k) const { return std::sqrt(nu1 * nu2) * T[k](2, 0); }
    /// Evaluates T at an arbitrary frequency from the stored M0, K.
    Eigen::Matrix3cd evaluate(double w) const { return conversion_matrix_at(M0, K, w); }
};

ConversionMatrix conversion_matrix(const TransducerModel& model, std::span<const double> omega_grid,
                                   Exec exec = Exec::parallel);

/// 2 sqrt(Gamma1 Gamma2) / (Gamma1 + Gamma2 + gamma_m)
double t31_closed_form(double Gamma1, double Gamma2, double gamma_m);
double t31_closed_form(const TransducerModel& model);

struct Halfwidth {
    double omega = 0.0;               // smallest positive crossing
    std::vector<double> crossings;    // every bracketed crossing on the grid, refined
};

/// Smallest omega > 0 with |T31(omega)| = |T31(0)|/2 (grid bracket + bisection).
/// Throws NumericalError if the grid never crosses.
Halfwidth halfwidth(const ConversionMatrix& cm);

struct NoiseChannel {
    std::string name;
    std::complex<double> coefficient;   // exact, from T(omega)
    std::complex<double> approximate;   // with T33 terms omitted (and T31 -> 1 for intrinsic channels)
    double occupation = 0.0;            // bath occupation feeding this channel
    double power() const { return std::norm(coefficient) * (occupation + 0.5); }
};

struct NoiseBudget {
    double omega = 0.0;
    std::vector<NoiseChannel> channels;  // signal, mechanical, intrinsic1, intrinsic2, vacuum_port2
    double total_weight = 0.0;           // sum |c|^2 (1 for a unitary T)
    double mechanical_to_signal = 0.0;   // |T32 / T31|
    double snr = 0.0;                    // nu1 |T31| / (|T32| sqrt(n_th_m))
    double snr_closed_form = 0.0;        // nu1 sqrt(Gamma1 / (gamma_m n_th_m))

    const NoiseChannel& channel(const std::string& name) const;
};

NoiseBudget noise_budget(const TransducerModel& model, double omega);

struct ProbeSpectrum {
    std::vector<double> omega;
    std::vector<double> transmission;  // |t(omega)|^2
    std::vector<std::size_t> maxima;   // interior local maxima (indices)
    std::vector<std::size_t> minima;   // interior local minima (indices)
};

/// Probe transmission past cavity `cavity` (side-coupled geometry):
///   t(omega) = 1 - probe_coupling * kappa * chi(omega),
///   chi = i [(omega I - M)^-1]_cc for the cavity-mechanics pair.
/// probe_coupling = 1/2 is critical coupling (full-depth bare dip).
ProbeSpectrum probe_spectrum(const TransducerModel& model, int cavity, std::span<const double> omega_grid,
                             double probe_coupling = 0.5);

/// Full width at half maximum of the peak containing index `peak`,
/// measured on the absolute |t|^2 scale and refined by linear interpolation.
double peak_fwhm(const ProbeSpectrum& spectrum, std::size_t peak);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace oemt
