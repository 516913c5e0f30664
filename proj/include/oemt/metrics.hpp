#pragma once

// Figures of merit for Gaussian states and transducer models.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "oemt/gaussian.hpp"
#include "oemt/model.hpp"

namespace oemt {

/// Uhlmann fidelity of two single-mode Gaussian states. Throws ConfigError
/// for multi-mode input and PhysicsError for unphysical states.
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

/// E_N = max(0, -ln(2 nu_minus)) of a two-mode covariance (vacuum = I/2).
double log_negativity(const Eigen::MatrixXd& V);
/// Smallest symplectic eigenvalue of the partially transposed covariance.
double partial_transpose_eigenvalue(const Eigen::MatrixXd& V);

/// min over phi of [Var(x1 - x2_phi) + Var(p1 + p2_phi)] / 2, where mode 2 is
/// rotated by phi. Vacuum gives 1; values below 1 witness entanglement.
struct EprVariance {
    double value = 1.0;
    double phase = 0.0;
};
EprVariance epr_variance(const Eigen::MatrixXd& V);

/// Bose-Einstein occupation at temperature T (kelvin for SI, hbar omega_m/k_B otherwise).
double bose_occupation(double temperature, double omega, UnitSystem units);
/// Inverse of bose_occupation. n = 0 gives 0.
double effective_temperature(double occupation, double omega, UnitSystem units);

struct ConversionGain {
    double A_e = 1.0;
    double A_o = 1.0;
    double A = 1.0;
    bool quantum_safe = true;  // A - 1 < 0.01
};
/// A_i = 1 + (kappa_i / omega_m)^2 with cavity 1 as the electrical side.
ConversionGain conversion_gain(const TransducerModel& model);

struct NoiseBound {
    double bound = 0.0;     // min_i Gamma_i / gamma_m
    bool satisfied = false; // n_th_m < bound
};
NoiseBound single_photon_noise_bound(const TransducerModel& model);

/// |Gamma1 - Gamma2| / (Gamma1 + Gamma2); zero when both vanish.
double impedance_residual(const TransducerModel& model);

struct MetricReport {
    UnitSystem units = UnitSystem::dimensionless;
    std::optional<double> fidelity;
    std::optional<double> log_negativity;
    std::vector<double> occupations;
    std::optional<double> effective_temperature;
    ConversionGain gain;
    NoiseBound noise_bound;
    std::optional<double> snr;
    double impedance_residual = 0.0;
};

/// Model-level entries (gain, bound, SNR, residual) filled in.
MetricReport model_metrics(const TransducerModel& model);
nlohmann::json to_json(const MetricReport& report);

}  // namespace oemt
