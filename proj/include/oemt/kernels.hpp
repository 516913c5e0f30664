#pragma once

// Data-parallel kernels. Every kernel has a serial reference version; the
// OpenMP version must produce bit-identical output.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oemt::kernels {

/// T(omega_k) for every k into `out` (size must match).
void conversion_spectrum_serial(const Eigen::Matrix3cd& M0, const Eigen::Vector3d& K,
                                std::span<const double> omega, std::span<Eigen::Matrix3cd> out);
void conversion_spectrum_omp(const Eigen::Matrix3cd& M0, const Eigen::Vector3d& K,
                             std::span<const double> omega, std::span<Eigen::Matrix3cd> out);

/// |t(omega_k)|^2 of the side-coupled probe for a 2x2 cavity-mechanics M.
void probe_transmission_serial(const Eigen::Matrix2cd& M, double probe_rate, std::span<const double> omega,
                               std::span<double> out);
void probe_transmission_omp(const Eigen::Matrix2cd& M, double probe_rate, std::span<const double> omega,
                            std::span<double> out);

/// Steady-state covariances for a batch of (drift, diffusion) pairs.
void steady_states_serial(std::span<const Eigen::MatrixXd> drifts, std::span<const Eigen::MatrixXd> diffusions,
                          std::span<Eigen::MatrixXd> out);
void steady_states_omp(std::span<const Eigen::MatrixXd> drifts, std::span<const Eigen::MatrixXd> diffusions,
                       std::span<Eigen::MatrixXd> out);

}  // namespace oemt::kernels
