#include "oemt/kernels.hpp"

#include <omp.h>

#include "oemt/dynamics.hpp"
#include "oemt/errors.hpp"
#include "oemt/parallel.hpp"
#include "oemt/scattering.hpp"

namespace oemt {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace oemt

namespace oemt::kernels {

namespace {

double probe_point(const Eigen::Matrix2cd& M, double probe_rate, double w) {
    const std::complex<double> I(0.0, 1.0);
    const Eigen::Matrix2cd R = w * Eigen::Matrix2cd::Identity() - M;
    // [R^-1]_00 = R11 / det R
    const std::complex<double> chi = I * R(1, 1) / R.determinant();
    return std::norm(1.0 - probe_rate * chi);
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("kernel output span size mismatch");
}

}  // namespace

void conversion_spectrum_serial(const Eigen::Matrix3cd& M0, const Eigen::Vector3d& K,
                                std::span<const double> omega, std::span<Eigen::Matrix3cd> out) {
    check_sizes(omega.size(), out.size());
    for (std::size_t k = 0; k < omega.size(); ++k) out[k] = conversion_matrix_at(M0, K, omega[k]);
}

void conversion_spectrum_omp(const Eigen::Matrix3cd& M0, const Eigen::Vector3d& K,
                             std::span<const double> omega, std::span<Eigen::Matrix3cd> out) {
    check_sizes(omega.size(), out.size());
    for_each_index(omega.size(), Exec::parallel,
                   [&](std::size_t k) { out[k] = conversion_matrix_at(M0, K, omega[k]); });
}

void probe_transmission_serial(const Eigen::Matrix2cd& M, double probe_rate, std::span<const double> omega,
                               std::span<double> out) {
    check_sizes(omega.size(), out.size());
    for (std::size_t k = 0; k < omega.size(); ++k) out[k] = probe_point(M, probe_rate, omega[k]);
}

void probe_transmission_omp(const Eigen::Matrix2cd& M, double probe_rate, std::span<const double> omega,
                            std::span<double> out) {
    check_sizes(omega.size(), out.size());
    const long n = static_cast<long>(omega.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) out[k] = probe_point(M, probe_rate, omega[k]);
}

void steady_states_serial(std::span<const Eigen::MatrixXd> drifts, std::span<const Eigen::MatrixXd> diffusions,
                          std::span<Eigen::MatrixXd> out) {
    check_sizes(drifts.size(), out.size());
    check_sizes(diffusions.size(), out.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = steady_state_covariance(drifts[k], diffusions[k]);
}

void steady_states_omp(std::span<const Eigen::MatrixXd> drifts, std::span<const Eigen::MatrixXd> diffusions,
                       std::span<Eigen::MatrixXd> out) {
    check_sizes(drifts.size(), out.size());
    check_sizes(diffusions.size(), out.size());
    for_each_index(out.size(), Exec::parallel,
                   [&](std::size_t k) { out[k] = steady_state_covariance(drifts[k], diffusions[k]); });
}

}  // namespace oemt::kernels
