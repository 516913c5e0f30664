#pragma once

// Truncated Fock-basis reference for pure single-mode Gaussian states.
// |alpha, r0> = D(alpha) S(r0) |0>, S(r0) = exp((r0* a^2 - r0 a^dag^2) / 2).

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace fock {

inline Eigen::MatrixXcd annihilation(int dim) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

// Amplitudes in the first `keep` number states, built in a larger space so the
// truncated generators do not reflect off the cutoff.
inline Eigen::VectorXcd displaced_squeezed(std::complex<double> alpha, std::complex<double> r0, int keep = 60,
                                           int dim = 160) {
    const Eigen::MatrixXcd a = annihilation(dim);
    const Eigen::MatrixXcd ad = a.adjoint();
    const Eigen::MatrixXcd S = (0.5 * (std::conj(r0) * a * a - r0 * ad * ad)).exp();
    const Eigen::MatrixXcd D = (alpha * ad - std::conj(alpha) * a).exp();
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(dim);
    vac(0) = 1.0;
    return (D * (S * vac)).head(keep);
}

inline double overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return std::norm(a.dot(b)); }

}  // namespace fock
