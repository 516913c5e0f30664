#pragma once

// Gaussian states over N bosonic modes in quadrature order (x1, p1, x2, p2, ...)
// with x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), hbar = 1.
// Vacuum covariance is I/2.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oemt {

/// Symplectic form Omega with [R_j, R_k] = i Omega_jk.
Eigen::MatrixXd symplectic_form(int modes);

/// Quadrature rotation by phi on one mode: alpha -> exp(i phi) alpha.
Eigen::Matrix2d rotation(double phi);

struct GaussianState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int modes() const { return static_cast<int>(mean.size() / 2); }

    static GaussianState vacuum(int modes);
    static GaussianState thermal(std::span<const double> occupations);
    /// |alpha, r0> = D(alpha) S(r0)|0> with S(r0) = exp((r0^* a^2 - r0 a^dag^2)/2).
    static GaussianState displaced_squeezed(std::complex<double> alpha, std::complex<double> r0);
    static GaussianState coherent(std::complex<double> alpha) { return displaced_squeezed(alpha, 0.0); }
    /// Tensor product in the given order.
    static GaussianState product(std::span<const GaussianState> parts);

    GaussianState reduced(std::span<const int> mode_indices) const;
    /// Replaces mode j by `single` and removes its correlations with the rest.
    void replace_mode(int j, const GaussianState& single);
    /// Applies alpha_j -> exp(i phi) alpha_j.
    void rotate_mode(int j, double phi);

    std::complex<double> amplitude(int j) const;  // <a_j>
    double occupation(int j) const;                // <a_j^dag a_j>
    /// <a_j^dag a_k>
    std::complex<double> normal_moment(int j, int k) const;
    /// <a_j a_k>
    std::complex<double> anomalous_moment(int j, int k) const;

    /// Smallest eigenvalue of V + (i/2) Omega (>= 0 for a physical state).
    double physicality_margin() const;
    bool is_physical(double tol = 1e-9) const { return physicality_margin() >= -tol; }
    bool is_symmetric(double tol = 1e-12) const;
};

}  // namespace oemt
