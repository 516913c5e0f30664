#pragma once

#include <Eigen/Dense>

namespace oemt {

/// Dense matrix exponential (scaling and squaring, Pade).
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// Propagator of dv/dt = -i M v built from the eigendecomposition
/// M = U Lambda U^-1, so that v(t) = U exp(-i Lambda t) U^-1 v(0).
class SpectralPropagator {
public:
    explicit SpectralPropagator(const Eigen::MatrixXcd& M);

    const Eigen::VectorXcd& eigenvalues() const { return lambda_; }
    const Eigen::MatrixXcd& eigenvectors() const { return U_; }
    const Eigen::MatrixXcd& inverse_eigenvectors() const { return U_inv_; }
    /// Condition number estimate of U (large near exceptional points).
    double condition() const { return condition_; }

    Eigen::MatrixXcd evolve(double dt) const;

private:
    Eigen::VectorXcd lambda_;
    Eigen::MatrixXcd U_;
    Eigen::MatrixXcd U_inv_;
    double condition_ = 1.0;
};

/// Exact one-step operators of dR/dt = A R + B u(t) + noise(D) over a step h
/// with u varying linearly across the step:
///   mean:  m(h) = Phi m + G0 u(0) + G1 (u(h) - u(0))
///   cov:   V(h) = Phi V Phi^T + Qn
struct StepOperators {
    Eigen::MatrixXd Phi;
    Eigen::MatrixXd Qn;
    Eigen::MatrixXd G0;
    Eigen::MatrixXd G1;
    bool forced = false;
};

/// Van Loan block exponential for (Phi, Qn); `B` non-empty adds the
/// first-order-hold input operators.
StepOperators step_operators(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, double h,
                             const Eigen::MatrixXd& B = {});

}  // namespace oemt
