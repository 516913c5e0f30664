#include "oemt/propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "oemt/errors.hpp"

namespace oemt {

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) { return a.exp(); }

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) { return a.exp(); }

SpectralPropagator::SpectralPropagator(const Eigen::MatrixXcd& M) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of M failed");
    lambda_ = es.eigenvalues();
    U_ = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(U_);
    U_inv_ = lu.inverse();
    condition_ = U_.norm() * U_inv_.norm();
    if (!std::isfinite(condition_) || condition_ > 1e12) {
        throw NumericalError("eigenvector matrix of M is (nearly) defective; condition " +
                             std::to_string(condition_));
    }
}

Eigen::MatrixXcd SpectralPropagator::evolve(double dt) const {
    const std::complex<double> minus_i(0.0, -1.0);
    Eigen::VectorXcd phase = (minus_i * dt * lambda_).array().exp();
    return U_ * phase.asDiagonal() * U_inv_;
}

StepOperators step_operators(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, double h,
                             const Eigen::MatrixXd& B) {
    const Eigen::Index n = A.rows();
    StepOperators op;

    // Van Loan: exp([[-A, D], [0, A^T]] h) = [[., F12], [0, F22]],
    // Phi = F22^T, Qn = Phi F12.
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    C.topLeftCorner(n, n) = -A * h;
    C.topRightCorner(n, n) = D * h;
    C.bottomRightCorner(n, n) = A.transpose() * h;
    const Eigen::MatrixXd E = C.exp();
    op.Phi = E.bottomRightCorner(n, n).transpose();
    op.Qn = op.Phi * E.topRightCorner(n, n);
    op.Qn = 0.5 * (op.Qn + op.Qn.transpose()).eval();

    if (B.size() > 0) {
        // In scaled time tau = t/h with z = [m; u; du], du = u(h) - u(0):
        // dm/dtau = h (A m + B u), du/dtau = du, d(du)/dtau = 0.
        const Eigen::Index m = B.cols();
        Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n + 2 * m, n + 2 * m);
        Z.block(0, 0, n, n) = A * h;
        Z.block(0, n, n, m) = B * h;
        Z.block(n, n + m, m, m) = Eigen::MatrixXd::Identity(m, m);
        const Eigen::MatrixXd F = Z.exp();
        op.G0 = F.block(0, n, n, m);
        op.G1 = F.block(0, n + m, n, m);
        op.forced = true;
    }
    return op;
}

}  // namespace oemt
