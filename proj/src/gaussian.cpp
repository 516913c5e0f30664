#include "oemt/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace oemt {

Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        w(2 * j, 2 * j + 1) = 1.0;
        w(2 * j + 1, 2 * j) = -1.0;
    }
    return w;
}

Eigen::Matrix2d rotation(double phi) {
    Eigen::Matrix2d r;
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

GaussianState GaussianState::vacuum(int modes) {
    return {Eigen::VectorXd::Zero(2 * modes), 0.5 * Eigen::MatrixXd::Identity(2 * modes, 2 * modes)};
}

GaussianState GaussianState::thermal(std::span<const double> occupations) {
    const int n = static_cast<int>(occupations.size());
    GaussianState s = vacuum(n);
    for (int j = 0; j < n; ++j) {
        s.cov(2 * j, 2 * j) = s.cov(2 * j + 1, 2 * j + 1) = occupations[j] + 0.5;
    }
    return s;
}

GaussianState GaussianState::displaced_squeezed(std::complex<double> alpha, std::complex<double> r0) {
    GaussianState s = vacuum(1);
    const double r = std::abs(r0), theta = std::arg(r0);
    const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
    s.cov(0, 0) = 0.5 * (ch - sh * std::cos(theta));
    s.cov(1, 1) = 0.5 * (ch + sh * std::cos(theta));
    s.cov(0, 1) = s.cov(1, 0) = -0.5 * sh * std::sin(theta);
    s.mean << std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag();
    return s;
}

GaussianState GaussianState::product(std::span<const GaussianState> parts) {
    int n = 0;
    for (const auto& p : parts) n += p.modes();
    GaussianState s{Eigen::VectorXd::Zero(2 * n), Eigen::MatrixXd::Zero(2 * n, 2 * n)};
    int offset = 0;
    for (const auto& p : parts) {
        const int d = 2 * p.modes();
        s.mean.segment(offset, d) = p.mean;
        s.cov.block(offset, offset, d, d) = p.cov;
        offset += d;
    }
    return s;
}

GaussianState GaussianState::reduced(std::span<const int> mode_indices) const {
    const int n = static_cast<int>(mode_indices.size());
    GaussianState s{Eigen::VectorXd(2 * n), Eigen::MatrixXd(2 * n, 2 * n)};
    for (int a = 0; a < n; ++a) {
        for (int u = 0; u < 2; ++u) {
            s.mean(2 * a + u) = mean(2 * mode_indices[a] + u);
            for (int b = 0; b < n; ++b) {
                for (int v = 0; v < 2; ++v) {
                    s.cov(2 * a + u, 2 * b + v) = cov(2 * mode_indices[a] + u, 2 * mode_indices[b] + v);
                }
            }
        }
    }
    return s;
}

void GaussianState::replace_mode(int j, const GaussianState& single) {
    if (single.modes() != 1) throw std::invalid_argument("replace_mode expects a single-mode state");
    cov.middleRows(2 * j, 2).setZero();
    cov.middleCols(2 * j, 2).setZero();
    cov.block<2, 2>(2 * j, 2 * j) = single.cov;
    mean.segment<2>(2 * j) = single.mean;
}

void GaussianState::rotate_mode(int j, double phi) {
    const Eigen::Matrix2d r = rotation(phi);
    mean.segment<2>(2 * j) = r * mean.segment<2>(2 * j);
    cov.middleRows(2 * j, 2) = (r * cov.middleRows(2 * j, 2)).eval();
    cov.middleCols(2 * j, 2) = (cov.middleCols(2 * j, 2) * r.transpose()).eval();
}

std::complex<double> GaussianState::amplitude(int j) const {
    return {mean(2 * j) / std::sqrt(2.0), mean(2 * j + 1) / std::sqrt(2.0)};
}

namespace {

// <R_a R_b> = V_ab + m_a m_b + (i/2) Omega_ab
std::complex<double> raw_moment(const GaussianState& s, int a, int b) {
    double omega = 0.0;
    if (a / 2 == b / 2 && a != b) omega = (a % 2 == 0) ? 1.0 : -1.0;
    return {s.cov(a, b) + s.mean(a) * s.mean(b), 0.5 * omega};
}

}  // namespace

std::complex<double> GaussianState::normal_moment(int j, int k) const {
    // a_j^dag a_k = (x_j - i p_j)(x_k + i p_k) / 2
    const std::complex<double> i(0.0, 1.0);
    const int xj = 2 * j, pj = 2 * j + 1, xk = 2 * k, pk = 2 * k + 1;
    return 0.5 * (raw_moment(*this, xj, xk) + i * raw_moment(*this, xj, pk) - i * raw_moment(*this, pj, xk) +
                  raw_moment(*this, pj, pk));
}

std::complex<double> GaussianState::anomalous_moment(int j, int k) const {
    // a_j a_k = (x_j + i p_j)(x_k + i p_k) / 2
    const std::complex<double> i(0.0, 1.0);
    const int xj = 2 * j, pj = 2 * j + 1, xk = 2 * k, pk = 2 * k + 1;
    return 0.5 * (raw_moment(*this, xj, xk) + i * raw_moment(*this, xj, pk) + i * raw_moment(*this, pj, xk) -
                  raw_moment(*this, pj, pk));
}

double GaussianState::occupation(int j) const { return normal_moment(j, j).real(); }

double GaussianState::physicality_margin() const {
    const int d = static_cast<int>(cov.rows());
    Eigen::MatrixXcd h = cov.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 0.5) * symplectic_form(d / 2).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool GaussianState::is_symmetric(double tol) const {
    return (cov - cov.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, cov.cwiseAbs().maxCoeff());
}

}  // namespace oemt
