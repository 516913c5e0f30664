#include "oemt/linear_system.hpp"

#include <cmath>

namespace oemt {

namespace {

const std::complex<double> I(0.0, 1.0);

}  // namespace

Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Q) {
    const int n = static_cast<int>(P.rows());
    Eigen::MatrixXd A(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const double pr = P(j, k).real(), pi = P(j, k).imag();
            const double qr = Q(j, k).real(), qi = Q(j, k).imag();
            A(2 * j, 2 * k) = pr + qr;
            A(2 * j, 2 * k + 1) = -pi + qi;
            A(2 * j + 1, 2 * k) = pi + qi;
            A(2 * j + 1, 2 * k + 1) = pr - qr;
        }
    }
    return A;
}

Eigen::MatrixXd LinearSystem::drift() const { return real_embedding(P, Q); }

Eigen::MatrixXd LinearSystem::diffusion() const {
    const int n = modes();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) D(2 * j, 2 * j) = D(2 * j + 1, 2 * j + 1) = rates(j) * (n_bath(j) + 0.5);
    return D;
}

Eigen::MatrixXd LinearSystem::input_matrix() const {
    const int n = modes();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) B(2 * j, 2 * j) = B(2 * j + 1, 2 * j + 1) = std::sqrt(ext_rates(j));
    return B;
}

Controls model_controls(const TransducerModel& model) {
    return {model.g(0), model.g(1), model.drive[0].delta, model.drive[1].delta};
}

Eigen::Matrix3cd coupling_matrix(const TransducerModel& model, const Controls& c) {
    Eigen::Matrix3cd M = Eigen::Matrix3cd::Zero();
    M(0, 0) = -c.delta1 - 0.5 * I * model.kappa(0);
    M(1, 1) = -0.5 * I * model.gamma_m();
    M(2, 2) = -c.delta2 - 0.5 * I * model.kappa(1);
    M(0, 1) = M(1, 0) = c.g1;
    M(1, 2) = M(2, 1) = c.g2;
    return M;
}

Eigen::Matrix3cd coupling_matrix(const TransducerModel& model) {
    return coupling_matrix(model, model_controls(model));
}

Eigen::Vector3d damping_vector(const TransducerModel& model) {
    return {model.kappa(0), model.gamma_m(), model.kappa(1)};
}

LinearSystem rwa_system(const TransducerModel& model, const Controls& c) {
    LinearSystem s;
    s.P = Eigen::MatrixXcd::Zero(3, 3);
    s.Q = Eigen::MatrixXcd::Zero(3, 3);
    s.P(0, 0) = I * c.delta1 - 0.5 * model.kappa(0);
    s.P(1, 1) = -0.5 * model.gamma_m();
    s.P(2, 2) = I * c.delta2 - 0.5 * model.kappa(1);
    const double g[2] = {c.g1, c.g2};
    for (int i = 0; i < 2; ++i) {
        const int a = i == 0 ? 0 : 2;
        if (model.drive[i].sideband == Sideband::blue) {
            // H = i g (a^dag b^dag - b a): da/dt = g b^dag, db/dt = g a^dag
            s.Q(a, 1) = g[i];
            s.Q(1, a) = g[i];
        } else {
            s.P(a, 1) = -I * g[i];
            s.P(1, a) = -I * g[i];
        }
    }
    s.rates = Eigen::Vector3d(model.kappa(0), model.gamma_m(), model.kappa(1));
    s.n_bath = Eigen::Vector3d(model.modes[0].n_th, model.modes[1].n_th, model.modes[2].n_th);
    s.ext_rates = Eigen::Vector3d(model.modes[0].kappa_ext, model.modes[1].kappa_ext, model.modes[2].kappa_ext);
    return s;
}

LinearSystem rwa_system(const TransducerModel& model) { return rwa_system(model, model_controls(model)); }

namespace {

LinearSystem pair_base(const TransducerModel& model, int cavity) {
    const ModeSpec& c = model.cavity(cavity);
    const ModeSpec& m = model.mechanics();
    LinearSystem s;
    s.P = Eigen::MatrixXcd::Zero(2, 2);
    s.Q = Eigen::MatrixXcd::Zero(2, 2);
    s.rates = Eigen::Vector2d(c.kappa, m.kappa);
    s.n_bath = Eigen::Vector2d(c.n_th, m.n_th);
    s.ext_rates = Eigen::Vector2d(c.kappa_ext, m.kappa_ext);
    return s;
}

}  // namespace

LinearSystem full_system(const TransducerModel& model, int cavity, double g) {
    LinearSystem s = pair_base(model, cavity);
    const double Delta = model.drive[cavity].detuning(model.omega_m());
    s.P(0, 0) = I * Delta - 0.5 * model.kappa(cavity);
    s.P(1, 1) = -I * model.omega_m() - 0.5 * model.gamma_m();
    s.P(0, 1) = s.Q(0, 1) = -I * g;
    s.P(1, 0) = s.Q(1, 0) = -I * g;
    return s;
}

LinearSystem rwa_pair_system(const TransducerModel& model, int cavity, double g) {
    LinearSystem s = pair_base(model, cavity);
    s.P(0, 0) = I * model.drive[cavity].delta - 0.5 * model.kappa(cavity);
    s.P(1, 1) = -0.5 * model.gamma_m();
    if (model.drive[cavity].sideband == Sideband::blue) {
        s.Q(0, 1) = s.Q(1, 0) = g;
    } else {
        s.P(0, 1) = s.P(1, 0) = -I * g;
    }
    return s;
}

TransducerModel lossless(TransducerModel model) {
    for (ModeSpec& m : model.modes) {
        m.kappa = m.kappa_ext = m.kappa_in = 0.0;
        m.n_th = 0.0;
    }
    return model;
}

}  // namespace oemt
