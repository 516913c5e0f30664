#pragma once

// Linear quantum Langevin system
//     da/dt = P a + Q a^dag - (noise) ,   noise_j = sqrt(rate_j) a_in,j
// with damping folded into diag(P). In quadratures this becomes
//     dR/dt = A R + B u + noise,   D = diag(rate_j (n_j + 1/2))
// where u holds the quadratures of the coherent input means.

#include <Eigen/Dense>

#include "oemt/model.hpp"
#include "oemt/schedule.hpp"

namespace oemt {

struct LinearSystem {
    Eigen::MatrixXcd P;
    Eigen::MatrixXcd Q;
    Eigen::VectorXd rates;      // total damping per mode (noise strength)
    Eigen::VectorXd n_bath;     // bath occupation per mode
    Eigen::VectorXd ext_rates;  // external-port rate per mode (coherent drive/output)

    int modes() const { return static_cast<int>(rates.size()); }
    Eigen::MatrixXd drift() const;
    Eigen::MatrixXd diffusion() const;
    /// Maps input quadrature means (2N) to drift contributions: sqrt(ext_rate_j).
    Eigen::MatrixXd input_matrix() const;
    /// True when Q == 0 (pure beam-splitter chain), so the complex form
    /// da/dt = -i M a describes the dynamics exactly.
    bool number_conserving() const { return Q.isZero(0.0); }
};

/// Real 2N x 2N embedding of da/dt = P a + Q a^dag.
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& Q);

/// M(t) of the three-mode RWA chain (beam-splitter couplings only).
Eigen::Matrix3cd coupling_matrix(const TransducerModel& model, const Controls& c);
Eigen::Matrix3cd coupling_matrix(const TransducerModel& model);
/// K = diag(kappa1, gamma_m, kappa2).
Eigen::Vector3d damping_vector(const TransducerModel& model);

/// Controls taken from the model's static couplings and detunings.
Controls model_controls(const TransducerModel& model);

/// Three-mode RWA system. Red and off-resonant cavities couple by
/// g (a^dag b + b^dag a); blue cavities by i g (a^dag b^dag - b a).
LinearSystem rwa_system(const TransducerModel& model, const Controls& c);
LinearSystem rwa_system(const TransducerModel& model);

/// Two-mode (cavity i, mechanics) system without the rotating-wave
/// approximation: cavity in the drive frame with detuning Delta, mechanics in
/// its lab frame, coupling -i g (b + b^dag) and -i g (a + a^dag).
LinearSystem full_system(const TransducerModel& model, int cavity, double g);

/// Same cavity-mechanics pair within the RWA (mechanics in its rotating frame).
LinearSystem rwa_pair_system(const TransducerModel& model, int cavity, double g);

/// Zero every damping and bath occupation.
TransducerModel lossless(TransducerModel model);

}  // namespace oemt
