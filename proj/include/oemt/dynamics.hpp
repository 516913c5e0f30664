#pragma once

// Time-domain evolution of Gaussian states under linear Langevin dynamics.
// Schedules are integrated with exact matrix-exponential steps over
// piecewise-constant sub-intervals; ramps are sub-sampled so the controls
// change by at most `max_relative_variation` of their peak within a step.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oemt/gaussian.hpp"
#include "oemt/linear_system.hpp"
#include "oemt/model.hpp"
#include "oemt/schedule.hpp"

namespace oemt {

using SystemBuilder = std::function<LinearSystem(const Controls&)>;
/// One optional coherent input per mode (index = mode).
using PortInputs = std::vector<std::optional<PulseShape>>;

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> mean;
    std::vector<Eigen::MatrixXd> cov;        // empty when covariance is not tracked
    std::vector<Eigen::VectorXcd> output;    // <a_out,j> = <a_in,j> - sqrt(kappa_ext,j) <a_j>

    std::size_t size() const { return t.size(); }
    int modes() const { return mean.empty() ? 0 : static_cast<int>(mean.front().size() / 2); }
    GaussianState state(std::size_t k) const;
    GaussianState final_state() const { return state(size() - 1); }
    /// <a_j> at sample k.
    std::complex<double> amplitude(std::size_t k, int j) const;
};

struct EvolveOptions {
    double max_relative_variation = 1e-3;
    bool track_covariance = true;
    bool check_physicality = true;
    double physicality_tol = 1e-9;
};

/// General engine. `initial` is the state at t_grid.front().
Trajectory evolve(const SystemBuilder& builder, const CouplingSchedule& schedule, const GaussianState& initial,
                  std::span<const double> t_grid, const PortInputs& inputs = {},
                  const EvolveOptions& options = {});

/// Three-mode RWA chain: first moments (and outputs) driven by coherent inputs.
Trajectory evolve_mean(const TransducerModel& model, const CouplingSchedule& schedule, const GaussianState& initial,
                       const PortInputs& inputs, std::span<const double> t_grid);

/// Three-mode RWA chain: full Gaussian state (mean and covariance).
Trajectory evolve_covariance(const TransducerModel& model, const CouplingSchedule& schedule,
                             const GaussianState& initial, std::span<const double> t_grid);

/// Cavity-mechanics pair without the rotating-wave approximation, at the
/// model's static coupling g of `cavity`. `initial` is a two-mode state
/// ordered (cavity, mechanics).
Trajectory evolve_full_nonrwa(const TransducerModel& model, int cavity, const GaussianState& initial,
                              std::span<const double> t_grid);

/// Adaptive Dormand-Prince integration of mean and covariance from t0 to t1
/// (independent of the exponential stepper; used for cross-checks).
GaussianState evolve_adaptive(const SystemBuilder& builder, const CouplingSchedule& schedule,
                              const GaussianState& initial, double t0, double t1, double abs_tol = 1e-13,
                              double rel_tol = 1e-12);

double max_real_eigenvalue(const Eigen::MatrixXd& A);
bool is_stable(const Eigen::MatrixXd& A);

/// Solves A V + V A^T + D = 0 directly. Throws PhysicsError if A is not
/// strictly stable (max Re eig >= -1e-12).
Eigen::MatrixXd steady_state_covariance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D);
Eigen::MatrixXd steady_state_covariance(const LinearSystem& system);
double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& V, const Eigen::MatrixXd& D);

/// Mechanics with the cavity adiabatically eliminated:
///   db/dt = i sqrt(Gamma) a_in - (Gamma + gamma_m)/2 b + sqrt(gamma_m) b_in
struct ReducedMechanicalModel {
    double Gamma = 0.0;
    double gamma_m = 0.0;
    double n_cavity_bath = 0.0;
    double n_mechanical_bath = 0.0;
    std::string warning;

    double decay() const { return Gamma + gamma_m; }
    std::complex<double> input_coupling() const { return {0.0, std::sqrt(Gamma)}; }
    double bath_coupling() const { return std::sqrt(gamma_m); }
    LinearSystem system() const;
    double steady_occupation() const;
    double occupation(double t, double n0) const;
};

ReducedMechanicalModel adiabatic_eliminate(const TransducerModel& model, int cavity = 0);

}  // namespace oemt
