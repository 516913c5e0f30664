#include "oemt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "oemt/errors.hpp"
#include "oemt/propagator.hpp"

namespace oemt {

GaussianState Trajectory::state(std::size_t k) const {
    GaussianState s;
    s.mean = mean.at(k);
    s.cov = cov.empty() ? Eigen::MatrixXd::Zero(mean[k].size(), mean[k].size()) : cov.at(k);
    return s;
}

std::complex<double> Trajectory::amplitude(std::size_t k, int j) const {
    return {mean[k](2 * j) / std::sqrt(2.0), mean[k](2 * j + 1) / std::sqrt(2.0)};
}

namespace {

void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) throw ConfigError("time grid is empty");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > t_grid[k - 1])) {
            throw ConfigError("time grid must be strictly increasing (index " + std::to_string(k) + ")");
        }
    }
}

Eigen::VectorXd input_quadratures(const PortInputs& inputs, int modes, double t) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * modes);
    for (int j = 0; j < modes && j < static_cast<int>(inputs.size()); ++j) {
        if (!inputs[j]) continue;
        const std::complex<double> a = inputs[j]->at(t);
        u(2 * j) = std::sqrt(2.0) * a.real();
        u(2 * j + 1) = std::sqrt(2.0) * a.imag();
    }
    return u;
}

bool has_inputs(const PortInputs& inputs) {
    return std::any_of(inputs.begin(), inputs.end(), [](const auto& p) { return p.has_value(); });
}

double input_bandwidth(const PortInputs& inputs) {
    double b = 0.0;
    for (const auto& p : inputs) {
        if (p) b = std::max(b, p->bandwidth());
    }
    return b;
}

Eigen::VectorXcd outputs(const LinearSystem& sys, const PortInputs& inputs, const Eigen::VectorXd& m, double t) {
    const int n = sys.modes();
    Eigen::VectorXcd out(n);
    for (int j = 0; j < n; ++j) {
        const std::complex<double> a(m(2 * j) / std::sqrt(2.0), m(2 * j + 1) / std::sqrt(2.0));
        std::complex<double> in = 0.0;
        if (j < static_cast<int>(inputs.size()) && inputs[j]) in = inputs[j]->at(t);
        out(j) = in - std::sqrt(sys.ext_rates(j)) * a;
    }
    return out;
}

// Caches the last step operators; constant segments reuse them.
class StepCache {
public:
    const StepOperators& get(const LinearSystem& sys, double h, bool forced) {
        Eigen::MatrixXd A = sys.drift();
        Eigen::MatrixXd D = sys.diffusion();
        Eigen::MatrixXd B = forced ? sys.input_matrix() : Eigen::MatrixXd();
        if (valid_ && h == h_ && forced == forced_ && A == A_ && D == D_ && (!forced || B == B_)) return op_;
        op_ = step_operators(A, D, h, B);
        A_ = std::move(A);
        D_ = std::move(D);
        B_ = std::move(B);
        h_ = h;
        forced_ = forced;
        valid_ = true;
        return op_;
    }

private:
    bool valid_ = false;
    bool forced_ = false;
    double h_ = 0.0;
    Eigen::MatrixXd A_, D_, B_;
    StepOperators op_;
};

}  // namespace

Trajectory evolve(const SystemBuilder& builder, const CouplingSchedule& schedule, const GaussianState& initial,
                  std::span<const double> t_grid, const PortInputs& inputs, const EvolveOptions& options) {
    check_grid(t_grid);
    if (!schedule.covers(t_grid.front(), t_grid.back())) {
        std::ostringstream os;
        os << "schedule [" << schedule.t_start() << ", " << schedule.t_end() << "] does not cover the time grid ["
           << t_grid.front() << ", " << t_grid.back() << "]";
        throw ConfigError(os.str());
    }

    const int n = initial.modes();
    const bool forced = has_inputs(inputs);
    const double bandwidth = forced ? input_bandwidth(inputs) : 0.0;
    const double scale = schedule.max_abs();
    const std::vector<double> breaks = schedule.breakpoints();

    Trajectory traj;
    Eigen::VectorXd m = initial.mean;
    Eigen::MatrixXd V = initial.cov;
    auto record = [&](double t) {
        traj.t.push_back(t);
        traj.mean.push_back(m);
        if (options.track_covariance) traj.cov.push_back(V);
        traj.output.push_back(outputs(builder(schedule.at(t)), inputs, m, t));
    };
    record(t_grid.front());

    StepCache cache;
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        // Split the output interval at schedule breakpoints.
        std::vector<double> cuts{t_grid[k - 1]};
        for (double b : breaks) {
            if (b > t_grid[k - 1] && b < t_grid[k]) cuts.push_back(b);
        }
        cuts.push_back(t_grid[k]);

        for (std::size_t c = 1; c < cuts.size(); ++c) {
            const double a = cuts[c - 1], b = cuts[c];
            const double len = b - a;
            const Controls rate = schedule.max_rate(a, b);
            double steps = 1.0;
            if (scale > 0.0) {
                steps = std::max(steps, std::ceil(len * rate.max_abs() / (options.max_relative_variation * scale)));
            }
            if (forced && bandwidth > 0.0) steps = std::max(steps, std::ceil(len * bandwidth / 0.02));
            const long nsub = static_cast<long>(std::min(steps, 1e8));
            const double h = len / static_cast<double>(nsub);

            for (long s = 0; s < nsub; ++s) {
                const double t0 = a + s * h;
                const double t1 = (s + 1 == nsub) ? b : t0 + h;
                const LinearSystem sys = builder(schedule.at(0.5 * (t0 + t1)));
                const StepOperators& op = cache.get(sys, h, forced);
                if (forced) {
                    const Eigen::VectorXd u0 = input_quadratures(inputs, n, t0);
                    const Eigen::VectorXd u1 = input_quadratures(inputs, n, t1);
                    m = op.Phi * m + op.G0 * u0 + op.G1 * (u1 - u0);
                } else {
                    m = op.Phi * m;
                }
                if (options.track_covariance) {
                    V = op.Phi * V * op.Phi.transpose() + op.Qn;
                    V = 0.5 * (V + V.transpose()).eval();
                }
            }
        }

        if (options.track_covariance && options.check_physicality) {
            GaussianState probe{m, V};
            const double margin = probe.physicality_margin();
            if (margin < -options.physicality_tol) {
                throw NumericalError("state lost physicality at t=" + std::to_string(t_grid[k]) +
                                     " (min eigenvalue of V + i Omega/2 = " + std::to_string(margin) + ")");
            }
        }
        record(t_grid[k]);
    }
    return traj;
}

Trajectory evolve_mean(const TransducerModel& model, const CouplingSchedule& schedule, const GaussianState& initial,
                       const PortInputs& inputs, std::span<const double> t_grid) {
    require_valid(model);
    EvolveOptions opt;
    opt.track_covariance = false;
    return evolve([&](const Controls& c) { return rwa_system(model, c); }, schedule, initial, t_grid, inputs, opt);
}

Trajectory evolve_covariance(const TransducerModel& model, const CouplingSchedule& schedule,
                             const GaussianState& initial, std::span<const double> t_grid) {
    require_valid(model);
    if (!initial.is_physical()) throw PhysicsError("initial state is not physical");
    return evolve([&](const Controls& c) { return rwa_system(model, c); }, schedule, initial, t_grid);
}

Trajectory evolve_full_nonrwa(const TransducerModel& model, int cavity, const GaussianState& initial,
                              std::span<const double> t_grid) {
    require_valid(model);
    if (initial.modes() != 2) throw ConfigError("non-RWA engine expects a two-mode (cavity, mechanics) state");
    check_grid(t_grid);
    const LinearSystem sys = full_system(model, cavity, model.g(cavity));
    const auto schedule = CouplingSchedule::constant({}, t_grid.back() - t_grid.front(), t_grid.front());
    return evolve([&](const Controls&) { return sys; }, schedule, initial, t_grid);
}

GaussianState evolve_adaptive(const SystemBuilder& builder, const CouplingSchedule& schedule,
                              const GaussianState& initial, double t0, double t1, double abs_tol, double rel_tol) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;
    if (!schedule.covers(t0, t1)) throw ConfigError("schedule does not cover the integration window");

    const int d = 2 * initial.modes();
    State x(static_cast<std::size_t>(d + d * d));
    Eigen::Map<Eigen::VectorXd>(x.data(), d) = initial.mean;
    Eigen::Map<Eigen::MatrixXd>(x.data() + d, d, d) = initial.cov;

    auto rhs = [&](const State& s, State& dsdt, double t) {
        const LinearSystem sys = builder(schedule.at(t));
        const Eigen::MatrixXd A = sys.drift();
        Eigen::Map<const Eigen::VectorXd> m(s.data(), d);
        Eigen::Map<const Eigen::MatrixXd> V(s.data() + d, d, d);
        Eigen::Map<Eigen::VectorXd>(dsdt.data(), d) = A * m;
        Eigen::Map<Eigen::MatrixXd>(dsdt.data() + d, d, d) = A * V + V * A.transpose() + sys.diffusion();
    };

    std::vector<double> cuts{t0};
    for (double b : schedule.breakpoints()) {
        if (b > t0 && b < t1) cuts.push_back(b);
    }
    cuts.push_back(t1);
    for (std::size_t c = 1; c < cuts.size(); ++c) {
        const double len = cuts[c] - cuts[c - 1];
        odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(abs_tol, rel_tol),
                                   rhs, x, cuts[c - 1], cuts[c], len * 1e-3);
    }

    GaussianState out;
    out.mean = Eigen::Map<Eigen::VectorXd>(x.data(), d);
    out.cov = Eigen::Map<Eigen::MatrixXd>(x.data() + d, d, d);
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

double max_real_eigenvalue(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    return es.eigenvalues().real().maxCoeff();
}

bool is_stable(const Eigen::MatrixXd& A) { return max_real_eigenvalue(A) < -1e-12; }

Eigen::MatrixXd steady_state_covariance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D) {
    const double lmax = max_real_eigenvalue(A);
    if (!(lmax < -1e-12)) {
        std::ostringstream os;
        os << "drift matrix is not stable: max real eigenvalue = " << lmax << " (need < -1e-12)";
        throw PhysicsError(os.str());
    }
    const Eigen::Index n = A.rows();
    // vec(A V + V A^T) = (I (x) A + A (x) I) vec(V), column-major vec.
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < n; ++k) {
                L(j * n + i, j * n + k) += A(i, k);  // (A V)_{ij}
                L(j * n + i, k * n + i) += A(j, k);  // (V A^T)_{ij}
            }
        }
    }
    Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(D.data(), n * n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
    if (!lu.isInvertible()) throw NumericalError("Lyapunov operator is singular");
    Eigen::VectorXd v = lu.solve(rhs);
    Eigen::MatrixXd V = Eigen::Map<Eigen::MatrixXd>(v.data(), n, n);
    return 0.5 * (V + V.transpose());
}

Eigen::MatrixXd steady_state_covariance(const LinearSystem& system) {
    return steady_state_covariance(system.drift(), system.diffusion());
}

double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& V, const Eigen::MatrixXd& D) {
    return (A * V + V * A.transpose() + D).cwiseAbs().maxCoeff();
}

LinearSystem ReducedMechanicalModel::system() const {
    LinearSystem s;
    s.P = Eigen::MatrixXcd::Constant(1, 1, -0.5 * decay());
    s.Q = Eigen::MatrixXcd::Zero(1, 1);
    // Noise of both channels folded into one effective bath.
    s.rates = Eigen::VectorXd::Constant(1, decay());
    s.n_bath = Eigen::VectorXd::Constant(1, steady_occupation());
    s.ext_rates = Eigen::VectorXd::Zero(1);
    return s;
}

double ReducedMechanicalModel::steady_occupation() const {
    return decay() > 0.0 ? (Gamma * n_cavity_bath + gamma_m * n_mechanical_bath) / decay() : 0.0;
}

double ReducedMechanicalModel::occupation(double t, double n0) const {
    const double ns = steady_occupation();
    return ns + (n0 - ns) * std::exp(-decay() * t);
}

ReducedMechanicalModel adiabatic_eliminate(const TransducerModel& model, int cavity) {
    ReducedMechanicalModel r;
    r.Gamma = model.Gamma(cavity);
    r.gamma_m = model.gamma_m();
    r.n_cavity_bath = model.cavity(cavity).n_th;
    r.n_mechanical_bath = model.mechanics().n_th;
    const double ratio = model.kappa(cavity) > 0.0 ? model.g(cavity) / model.kappa(cavity) : INFINITY;
    if (ratio > 0.1) {
        std::ostringstream os;
        os << "adiabatic elimination assumes g << kappa; g/kappa = " << ratio;
        r.warning = os.str();
    }
    return r;
}

}  // namespace oemt
