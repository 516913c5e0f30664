#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "oemt/dynamics.hpp"
#include "oemt/errors.hpp"
#include "oemt/linear_system.hpp"
#include "oemt/propagator.hpp"
#include "oemt/scattering.hpp"

using namespace oemt;

TEST_SUITE("dynamics") {

TEST_CASE("expm matches closed forms") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.3, -1.3, 0.0;
    const Eigen::MatrixXd E = expm(A);
    CHECK(E(0, 0) == doctest::Approx(std::cos(1.3)).epsilon(1e-14));
    CHECK(E(0, 1) == doctest::Approx(std::sin(1.3)).epsilon(1e-14));
    Eigen::MatrixXcd N = Eigen::MatrixXcd::Zero(3, 3);
    N(0, 1) = 2.0;
    N(1, 2) = 3.0;
    const Eigen::MatrixXcd F = expm(N);
    CHECK(std::abs(F(0, 2) - 3.0) < 1e-14);
}

TEST_CASE("lyapunov solution has small residual") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        TransducerModel m = testing::chain(testing::log_uniform(rng, 0.01, 1), testing::log_uniform(rng, 0.01, 1),
                                           testing::log_uniform(rng, 0.1, 2), testing::log_uniform(rng, 0.1, 2),
                                           testing::log_uniform(rng, 1e-4, 1e-2));
        m.mechanics().n_th = 50.0;
        m.cavity(1).n_th = 0.3;
        const LinearSystem sys = rwa_system(m);
        const Eigen::MatrixXd V = steady_state_covariance(sys);
        CHECK(lyapunov_residual(sys.drift(), V, sys.diffusion()) < 1e-10 * V.norm());
        CHECK(is_stable(sys.drift()));
    }
}

TEST_CASE("uncoupled modes stay at their baths") {
    TransducerModel m = testing::chain(0.0, 0.0, 1.0, 0.5, 0.01);
    m.mechanics().n_th = 12.0;
    m.cavity(0).n_th = 0.5;
    const double n[] = {0.5, 12.0, 0.0};
    const auto t = linspace(0.0, 10.0, 11);
    const Trajectory traj = evolve_covariance(m, CouplingSchedule::constant({}, 10.0), GaussianState::thermal(n), t);
    for (int j = 0; j < 3; ++j) CHECK(traj.final_state().occupation(j) == doctest::Approx(n[j]).epsilon(1e-10));
}

TEST_CASE("lossless swap moves a coherent state into the mechanics") {
    const TransducerModel m = lossless(testing::chain(0.2, 0.1, 1.0, 1.0, 0.01));
    const double T = std::numbers::pi / (2 * 0.2);
    const auto sched = CouplingSchedule::constant({0.2, 0.0, 0.0, 0.0}, T);
    GaussianState s0 = GaussianState::vacuum(3);
    s0.replace_mode(0, GaussianState::coherent({1.5, 0.5}));
    const auto t = linspace(0.0, T, 41);
    const Trajectory traj = evolve_covariance(m, sched, s0, t);
    const GaussianState f = traj.final_state();
    CHECK(std::abs(f.amplitude(1) - std::complex<double>(0.0, -1.0) * std::complex<double>(1.5, 0.5)) < 1e-9);
    CHECK(std::abs(f.amplitude(0)) < 1e-9);
    CHECK(f.occupation(1) == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("mean-only and covariance evolution share the first moments") {
    TransducerModel m = testing::chain(0.3, 0.2, 0.4, 0.6, 0.01);
    CouplingSchedule s;
    s.ramp(RampKind::raised_cosine, {0.0, -0.2, 0, 0}, {0.3, 0.0, 0, 0}, 30.0);
    GaussianState s0 = GaussianState::vacuum(3);
    s0.replace_mode(0, GaussianState::coherent(1.0));
    const auto t = linspace(0.0, 30.0, 61);
    const Trajectory a = evolve_covariance(m, s, s0, t);
    const Trajectory b = evolve_mean(m, s, s0, {}, t);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK((a.mean[k] - b.mean[k]).norm() < 1e-10);
    CHECK(b.cov.empty());
}

TEST_CASE("exact stepping agrees with adaptive integration") {
    TransducerModel m = testing::chain(0.3, 0.25, 0.5, 0.3, 0.02);
    m.mechanics().n_th = 20.0;
    CouplingSchedule s;
    s.ramp(RampKind::raised_cosine, {0.0, -0.25, 0, 0}, {0.3, 0.0, 0.05, 0}, 20.0);
    GaussianState s0 = GaussianState::vacuum(3);
    s0.replace_mode(0, GaussianState::displaced_squeezed({0.5, 1.0}, 0.3));
    const auto t = linspace(0.0, 20.0, 21);
    const GaussianState exact = evolve_covariance(m, s, s0, t).final_state();
    auto builder = [&](const Controls& c) { return rwa_system(m, c); };
    const GaussianState ode = evolve_adaptive(builder, s, s0, 0.0, 20.0);
    // piecewise-constant stepping resolves the ramp to a relative variation of 1e-3 per step
    CHECK((exact.mean - ode.mean).norm() < 1e-6 * exact.mean.norm());
    CHECK((exact.cov - ode.cov).norm() < 1e-6 * exact.cov.norm());
}

TEST_CASE("coherent drive fills the cavity to its steady amplitude") {
    TransducerModel m = testing::chain(0.0, 0.0, 2.0, 1.0, 0.01);
    const double T = 30.0;
    const auto sched = CouplingSchedule::constant({}, T);
    PortInputs in(3);
    in[0] = PulseShape::sampled({0.0, T}, {1.0, 1.0});
    const auto t = linspace(0.0, T, 31);
    const Trajectory traj = evolve_mean(m, sched, GaussianState::vacuum(3), in, t);
    // da/dt = -kappa/2 a + sqrt(kappa) a_in -> a = 2 a_in / sqrt(kappa); a_out = a_in - sqrt(kappa) a = -a_in
    CHECK(std::abs(traj.amplitude(t.size() - 1, 0) - 2.0 / std::sqrt(2.0)) < 1e-9);
    CHECK(std::abs(traj.output.back()(0) + 1.0) < 1e-9);
}

TEST_CASE("unstable drift has no steady state") {
    TransducerModel m = testing::chain(0.5, 0.6, 0.01, 0.01, 1e-4);
    m.drive[1].sideband = Sideband::blue;
    const LinearSystem sys = rwa_system(m);
    CHECK_FALSE(is_stable(sys.drift()));
    CHECK(max_real_eigenvalue(sys.drift()) > 0.0);
    CHECK_THROWS_AS(steady_state_covariance(sys), PhysicsError);
}

TEST_CASE("reduced mechanical model") {
    TransducerModel m = testing::chain(0.05, 0.0, 1.0, 1.0, 1e-3);
    m.mechanics().n_th = 20.0;
    const auto r = adiabatic_eliminate(m);
    CHECK(r.Gamma == doctest::Approx(0.01));
    CHECK(r.warning.empty());
    CHECK(r.steady_occupation() == doctest::Approx(1e-3 * 20.0 / 0.011));
    CHECK(r.occupation(0.0, 20.0) == 20.0);
    CHECK_FALSE(adiabatic_eliminate(testing::chain(0.5, 0.0, 1.0, 1.0, 1e-3)).warning.empty());
}

TEST_CASE("non-rotating-wave evolution stays close to the resolved-sideband limit") {
    TransducerModel m = testing::chain(0.02, 0.0, 0.2, 0.2, 1e-3);
    m.modes[1].frequency = 5.0;
    m.mechanics().n_th = 10.0;
    const double n[] = {0.0, 10.0, 0.0};
    const auto t = linspace(0.0, 100.0, 401);
    const double n2[] = {0.0, 10.0};
    const Trajectory full = evolve_full_nonrwa(m, 0, GaussianState::thermal(n2), t);
    const Trajectory rwa = evolve_covariance(m, CouplingSchedule::constant({0.02, 0, 0, 0}, 100.0),
                                             GaussianState::thermal(n), t);
    const double a = full.final_state().occupation(1), b = rwa.final_state().occupation(1);
    CHECK(a == doctest::Approx(b).epsilon(0.02));
}

}
