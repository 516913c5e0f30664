#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "../fock_oracle.hpp"
#include "helpers.hpp"
#include "oemt/errors.hpp"
#include "oemt/gaussian.hpp"
#include "oemt/metrics.hpp"

using namespace oemt;

namespace {

Eigen::MatrixXd two_mode_squeezed(double s) {
    const double c = 0.5 * std::cosh(2 * s), h = 0.5 * std::sinh(2 * s);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(4, 4);
    V.diagonal().setConstant(c);
    V(0, 2) = V(2, 0) = h;
    V(1, 3) = V(3, 1) = -h;
    return V;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("fidelity against frozen Fock-basis values") {
    const auto vac = GaussianState::vacuum(1);
    CHECK(gaussian_fidelity(vac, GaussianState::displaced_squeezed(2.0, 0.4)) ==
          doctest::Approx(0.0037061957438973827).epsilon(1e-10));
    CHECK(gaussian_fidelity(vac, GaussianState::coherent(1.0)) ==
          doctest::Approx(0.36787944117144245).epsilon(1e-12));
    CHECK(gaussian_fidelity(GaussianState::displaced_squeezed({0.7, -0.3}, {0.2, 0.1}),
                            GaussianState::displaced_squeezed({-0.4, 1.1}, std::polar(0.5, 2.0))) ==
          doctest::Approx(0.16048535068598038).epsilon(1e-10));
}

TEST_CASE("fidelity matches the in-process Fock oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.0, 0.5), ph(-std::numbers::pi, std::numbers::pi);
    for (int k = 0; k < 5; ++k) {
        const std::complex<double> a1(u(rng), u(rng)), a2(u(rng), u(rng));
        const std::complex<double> r1 = std::polar(r(rng), ph(rng)), r2 = std::polar(r(rng), ph(rng));
        const double F = gaussian_fidelity(GaussianState::displaced_squeezed(a1, r1),
                                           GaussianState::displaced_squeezed(a2, r2));
        const double ref = fock::overlap(fock::displaced_squeezed(a1, r1), fock::displaced_squeezed(a2, r2));
        CHECK(std::abs(F - ref) < 1e-6);
    }
}

TEST_CASE("fidelity of thermal states") {
    const double n1[] = {1.0}, n3[] = {3.0};
    const double F = gaussian_fidelity(GaussianState::thermal(n1), GaussianState::thermal(n3));
    const double ref = 1.0 / std::pow(std::sqrt(2.0 * 4.0) - std::sqrt(3.0), 2);
    CHECK(F == doctest::Approx(ref).epsilon(1e-12));
    CHECK(gaussian_fidelity(GaussianState::thermal(n3), GaussianState::thermal(n3)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(gaussian_fidelity(GaussianState::vacuum(2), GaussianState::vacuum(2)), ConfigError);
}

TEST_CASE("log-negativity") {
    for (double s : {0.0, 0.1, 0.5, 1.3}) {
        CHECK(std::abs(log_negativity(two_mode_squeezed(s)) - 2 * s) < 1e-9);
    }
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(4, 4) * 2.0;
    CHECK(log_negativity(V) == 0.0);
    CHECK_THROWS_AS(log_negativity(Eigen::MatrixXd::Identity(4, 4) * 0.1), PhysicsError);
}

TEST_CASE("EPR variance of a two-mode squeezed vacuum") {
    const EprVariance e = epr_variance(two_mode_squeezed(0.4));
    CHECK(e.value == doctest::Approx(std::exp(-0.8)).epsilon(1e-9));
    CHECK(epr_variance(Eigen::MatrixXd::Identity(4, 4) * 0.5).value == doctest::Approx(1.0));
}

TEST_CASE("effective temperature inverts the Bose law") {
    const double w = 2 * std::numbers::pi * 10e6;
    CHECK(effective_temperature(0.5, w, UnitSystem::si_angular) ==
          doctest::Approx(4.3684593034950744e-4).epsilon(1e-12));
    for (double T : {0.01, 1.0, 300.0}) {
        const double n = bose_occupation(T, w, UnitSystem::si_angular);
        CHECK(effective_temperature(n, w, UnitSystem::si_angular) == doctest::Approx(T).epsilon(1e-10));
    }
    CHECK(effective_temperature(1.0, 1.0, UnitSystem::dimensionless) == doctest::Approx(1.0 / std::log(2.0)));
    CHECK(effective_temperature(0.0, 1.0, UnitSystem::dimensionless) == 0.0);
}

TEST_CASE("model-level bounds") {
    CHECK(single_photon_noise_bound(load_preset("dimensionless-fig4")).bound == doctest::Approx(800.0));
    TransducerModel m = load_preset("dimensionless-fig4");
    m.mechanics().n_th = 800.0;
    CHECK_FALSE(single_photon_noise_bound(m).satisfied);
    const auto g = conversion_gain(load_preset("membrane-bidirectional"));
    CHECK(g.A_e == doctest::Approx(1.1832159566199232).epsilon(1e-13));
    CHECK_FALSE(g.quantum_safe);
    CHECK(impedance_residual(load_preset("dimensionless-fig4")) < 1e-14);
}

TEST_CASE("metric report carries units") {
    const auto j = to_json(model_metrics(load_preset("dimensionless-fig4")));
    CHECK(j["single_photon_noise_bound"]["value"].get<double>() == doctest::Approx(800.0));
    CHECK(j.dump().find("dimensionless") != std::string::npos);
}

}
