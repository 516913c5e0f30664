#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "oemt/kernels.hpp"
#include "oemt/linear_system.hpp"
#include "oemt/parallel.hpp"
#include "oemt/scattering.hpp"

using namespace oemt;

TEST_SUITE("kernels") {

TEST_CASE("conversion spectrum: serial and omp are identical") {
    const TransducerModel m = load_preset("dimensionless-fig4");
    const Eigen::Matrix3cd M0 = coupling_matrix(m);
    const Eigen::Vector3d K = damping_vector(m);
    const auto w = linspace(-4.0, 4.0, 2001);
    std::vector<Eigen::Matrix3cd> a(w.size()), b(w.size());
    kernels::conversion_spectrum_serial(M0, K, w, a);
    kernels::conversion_spectrum_omp(M0, K, w, b);
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(a[k] == b[k]);
}

TEST_CASE("probe transmission: serial and omp are identical") {
    Eigen::Matrix2cd M;
    M << std::complex<double>(0.0, -0.5), 0.3, 0.3, std::complex<double>(0.0, -0.001);
    const auto w = linspace(-1.0, 1.0, 1001);
    std::vector<double> a(w.size()), b(w.size());
    kernels::probe_transmission_serial(M, 0.5, w, a);
    kernels::probe_transmission_omp(M, 0.5, w, b);
    CHECK(a == b);
    for (double x : a) CHECK(x <= 1.0 + 1e-12);
}

TEST_CASE("steady states: serial and omp are identical") {
    std::mt19937_64 rng(3);
    std::vector<Eigen::MatrixXd> A, D;
    for (int k = 0; k < 16; ++k) {
        TransducerModel m = testing::chain(testing::log_uniform(rng, 0.01, 0.5), testing::log_uniform(rng, 0.01, 0.5),
                                           0.3, 0.4, 1e-3);
        m.mechanics().n_th = 10.0 * k;
        const LinearSystem s = rwa_system(m);
        A.push_back(s.drift());
        D.push_back(s.diffusion());
    }
    std::vector<Eigen::MatrixXd> a(A.size()), b(A.size());
    kernels::steady_states_serial(A, D, a);
    kernels::steady_states_omp(A, D, b);
    for (std::size_t k = 0; k < A.size(); ++k) CHECK(a[k] == b[k]);
}

TEST_CASE("thread control") {
    const int before = max_threads();
    set_threads(2);
    CHECK(max_threads() == 2);
    set_threads(before);
    CHECK(max_threads() == before);
}

TEST_CASE("parallel loop rethrows the first error") {
    auto f = [](std::size_t i) {
        if (i == 5) throw std::runtime_error("boom");
    };
    CHECK_THROWS_AS(for_each_index(64, Exec::parallel, f), std::runtime_error);
    CHECK_THROWS_AS(for_each_index(64, Exec::serial, f), std::runtime_error);
}

}
