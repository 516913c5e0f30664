// Serial reference kernels against their OpenMP counterparts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "oemt/kernels.hpp"
#include "oemt/linear_system.hpp"
#include "oemt/scattering.hpp"

using namespace oemt;

namespace {

template <bool Parallel>
void conversion_spectrum(benchmark::State& state) {
    const TransducerModel m = load_preset("dimensionless-fig4");
    const Eigen::Matrix3cd M0 = coupling_matrix(m);
    const Eigen::Vector3d K = damping_vector(m);
    const auto w = linspace(-5.0, 5.0, static_cast<std::size_t>(state.range(0)));
    std::vector<Eigen::Matrix3cd> out(w.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::conversion_spectrum_omp(M0, K, w, out);
        } else {
            kernels::conversion_spectrum_serial(M0, K, w, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void probe_transmission(benchmark::State& state) {
    Eigen::Matrix2cd M;
    M << std::complex<double>(0.0, -0.5), 0.05, 0.05, std::complex<double>(0.0, -5e-4);
    const auto w = linspace(-0.2, 0.2, static_cast<std::size_t>(state.range(0)));
    std::vector<double> out(w.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::probe_transmission_omp(M, 0.5, w, out);
        } else {
            kernels::probe_transmission_serial(M, 0.5, w, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void steady_states(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, 0.5);
    std::vector<Eigen::MatrixXd> A, D;
    for (int k = 0; k < state.range(0); ++k) {
        TransducerModel m = load_preset("dimensionless-fig3");
        m.set_g(0, u(rng));
        m.set_g(1, u(rng));
        m.mechanics().n_th = 100.0;
        const LinearSystem s = rwa_system(m);
        A.push_back(s.drift());
        D.push_back(s.diffusion());
    }
    std::vector<Eigen::MatrixXd> out(A.size());
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::steady_states_omp(A, D, out);
        } else {
            kernels::steady_states_serial(A, D, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(conversion_spectrum<false>)->Name("conversion_spectrum/serial")->Arg(4001)->Arg(64001)->UseRealTime();
BENCHMARK(conversion_spectrum<true>)->Name("conversion_spectrum/omp")->Arg(4001)->Arg(64001)->UseRealTime();
BENCHMARK(probe_transmission<false>)->Name("probe_transmission/serial")->Arg(4001)->Arg(64001)->UseRealTime();
BENCHMARK(probe_transmission<true>)->Name("probe_transmission/omp")->Arg(4001)->Arg(64001)->UseRealTime();
BENCHMARK(steady_states<false>)->Name("steady_states/serial")->Arg(64)->Arg(512)->UseRealTime();
BENCHMARK(steady_states<true>)->Name("steady_states/omp")->Arg(64)->Arg(512)->UseRealTime();

BENCHMARK_MAIN();
