#include "oemt/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "oemt/errors.hpp"
#include "oemt/scattering.hpp"

namespace oemt {

namespace {

constexpr double hbar = 1.054571817e-34;
constexpr double k_B = 1.380649e-23;

// hbar omega / k_B in the temperature unit of `units`.
double energy_scale(double omega, UnitSystem units) {
    return units == UnitSystem::si_angular ? hbar * omega / k_B : omega;
}

void require_physical(const Eigen::MatrixXd& V, const char* what) {
    GaussianState s;
    s.mean = Eigen::VectorXd::Zero(V.rows());
    s.cov = V;
    if (!s.is_physical()) {
        throw PhysicsError(std::string(what) + ": covariance violates the uncertainty principle (margin " +
                           std::to_string(s.physicality_margin()) + ")");
    }
}

}  // namespace

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
    if (a.modes() != 1 || b.modes() != 1) {
        throw ConfigError("gaussian_fidelity compares single-mode states only");
    }
    require_physical(a.cov, "fidelity");
    require_physical(b.cov, "fidelity");
    const Eigen::Matrix2d S = a.cov + b.cov;
    const Eigen::Vector2d d = a.mean - b.mean;
    const double Delta = S.determinant();
    const double delta = 4.0 * std::max(0.0, a.cov.determinant() - 0.25) * std::max(0.0, b.cov.determinant() - 0.25);
    const double expo = -0.5 * d.dot(S.ldlt().solve(d));
    const double F = std::exp(expo) / (std::sqrt(Delta + delta) - std::sqrt(delta));
    return std::clamp(F, 0.0, 1.0);
}

double partial_transpose_eigenvalue(const Eigen::MatrixXd& V) {
    if (V.rows() != 4 || V.cols() != 4) throw ConfigError("log_negativity expects a two-mode (4x4) covariance");
    require_physical(V, "log_negativity");
    const double detA = V.block<2, 2>(0, 0).determinant();
    const double detB = V.block<2, 2>(2, 2).determinant();
    const double detC = V.block<2, 2>(0, 2).determinant();
    const double Dt = detA + detB - 2.0 * detC;
    const double disc = std::max(0.0, Dt * Dt - 4.0 * V.determinant());
    return std::sqrt(std::max(0.0, 0.5 * (Dt - std::sqrt(disc))));
}

double log_negativity(const Eigen::MatrixXd& V) {
    const double nu = partial_transpose_eigenvalue(V);
    if (nu <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(0.0, -std::log(2.0 * nu));
}

EprVariance epr_variance(const Eigen::MatrixXd& V) {
    if (V.rows() != 4 || V.cols() != 4) throw ConfigError("epr_variance expects a two-mode (4x4) covariance");
    auto value = [&](double phi) {
        Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
        R.block<2, 2>(2, 2) = rotation(phi);
        const Eigen::Matrix4d W = R * V * R.transpose();
        const Eigen::Vector4d u(1.0, 0.0, -1.0, 0.0), v(0.0, 1.0, 0.0, 1.0);
        return 0.5 * (u.dot(W * u) + v.dot(W * v));
    };
    const int n = 360;
    const double step = 2.0 * std::numbers::pi / n;
    int best = 0;
    double best_val = value(0.0);
    for (int k = 1; k < n; ++k) {
        const double y = value(k * step);
        if (y < best_val) {
            best_val = y;
            best = k;
        }
    }
    const auto r = boost::math::tools::brent_find_minima(value, (best - 1) * step, (best + 1) * step,
                                                            std::numeric_limits<double>::digits / 2);
    EprVariance e;
    if (r.second < best_val) {
        e.value = r.second;
        e.phase = std::remainder(r.first, 2.0 * std::numbers::pi);
    } else {
        e.value = best_val;
        e.phase = std::remainder(best * step, 2.0 * std::numbers::pi);
    }
    return e;
}

double bose_occupation(double temperature, double omega, UnitSystem units) {
    if (temperature < 0.0) throw PhysicsError("temperature must be >= 0");
    if (temperature == 0.0 || omega <= 0.0) return 0.0;
    return 1.0 / std::expm1(energy_scale(omega, units) / temperature);
}

double effective_temperature(double occupation, double omega, UnitSystem units) {
    if (!(occupation >= 0.0)) throw PhysicsError("occupation must be >= 0");
    if (occupation == 0.0) return 0.0;
    return energy_scale(omega, units) / std::log1p(1.0 / occupation);
}

ConversionGain conversion_gain(const TransducerModel& model) {
    ConversionGain g;
    const double wm = model.omega_m();
    g.A_e = 1.0 + std::pow(model.kappa(0) / wm, 2);
    g.A_o = 1.0 + std::pow(model.kappa(1) / wm, 2);
    g.A = g.A_e * g.A_o;
    g.quantum_safe = g.A - 1.0 < 0.01;
    return g;
}

NoiseBound single_photon_noise_bound(const TransducerModel& model) {
    NoiseBound b;
    const double gm = model.gamma_m();
    b.bound = gm > 0.0 ? std::min(model.Gamma(0), model.Gamma(1)) / gm : std::numeric_limits<double>::infinity();
    b.satisfied = model.mechanics().n_th < b.bound;
    return b;
}

double impedance_residual(const TransducerModel& model) {
    const double s = model.Gamma(0) + model.Gamma(1);
    return s > 0.0 ? std::abs(model.Gamma(0) - model.Gamma(1)) / s : 0.0;
}

MetricReport model_metrics(const TransducerModel& model) {
    MetricReport r;
    r.units = model.units;
    r.gain = conversion_gain(model);
    r.noise_bound = single_photon_noise_bound(model);
    r.impedance_residual = impedance_residual(model);
    if (model.drive[0].sideband != Sideband::blue && model.drive[1].sideband != Sideband::blue &&
        model.gamma_m() > 0.0 && model.kappa(0) > 0.0 && model.kappa(1) > 0.0) {
        r.snr = noise_budget(model, 0.0).snr;
    }
    for (const auto& m : model.modes) r.occupations.push_back(m.n_th);
    return r;
}

nlohmann::json to_json(const MetricReport& r) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    };
    nlohmann::json j;
    const bool si = r.units == UnitSystem::si_angular;
    j["units"] = std::string(to_string(r.units));
    if (r.fidelity) j["fidelity"] = {{"value", num(*r.fidelity)}, {"unit", "1"}};
    if (r.log_negativity) j["log_negativity"] = {{"value", num(*r.log_negativity)}, {"unit", "nepers"}};
    j["occupations"] = {{"value", r.occupations}, {"unit", "quanta"}};
    if (r.effective_temperature) {
        j["effective_temperature"] = {{"value", num(*r.effective_temperature)},
                                      {"unit", si ? "K" : "hbar*omega_m/k_B"}};
    }
    j["conversion_gain"] = {{"A_e", r.gain.A_e}, {"A_o", r.gain.A_o}, {"A", r.gain.A},
                            {"quantum_safe", r.gain.quantum_safe}, {"unit", "1"}};
    j["single_photon_noise_bound"] = {{"value", num(r.noise_bound.bound)},
                                      {"satisfied", r.noise_bound.satisfied},
                                      {"unit", "quanta"}};
    if (r.snr) j["snr"] = {{"value", num(*r.snr)}, {"unit", "1"}};
    j["impedance_residual"] = {{"value", r.impedance_residual}, {"unit", "1"}};
    return j;
}

}  // namespace oemt
