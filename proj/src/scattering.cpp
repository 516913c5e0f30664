#include "oemt/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oemt/errors.hpp"
#include "oemt/kernels.hpp"
#include "oemt/linear_system.hpp"

namespace oemt {

namespace {

const std::complex<double> I(0.0, 1.0);

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t k = 0; k < n; ++k) v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return v;
}

Eigen::Matrix3cd conversion_matrix_at(const Eigen::Matrix3cd& M0, const Eigen::Vector3d& K, double omega) {
    const Eigen::Matrix3cd R = omega * Eigen::Matrix3cd::Identity() - M0;
    Eigen::PartialPivLU<Eigen::Matrix3cd> lu(R);
    const double det = std::abs(lu.determinant());
    const double scale = std::pow(std::max(R.cwiseAbs().maxCoeff(), 1e-300), 3.0);
    if (!(det > 1e-14 * scale)) {
        std::ostringstream os;
        os << "omega I - M0 is singular at omega = " << omega << " (pole on the real axis; zero damping?)";
        throw PhysicsError(os.str());
    }
    const Eigen::Vector3d sk = K.cwiseSqrt();
    const Eigen::Matrix3cd S = sk.cast<std::complex<double>>().asDiagonal();
    return Eigen::Matrix3cd::Identity() - I * S * lu.inverse() * S;
}

ConversionMatrix conversion_matrix(const TransducerModel& model, std::span<const double> omega_grid, Exec exec) {
    require_valid(model);
    for (int i = 0; i < 2; ++i) {
        if (model.drive[i].sideband == Sideband::blue) {
            throw PhysicsError("conversion matrix requires beam-splitter (red or off-resonant) drives on both cavities");
        }
    }
    ConversionMatrix cm;
    cm.omega.assign(omega_grid.begin(), omega_grid.end());
    cm.T.resize(cm.omega.size());
    cm.nu1 = model.nu(0);
    cm.nu2 = model.nu(1);
    cm.M0 = coupling_matrix(model);
    cm.K = damping_vector(model);
    if (exec == Exec::serial) {
        kernels::conversion_spectrum_serial(cm.M0, cm.K, cm.omega, cm.T);
    } else {
        kernels::conversion_spectrum_omp(cm.M0, cm.K, cm.omega, cm.T);
    }
    return cm;
}

double t31_closed_form(double Gamma1, double Gamma2, double gamma_m) {
    const double den = Gamma1 + Gamma2 + gamma_m;
    return den > 0.0 ? 2.0 * std::sqrt(Gamma1 * Gamma2) / den : 0.0;
}

double t31_closed_form(const TransducerModel& model) {
    return t31_closed_form(model.Gamma(0), model.Gamma(1), model.gamma_m());
}

Halfwidth halfwidth(const ConversionMatrix& cm) {
    const double target = 0.5 * std::abs(cm.evaluate(0.0)(2, 0));
    if (!(target > 0.0)) throw NumericalError("halfwidth undefined: |T31(0)| = 0");
    auto f = [&](double w) { return std::abs(cm.evaluate(w)(2, 0)) - target; };

    std::vector<double> pos;
    for (double w : cm.omega) {
        if (w > 0.0) pos.push_back(w);
    }
    std::sort(pos.begin(), pos.end());
    pos.insert(pos.begin(), 0.0);

    Halfwidth hw;
    double fa = f(pos[0]);
    for (std::size_t k = 1; k < pos.size(); ++k) {
        const double fb = f(pos[k]);
        if ((fa > 0.0) != (fb > 0.0) || fb == 0.0) {
            double a = pos[k - 1], b = pos[k], ya = fa;
            for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it) {
                const double c = 0.5 * (a + b);
                const double yc = f(c);
                if ((yc > 0.0) == (ya > 0.0)) {
                    a = c;
                    ya = yc;
                } else {
                    b = c;
                }
            }
            hw.crossings.push_back(0.5 * (a + b));
        }
        fa = fb;
    }
    if (hw.crossings.empty()) {
        std::ostringstream os;
        os << "|T31| never reaches |T31(0)|/2 on the grid (positive span up to " << pos.back() << ")";
        throw NumericalError(os.str());
    }
    hw.omega = hw.crossings.front();
    return hw;
}

const NoiseChannel& NoiseBudget::channel(const std::string& name) const {
    for (const auto& c : channels) {
        if (c.name == name) return c;
    }
    throw std::out_of_range("no noise channel '" + name + "'");
}

NoiseBudget noise_budget(const TransducerModel& model, double omega) {
    require_valid(model);
    const Eigen::Matrix3cd T = conversion_matrix_at(coupling_matrix(model), damping_vector(model), omega);
    const double nu1 = model.nu(0), nu2 = model.nu(1);
    const double n_m = model.mechanics().n_th;

    NoiseBudget b;
    b.omega = omega;
    const std::complex<double> t31 = T(2, 0), t32 = T(2, 1), t33 = T(2, 2);
    b.channels = {
        {"signal", std::sqrt(nu1 * nu2) * t31, std::sqrt(nu1 * nu2) * t31, 0.0},
        {"mechanical", std::sqrt(nu2) * t32, std::sqrt(nu2) * t32, n_m},
        {"intrinsic1", std::sqrt((1.0 - nu1) * nu2) * t31, std::sqrt((1.0 - nu1) * nu2), model.cavity(0).n_th},
        {"intrinsic2", std::sqrt((1.0 - nu2) * nu2) * (t33 - 1.0), -std::sqrt((1.0 - nu2) * nu2),
         model.cavity(1).n_th},
        {"vacuum_port2", 1.0 + nu2 * (t33 - 1.0), 1.0 - nu2, 0.0},
    };
    for (const auto& c : b.channels) b.total_weight += std::norm(c.coefficient);
    b.mechanical_to_signal = std::abs(t32 / t31);
    const double inf = std::numeric_limits<double>::infinity();
    b.snr = n_m > 0.0 ? nu1 * std::abs(t31) / (std::abs(t32) * std::sqrt(n_m)) : inf;
    b.snr_closed_form =
        (n_m > 0.0 && model.gamma_m() > 0.0) ? nu1 * std::sqrt(model.Gamma(0) / (model.gamma_m() * n_m)) : inf;
    return b;
}

ProbeSpectrum probe_spectrum(const TransducerModel& model, int cavity, std::span<const double> omega_grid,
                             double probe_coupling) {
    require_valid(model);
    if (model.drive[cavity].sideband == Sideband::blue) {
        throw PhysicsError("probe spectrum expects a red-detuned pump on the probed cavity");
    }
    if (!(probe_coupling > 0.0 && probe_coupling <= 1.0)) {
        throw ConfigError("probe_coupling must lie in (0, 1]");
    }
    Eigen::Matrix2cd M;
    M << -model.drive[cavity].delta - 0.5 * I * model.kappa(cavity), model.g(cavity), model.g(cavity),
        -0.5 * I * model.gamma_m();

    ProbeSpectrum s;
    s.omega.assign(omega_grid.begin(), omega_grid.end());
    s.transmission.resize(s.omega.size());
    kernels::probe_transmission_omp(M, probe_coupling * model.kappa(cavity), s.omega, s.transmission);
    const auto& y = s.transmission;
    for (std::size_t k = 1; k + 1 < y.size(); ++k) {
        if (y[k] > y[k - 1] && y[k] >= y[k + 1]) s.maxima.push_back(k);
        if (y[k] < y[k - 1] && y[k] <= y[k + 1]) s.minima.push_back(k);
    }
    return s;
}

double peak_fwhm(const ProbeSpectrum& spectrum, std::size_t peak) {
    const auto& y = spectrum.transmission;
    const auto& x = spectrum.omega;
    const double half = 0.5 * y.at(peak);
    std::size_t l = peak, r = peak;
    while (l > 0 && y[l] > half) --l;
    while (r + 1 < y.size() && y[r] > half) ++r;
    if (y[l] > half || y[r] > half) throw NumericalError("peak does not fall to half maximum on the grid");
    const double xl = x[l] + (half - y[l]) * (x[l + 1] - x[l]) / (y[l + 1] - y[l]);
    const double xr = x[r - 1] + (half - y[r - 1]) * (x[r] - x[r - 1]) / (y[r] - y[r - 1]);
    return xr - xl;
}

}  // namespace oemt
