#include "oemt/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oemt/errors.hpp"

namespace oemt {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

Controls cabs(const Controls& c) {
    return {std::abs(c.g1), std::abs(c.g2), std::abs(c.delta1), std::abs(c.delta2)};
}

Controls cmax(const Controls& a, const Controls& b) {
    return {std::max(a.g1, b.g1), std::max(a.g2, b.g2), std::max(a.delta1, b.delta1),
            std::max(a.delta2, b.delta2)};
}

}  // namespace

double Controls::g0() const { return std::hypot(g1, g2); }

double Controls::max_abs() const {
    return std::max({std::abs(g1), std::abs(g2), std::abs(delta1), std::abs(delta2)});
}

const char* to_string(RampKind kind) {
    switch (kind) {
        case RampKind::constant: return "constant";
        case RampKind::linear: return "linear";
        case RampKind::raised_cosine: return "raised_cosine";
        case RampKind::gaussian: return "gaussian";
    }
    return "constant";
}

RampKind ramp_from_string(const std::string& name) {
    if (name == "constant") return RampKind::constant;
    if (name == "linear") return RampKind::linear;
    if (name == "raised_cosine" || name == "smooth") return RampKind::raised_cosine;
    if (name == "gaussian") return RampKind::gaussian;
    throw ConfigError("unknown ramp kind '" + name + "' (expected constant, linear, raised_cosine, gaussian)");
}

Controls Segment::at(double s) const {
    s = std::clamp(s, 0.0, duration);
    switch (kind) {
        case RampKind::constant: return start;
        case RampKind::linear: return start + (end - start) * (duration > 0.0 ? s / duration : 1.0);
        case RampKind::raised_cosine: {
            const double w = duration > 0.0 ? std::sin(0.5 * pi * s / duration) : 1.0;
            return start + (end - start) * (w * w);
        }
        case RampKind::gaussian: {
            const double x = (s - 0.5 * duration) / width;
            return start + (end - start) * std::exp(-0.5 * x * x);
        }
    }
    return start;
}

Controls Segment::max_rate() const {
    const Controls span = cabs(end - start);
    switch (kind) {
        case RampKind::constant: return {};
        case RampKind::linear: return duration > 0.0 ? span * (1.0 / duration) : Controls{};
        case RampKind::raised_cosine: return duration > 0.0 ? span * (0.5 * pi / duration) : Controls{};
        case RampKind::gaussian: return span * (std::exp(-0.5) / width);
    }
    return {};
}

CouplingSchedule CouplingSchedule::constant(const Controls& c, double duration, double t_start) {
    CouplingSchedule s(t_start);
    s.hold(c, duration);
    return s;
}

CouplingSchedule& CouplingSchedule::append(const Segment& segment) {
    if (!(segment.duration >= 0.0)) throw ConfigError("segment duration must be >= 0");
    if (segment.kind == RampKind::gaussian && !(segment.width > 0.0)) {
        throw ConfigError("gaussian segment needs width > 0");
    }
    segments_.push_back(segment);
    return *this;
}

CouplingSchedule& CouplingSchedule::hold(const Controls& c, double duration) {
    return append({duration, RampKind::constant, c, c, 0.0});
}

CouplingSchedule& CouplingSchedule::ramp(RampKind kind, const Controls& from, const Controls& to,
                                         double duration) {
    return append({duration, kind, from, to, duration / 6.0});
}

double CouplingSchedule::t_end() const {
    double t = t_start_;
    for (const auto& s : segments_) t += s.duration;
    return t;
}

Controls CouplingSchedule::at(double t) const {
    if (segments_.empty()) return {};
    double t0 = t_start_;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const Segment& s = segments_[k];
        if (t < t0 + s.duration || k + 1 == segments_.size()) return s.at(t - t0);
        t0 += s.duration;
    }
    return segments_.back().at(segments_.back().duration);
}

std::vector<double> CouplingSchedule::breakpoints() const {
    std::vector<double> b{t_start_};
    double t = t_start_;
    for (const auto& s : segments_) {
        t += s.duration;
        b.push_back(t);
    }
    return b;
}

Controls CouplingSchedule::max_rate(double t0, double t1) const {
    Controls r;
    double a = t_start_;
    for (const auto& s : segments_) {
        const double b = a + s.duration;
        if (b > t0 && a < t1) r = cmax(r, s.max_rate());
        a = b;
    }
    return r;
}

double CouplingSchedule::max_abs() const {
    double m = 0.0;
    for (const auto& s : segments_) {
        m = std::max({m, s.start.max_abs(), s.end.max_abs()});
        if (s.kind == RampKind::gaussian) m = std::max(m, s.at(0.5 * s.duration).max_abs());
    }
    return m;
}

bool CouplingSchedule::covers(double t0, double t1) const {
    if (segments_.empty()) return false;
    const double tol = 1e-12 * std::max({1.0, std::abs(t_start_), std::abs(t_end())});
    return t0 >= t_start_ - tol && t1 <= t_end() + tol;
}

std::vector<Controls> CouplingSchedule::sample(std::span<const double> t_grid) const {
    std::vector<Controls> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back(at(t));
    return out;
}

AdiabaticityDiagnostic CouplingSchedule::adiabaticity(int samples) const {
    AdiabaticityDiagnostic d;
    if (segments_.empty() || samples < 3) return d;
    const double T = duration();
    const double h = T / (samples - 1);
    d.min_g0 = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Controls c = at(t_start_ + k * h);
        const double theta = std::atan2(c.g1, -c.g2);
        d.min_g0 = std::min(d.min_g0, c.g0());
        if (k > 0 && h > 0.0) d.max_mixing_rate = std::max(d.max_mixing_rate, std::abs(theta - prev) / h);
        prev = theta;
    }
    d.ratio = d.min_g0 > 0.0 ? d.max_mixing_rate / d.min_g0 : std::numeric_limits<double>::infinity();
    return d;
}

PulseShape PulseShape::gaussian(std::complex<double> amplitude, double sigma, double center) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian pulse needs width > 0");
    PulseShape p;
    p.kind = Kind::gaussian;
    p.amplitude = amplitude;
    p.width = sigma;
    p.center = center;
    return p;
}

PulseShape PulseShape::exponential_rise(std::complex<double> amplitude, double rate, double cutoff) {
    if (!(rate > 0.0)) throw ConfigError("exponential-rise pulse needs rate > 0");
    PulseShape p;
    p.kind = Kind::exponential_rise;
    p.amplitude = amplitude;
    p.rate = rate;
    p.center = cutoff;
    return p;
}

PulseShape PulseShape::sampled(std::vector<double> times, std::vector<std::complex<double>> values) {
    if (times.size() != values.size() || times.size() < 2) {
        throw ConfigError("sampled pulse needs matching times/values with at least 2 points");
    }
    if (!std::is_sorted(times.begin(), times.end(), std::less_equal<>())) {
        throw ConfigError("sampled pulse times must be strictly increasing");
    }
    PulseShape p;
    p.kind = Kind::samples;
    p.times = std::move(times);
    p.values = std::move(values);
    return p;
}

std::complex<double> PulseShape::at(double t) const {
    switch (kind) {
        case Kind::gaussian: {
            const double x = width * (t - center);
            return amplitude * std::exp(-0.5 * x * x);
        }
        case Kind::exponential_rise:
            return t < center ? amplitude * std::exp(0.5 * rate * (t - center)) : std::complex<double>{};
        case Kind::samples: {
            if (t < times.front() || t > times.back()) return {};
            const auto it = std::upper_bound(times.begin(), times.end(), t);
            if (it == times.end()) return values.back();
            const std::size_t k = static_cast<std::size_t>(it - times.begin());
            const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
            return values[k - 1] * (1.0 - w) + values[k] * w;
        }
    }
    return {};
}

double PulseShape::energy(double t0, double t1) const {
    const double a2 = std::norm(amplitude);
    switch (kind) {
        case Kind::gaussian: {
            // |A|^2 exp(-sigma^2 (t-c)^2)
            const double s = width;
            return a2 * std::sqrt(pi) / (2.0 * s) *
                   (std::erf(s * (t1 - center)) - std::erf(s * (t0 - center)));
        }
        case Kind::exponential_rise: {
            const double hi = std::min(t1, center);
            if (hi <= t0) return 0.0;
            return a2 / rate * (std::exp(rate * (hi - center)) - std::exp(rate * (t0 - center)));
        }
        case Kind::samples: {
            // Fine trapezoid over the interpolant.
            const double lo = std::max(t0, times.front()), hi = std::min(t1, times.back());
            if (hi <= lo) return 0.0;
            const int n = 20000;
            const double h = (hi - lo) / n;
            double e = 0.5 * (std::norm(at(lo)) + std::norm(at(hi)));
            for (int k = 1; k < n; ++k) e += std::norm(at(lo + k * h));
            return e * h;
        }
    }
    return 0.0;
}

double PulseShape::bandwidth() const {
    switch (kind) {
        case Kind::gaussian: return width;
        case Kind::exponential_rise: return rate;
        case Kind::samples: {
            double dt = std::numeric_limits<double>::infinity();
            for (std::size_t k = 1; k < times.size(); ++k) dt = std::min(dt, times[k] - times[k - 1]);
            return 0.1 * pi / dt;
        }
    }
    return 1.0;
}

namespace {

json controls_to_json(const Controls& c) {
    return json{{"g1", c.g1}, {"g2", c.g2}, {"delta1", c.delta1}, {"delta2", c.delta2}};
}

Controls controls_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("expected controls object {g1, g2, delta1, delta2}", where);
    Controls c;
    c.g1 = j.value("g1", 0.0);
    c.g2 = j.value("g2", 0.0);
    c.delta1 = j.value("delta1", 0.0);
    c.delta2 = j.value("delta2", 0.0);
    return c;
}

std::complex<double> complex_from_json(const json& j) {
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    return {j.get<double>(), 0.0};
}

}  // namespace

json to_json(const CouplingSchedule& schedule) {
    json j;
    j["t_start"] = schedule.t_start();
    j["segments"] = json::array();
    for (const auto& s : schedule.segments()) {
        json e{{"duration", s.duration}, {"kind", to_string(s.kind)}, {"start", controls_to_json(s.start)},
               {"end", controls_to_json(s.end)}};
        if (s.kind == RampKind::gaussian) e["width"] = s.width;
        j["segments"].push_back(e);
    }
    return j;
}

CouplingSchedule schedule_from_json(const json& j, const std::string& where) {
    try {
        CouplingSchedule s(j.value("t_start", 0.0));
        const json& segs = j.at("segments");
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const std::string loc = where + "/segments/" + std::to_string(k);
            const json& e = segs[k];
            Segment seg;
            seg.duration = e.at("duration").get<double>();
            seg.kind = ramp_from_string(e.value("kind", std::string("constant")));
            seg.start = controls_from_json(e.at("start"), loc + "/start");
            seg.end = e.contains("end") ? controls_from_json(e.at("end"), loc + "/end") : seg.start;
            seg.width = e.value("width", seg.duration / 6.0);
            s.append(seg);
        }
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(e.what(), where);
    }
}

PulseShape pulse_from_json(const json& j, const std::string& where) {
    try {
        const std::string kind = j.value("kind", std::string("gaussian"));
        const std::complex<double> amp = j.contains("amplitude") ? complex_from_json(j.at("amplitude")) : 1.0;
        if (kind == "gaussian") {
            return PulseShape::gaussian(amp, j.at("sigma").get<double>(), j.value("center", 0.0));
        }
        if (kind == "exponential_rise") {
            return PulseShape::exponential_rise(amp, j.at("rate").get<double>(), j.value("cutoff", 0.0));
        }
        if (kind == "samples") {
            std::vector<double> t = j.at("times").get<std::vector<double>>();
            std::vector<std::complex<double>> v;
            for (const auto& x : j.at("values")) v.push_back(complex_from_json(x));
            return PulseShape::sampled(std::move(t), std::move(v));
        }
        throw ConfigError("unknown pulse kind '" + kind + "' (expected gaussian, exponential_rise, samples)",
                          where + "/kind");
    } catch (const json::exception& e) {
        throw ConfigError(e.what(), where);
    }
}

}  // namespace oemt
