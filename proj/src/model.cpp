#include "oemt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oemt/errors.hpp"

namespace oemt {

using nlohmann::json;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr std::string_view kModeNames[] = {"cavity1", "mechanics", "cavity2"};

// Bose occupation for hbar*omega / (k_B T) = x.
double bose(double x) { return 1.0 / std::expm1(x); }

}  // namespace

std::string_view to_string(ModeLabel label) { return kModeNames[static_cast<int>(label)]; }

std::string_view to_string(Sideband sideband) {
    switch (sideband) {
        case Sideband::red: return "red";
        case Sideband::blue: return "blue";
        case Sideband::off_resonant: return "off_resonant";
    }
    return "red";
}

std::string_view to_string(UnitSystem units) {
    return units == UnitSystem::si_angular ? "si_angular" : "dimensionless";
}

Sideband sideband_from_string(std::string_view name) {
    if (name == "red") return Sideband::red;
    if (name == "blue") return Sideband::blue;
    if (name == "off_resonant" || name == "off-resonant") return Sideband::off_resonant;
    throw ConfigError("unknown sideband '" + std::string(name) + "' (expected red, blue, off_resonant)");
}

UnitSystem units_from_string(std::string_view name) {
    if (name == "si_angular" || name == "SI-angular" || name == "si") return UnitSystem::si_angular;
    if (name == "dimensionless") return UnitSystem::dimensionless;
    throw ConfigError("unknown unit system '" + std::string(name) +
                      "' (expected si_angular or dimensionless)");
}

ModeSpec ModeSpec::cavity(ModeLabel label, double frequency, double kappa, double nu, double n_th) {
    ModeSpec m;
    m.label = label;
    m.frequency = frequency;
    m.kappa = kappa;
    m.kappa_ext = nu * kappa;
    m.kappa_in = kappa - m.kappa_ext;
    m.n_th = n_th;
    return m;
}

ModeSpec ModeSpec::mechanics(double frequency, double gamma_m, double n_th) {
    ModeSpec m;
    m.label = ModeLabel::mechanics;
    m.frequency = frequency;
    m.kappa = gamma_m;
    m.kappa_ext = 0.0;
    m.kappa_in = gamma_m;
    m.n_th = n_th;
    return m;
}

double LinearizationSpec::g() const { return single_photon_coupling * std::sqrt(photon_number); }

double DriveSpec::detuning(double omega_m) const {
    switch (sideband) {
        case Sideband::blue: return delta + omega_m;
        case Sideband::red:
        case Sideband::off_resonant: break;
    }
    return delta - omega_m;
}

double DriveSpec::drive_frequency(double omega_c, double omega_m) const {
    return omega_c + detuning(omega_m);
}

double TransducerModel::Gamma(int i) const {
    const double k = kappa(i);
    const double gi = g(i);
    return k > 0.0 ? 4.0 * gi * gi / k : 0.0;
}

double TransducerModel::cooperativity(int i) const {
    return gamma_m() > 0.0 ? Gamma(i) / gamma_m() : std::numeric_limits<double>::infinity();
}

void TransducerModel::set_kappa_ext(int i, double kappa_ext) {
    ModeSpec& c = cavity(i);
    c.kappa_ext = kappa_ext;
    c.kappa = kappa_ext + c.kappa_in;
}

void TransducerModel::set_kappa(int i, double kappa) {
    ModeSpec& c = cavity(i);
    const double nu = c.extraction_ratio();
    c.kappa = kappa;
    c.kappa_ext = nu * kappa;
    c.kappa_in = kappa - c.kappa_ext;
}

void TransducerModel::set_gamma_m(double gamma_m) {
    modes[1].kappa = gamma_m;
    modes[1].kappa_in = gamma_m - modes[1].kappa_ext;
}

ValidationReport validate_model(const TransducerModel& model) {
    ValidationReport report;
    auto fail = [&](const std::string& field, const std::string& constraint) {
        report.violations.push_back(field + ": " + constraint);
    };

    for (const ModeSpec& m : model.modes) {
        const std::string name(to_string(m.label));
        const double values[] = {m.frequency, m.kappa, m.kappa_ext, m.kappa_in, m.n_th};
        const char* fields[] = {"frequency", "kappa", "kappa_ext", "kappa_in", "n_th"};
        for (int k = 0; k < 5; ++k) {
            if (!std::isfinite(values[k])) {
                fail(name + "." + fields[k], "must be finite");
            } else if (values[k] < 0.0) {
                fail(name + "." + fields[k], "must be >= 0");
            }
        }
        if (m.kappa_ext > m.kappa) {
            fail(name + ".kappa_ext", "must not exceed kappa (total damping)");
        }
        const double scale = std::max({std::abs(m.kappa), std::abs(m.kappa_ext), std::abs(m.kappa_in), 1e-300});
        if (std::abs(m.kappa_ext + m.kappa_in - m.kappa) > 1e-12 * scale) {
            fail(name + ".kappa", "kappa_ext + kappa_in must equal kappa");
        }
    }
    if (!(model.omega_m() > 0.0)) fail("mechanics.frequency", "omega_m must be > 0");

    for (int i = 0; i < 2; ++i) {
        const std::string name = "coupling[" + std::to_string(i) + "]";
        const auto& c = model.coupling[i];
        if (!(c.single_photon_coupling >= 0.0)) fail(name + ".G", "must be >= 0");
        if (!(c.photon_number >= 0.0)) fail(name + ".n_ph", "must be >= 0");
        if (!std::isfinite(model.drive[i].delta)) {
            fail("drive[" + std::to_string(i) + "].delta", "must be finite");
        }
    }

    for (int i = 0; i < 2; ++i) {
        report.Gamma[i] = model.Gamma(i);
        report.nu[i] = model.nu(i);
        report.cooperativity[i] = model.cooperativity(i);
        report.resolved[i] = model.resolved_sideband(i);
    }
    report.resolved_sideband = report.resolved[0] && report.resolved[1];
    const double sum = report.Gamma[0] + report.Gamma[1];
    report.impedance_matched = sum > 0.0 && std::abs(report.Gamma[0] - report.Gamma[1]) / sum < 1e-9;
    return report;
}

void require_valid(const TransducerModel& model) {
    const ValidationReport report = validate_model(model);
    if (report.ok()) return;
    std::ostringstream os;
    os << "invalid model '" << model.name << "':";
    for (const auto& v : report.violations) os << "\n  " << v;
    throw PhysicsError(os.str());
}

std::vector<std::string> preset_names() {
    return {"jila-microwave", "membrane-bidirectional", "piezo-crystal",
            "rf-membrane",    "dimensionless-fig3",     "dimensionless-fig4"};
}

TransducerModel load_preset(std::string_view name) {
    TransducerModel m;
    m.name = std::string(name);

    if (name == "dimensionless-fig3") {
        m.units = UnitSystem::dimensionless;
        m.modes[0] = ModeSpec::cavity(ModeLabel::cavity1, 0.0, 0.01);
        m.modes[1] = ModeSpec::mechanics(1.0, 1e-5, 0.0);
        m.modes[2] = ModeSpec::cavity(ModeLabel::cavity2, 0.0, 0.01);
        m.set_g(0, 0.1);
        m.set_g(1, 0.07);
        return m;
    }
    if (name == "dimensionless-fig4") {
        // omega_m only enters through the sideband flags; any value far above
        // the cavity linewidths keeps the RWA chain consistent.
        m.units = UnitSystem::dimensionless;
        m.modes[0] = ModeSpec::cavity(ModeLabel::cavity1, 0.0, 3.2);
        m.modes[1] = ModeSpec::mechanics(1e3, 0.001, 0.0);
        m.modes[2] = ModeSpec::cavity(ModeLabel::cavity2, 0.0, 1.8);
        m.set_g(0, 0.8);
        m.set_g(1, 0.6);
        return m;
    }
    if (name == "jila-microwave") {
        // Single microwave cavity on a drumhead; cavity 2 is present but uncoupled.
        m.units = UnitSystem::si_angular;
        const double omega_m = two_pi * 10e6;
        const double kappa = two_pi * 170e3;
        m.modes[0] = ModeSpec::cavity(ModeLabel::cavity1, two_pi * 7.5e9, kappa);
        m.modes[1] = ModeSpec::mechanics(omega_m, two_pi * 30.0, 40.0);
        m.modes[2] = ModeSpec::cavity(ModeLabel::cavity2, two_pi * 7.5e9, kappa);
        m.coupling[0] = {two_pi * 400.0, 1e6};
        m.coupling[1] = {two_pi * 400.0, 0.0};
        return m;
    }
    if (name == "membrane-bidirectional") {
        // Linewidths chosen so that 1 + (kappa/omega_m)^2 = sqrt(1.4).
        m.units = UnitSystem::si_angular;
        const double omega_m = two_pi * 560e3;
        const double kappa = omega_m * std::sqrt(std::sqrt(1.4) - 1.0);
        const double n_th = bose(1.054571817e-34 * omega_m / (1.380649e-23 * 4.0));
        m.modes[0] = ModeSpec::cavity(ModeLabel::cavity1, two_pi * 7e9, kappa);
        m.modes[1] = ModeSpec::mechanics(omega_m, two_pi * 0.5, n_th);
        m.modes[2] = ModeSpec::cavity(ModeLabel::cavity2, two_pi * 282e12, kappa);
        m.set_g(0, two_pi * 20e3);
        m.set_g(1, two_pi * 20e3);
        return m;
    }
    if (name == "piezo-crystal") {
        // Mechanics driven piezoelectrically; the optical cavity is cavity 2.
        m.units = UnitSystem::si_angular;
        const double omega_m = two_pi * 4e9;
        m.modes[0] = ModeSpec::cavity(ModeLabel::cavity1, two_pi * 4e9, two_pi * 1e6);
        m.modes[1] = ModeSpec::mechanics(omega_m, two_pi * 1e6, 1500.0);
        m.modes[2] = ModeSpec::cavity(ModeLabel::cavity2, two_pi * 196e12, two_pi * 2.5e9);
        m.coupling[0] = {0.0, 0.0};
        m.coupling[1] = {two_pi * 250e3, 1e2};
        return m;
    }
    if (name == "rf-membrane") {
        // LC circuit on cavity 1; the optical readout reflects off the membrane
        // (no optical cavity), so cavity 2 is uncoupled.
        m.units = UnitSystem::si_angular;
        const double omega_m = two_pi * 0.72e6;
        const double n_th = bose(1.054571817e-34 * omega_m / (1.380649e-23 * 300.0));
        m.modes[0] = ModeSpec::cavity(ModeLabel::cavity1, two_pi * 0.72e6, two_pi * 5.5e3);
        m.modes[1] = ModeSpec::mechanics(omega_m, two_pi * 1.0, n_th);
        m.modes[2] = ModeSpec::cavity(ModeLabel::cavity2, two_pi * 0.72e6, two_pi * 5.5e3);
        m.set_g(0, two_pi * 10e3);
        m.set_g(1, 0.0);
        return m;
    }

    std::ostringstream os;
    os << "unknown preset '" << name << "'; available:";
    for (const auto& n : preset_names()) os << ' ' << n;
    throw ConfigError(os.str());
}

namespace {

json mode_to_json(const ModeSpec& m) {
    return json{{"frequency", m.frequency}, {"kappa", m.kappa}, {"kappa_ext", m.kappa_ext},
                {"kappa_in", m.kappa_in},   {"n_th", m.n_th}};
}

double number_at(const json& j, const char* key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("expected a number for '") + key + "'", where + "/" + key);
    return v.get<double>();
}

ModeSpec mode_from_json(const json& j, ModeLabel label, const std::string& where) {
    if (!j.is_object()) throw ConfigError("expected an object", where);
    ModeSpec m;
    m.label = label;
    m.frequency = j.contains("frequency") ? number_at(j, "frequency", where) : 0.0;
    m.n_th = j.contains("n_th") ? number_at(j, "n_th", where) : 0.0;

    if (label == ModeLabel::mechanics) {
        const char* key = j.contains("gamma") ? "gamma" : "kappa";
        if (!j.contains(key)) throw ConfigError("missing 'gamma'", where);
        m.kappa = number_at(j, key, where);
        m.kappa_ext = j.contains("kappa_ext") ? number_at(j, "kappa_ext", where) : 0.0;
        m.kappa_in = m.kappa - m.kappa_ext;
        return m;
    }

    const bool has_k = j.contains("kappa"), has_ext = j.contains("kappa_ext"),
               has_in = j.contains("kappa_in"), has_nu = j.contains("nu");
    if (has_k) m.kappa = number_at(j, "kappa", where);
    if (has_k && has_nu) {
        m.kappa_ext = number_at(j, "nu", where) * m.kappa;
        m.kappa_in = m.kappa - m.kappa_ext;
    } else if (has_k && has_ext && has_in) {
        m.kappa_ext = number_at(j, "kappa_ext", where);
        m.kappa_in = number_at(j, "kappa_in", where);
    } else if (has_k && has_ext) {
        m.kappa_ext = number_at(j, "kappa_ext", where);
        m.kappa_in = m.kappa - m.kappa_ext;
    } else if (has_k && has_in) {
        m.kappa_in = number_at(j, "kappa_in", where);
        m.kappa_ext = m.kappa - m.kappa_in;
    } else if (has_ext && has_in) {
        m.kappa_ext = number_at(j, "kappa_ext", where);
        m.kappa_in = number_at(j, "kappa_in", where);
        m.kappa = m.kappa_ext + m.kappa_in;
    } else if (has_k) {
        m.kappa_ext = m.kappa;
        m.kappa_in = 0.0;
    } else {
        throw ConfigError("cavity needs 'kappa' (optionally with 'nu'/'kappa_ext'/'kappa_in')", where);
    }
    return m;
}

}  // namespace

json to_json(const TransducerModel& model) {
    json j;
    j["name"] = model.name;
    j["units"] = std::string(to_string(model.units));
    j["cavity1"] = mode_to_json(model.modes[0]);
    json mech = mode_to_json(model.modes[1]);
    mech["gamma"] = mech["kappa"];
    mech.erase("kappa");
    j["mechanics"] = mech;
    j["cavity2"] = mode_to_json(model.modes[2]);
    for (int i = 0; i < 2; ++i) {
        j["coupling"].push_back(json{{"G", model.coupling[i].single_photon_coupling},
                                     {"n_ph", model.coupling[i].photon_number},
                                     {"g", model.g(i)}});
        j["drive"].push_back(json{{"sideband", std::string(to_string(model.drive[i].sideband))},
                                  {"delta", model.drive[i].delta}});
    }
    return j;
}

TransducerModel model_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("model must be an object", where);
    TransducerModel m;
    try {
        m.name = j.value("name", std::string("custom"));
        m.units = units_from_string(j.value("units", std::string("dimensionless")));
    } catch (const ConfigError& e) {
        throw ConfigError(e.what(), where + "/units");
    } catch (const json::exception& e) {
        throw ConfigError(e.what(), where);
    }
    for (int k = 0; k < 3; ++k) {
        const std::string key(kModeNames[k]);
        if (!j.contains(key)) throw ConfigError("missing '" + key + "'", where);
        try {
            m.modes[k] = mode_from_json(j.at(key), static_cast<ModeLabel>(k), where + "/" + key);
        } catch (const json::exception& e) {
            throw ConfigError(e.what(), where + "/" + key);
        }
    }
    if (j.contains("coupling")) {
        const json& c = j.at("coupling");
        if (!c.is_array() || c.size() != 2) throw ConfigError("'coupling' must be an array of 2 entries", where + "/coupling");
        for (int i = 0; i < 2; ++i) {
            const std::string loc = where + "/coupling/" + std::to_string(i);
            if (c[i].contains("G")) {
                m.coupling[i] = {number_at(c[i], "G", loc),
                                 c[i].contains("n_ph") ? number_at(c[i], "n_ph", loc) : 1.0};
            } else if (c[i].contains("g")) {
                m.set_g(i, number_at(c[i], "g", loc));
            } else {
                throw ConfigError("coupling entry needs 'g' or 'G'", loc);
            }
        }
    }
    if (j.contains("drive")) {
        const json& d = j.at("drive");
        if (!d.is_array() || d.size() != 2) throw ConfigError("'drive' must be an array of 2 entries", where + "/drive");
        for (int i = 0; i < 2; ++i) {
            const std::string loc = where + "/drive/" + std::to_string(i);
            try {
                m.drive[i].sideband = sideband_from_string(d[i].value("sideband", std::string("red")));
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), loc + "/sideband");
            }
            m.drive[i].delta = d[i].contains("delta") ? number_at(d[i], "delta", loc) : 0.0;
        }
    }
    return m;
}

json to_json(const ValidationReport& report) {
    json j;
    j["ok"] = report.ok();
    j["violations"] = report.violations;
    j["Gamma"] = report.Gamma;
    j["nu"] = report.nu;
    j["cooperativity"] = json::array();
    for (double c : report.cooperativity) {
        j["cooperativity"].push_back(std::isfinite(c) ? json(c) : json("inf"));
    }
    j["resolved"] = report.resolved;
    j["resolved_sideband"] = report.resolved_sideband;
    j["impedance_matched"] = report.impedance_matched;
    return j;
}

}  // namespace oemt
