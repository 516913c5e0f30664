#pragma once

// Physical parameters of a three-mode transducer chain:
//   cavity 1  --g1--  mechanics  --g2--  cavity 2
// All rates are angular (rad/s) in SI-angular units, or multiples of the
// mechanical frequency in dimensionless units. Internal math never looks at
// the unit tag except when converting temperatures.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace oemt {

enum class ModeLabel { cavity1, mechanics, cavity2 };
enum class Sideband { red, blue, off_resonant };
enum class UnitSystem { si_angular, dimensionless };

std::string_view to_string(ModeLabel label);
std::string_view to_string(Sideband sideband);
std::string_view to_string(UnitSystem units);
Sideband sideband_from_string(std::string_view name);
UnitSystem units_from_string(std::string_view name);

struct ModeSpec {
    ModeLabel label = ModeLabel::cavity1;
    double frequency = 0.0;   // resonance frequency
    double kappa = 0.0;       // total damping rate (gamma_m for mechanics)
    double kappa_ext = 0.0;   // coupling to the external port
    double kappa_in = 0.0;    // intrinsic loss
    double n_th = 0.0;        // bath occupation

    /// nu = kappa_ext / kappa; zero for an undamped mode.
    double extraction_ratio() const { return kappa > 0.0 ? kappa_ext / kappa : 0.0; }

    static ModeSpec cavity(ModeLabel label, double frequency, double kappa, double nu = 1.0,
                           double n_th = 0.0);
    static ModeSpec mechanics(double frequency, double gamma_m, double n_th = 0.0);
};

/// Linearized coupling g = G * sqrt(n_ph). g is kept real and non-negative.
struct LinearizationSpec {
    double single_photon_coupling = 0.0;  // G
    double photon_number = 1.0;           // n_ph
    double g() const;

    static LinearizationSpec from_g(double g) { return {g, 1.0}; }
};

/// Pump settings of one cavity. `delta` is the interaction-picture detuning:
/// delta = Delta + omega_m on the red sideband, Delta - omega_m on the blue one.
struct DriveSpec {
    Sideband sideband = Sideband::red;
    double delta = 0.0;

    double detuning(double omega_m) const;                      // Delta = omega_d - omega_c
    double drive_frequency(double omega_c, double omega_m) const;  // omega_d
};

struct TransducerModel {
    std::string name;
    UnitSystem units = UnitSystem::dimensionless;
    std::array<ModeSpec, 3> modes{};  // cavity1, mechanics, cavity2
    std::array<LinearizationSpec, 2> coupling{};
    std::array<DriveSpec, 2> drive{};

    const ModeSpec& cavity(int i) const { return modes[i == 0 ? 0 : 2]; }
    ModeSpec& cavity(int i) { return modes[i == 0 ? 0 : 2]; }
    const ModeSpec& mechanics() const { return modes[1]; }
    ModeSpec& mechanics() { return modes[1]; }

    double omega_m() const { return modes[1].frequency; }
    double gamma_m() const { return modes[1].kappa; }
    double g(int i) const { return coupling[i].g(); }
    double kappa(int i) const { return cavity(i).kappa; }
    double nu(int i) const { return cavity(i).extraction_ratio(); }

    /// Conversion (cooling) rate 4 g^2 / kappa of cavity i.
    double Gamma(int i) const;
    double cooperativity(int i) const;
    bool resolved_sideband(int i) const { return omega_m() > kappa(i); }
    bool resolved_sideband() const { return resolved_sideband(0) && resolved_sideband(1); }

    void set_g(int i, double g) { coupling[i] = LinearizationSpec::from_g(g); }
    /// Changes kappa_ext and keeps kappa_in, so kappa follows.
    void set_kappa_ext(int i, double kappa_ext);
    /// Rescales kappa at fixed extraction ratio.
    void set_kappa(int i, double kappa);
    void set_gamma_m(double gamma_m);
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::array<double, 2> Gamma{};
    std::array<double, 2> nu{};
    std::array<double, 2> cooperativity{};
    std::array<bool, 2> resolved{};
    bool resolved_sideband = false;
    bool impedance_matched = false;

    bool ok() const { return violations.empty(); }
};

ValidationReport validate_model(const TransducerModel& model);
/// Throws PhysicsError listing every violation.
void require_valid(const TransducerModel& model);

std::vector<std::string> preset_names();
/// Throws ConfigError (listing the catalog) for an unknown name.
TransducerModel load_preset(std::string_view name);

nlohmann::json to_json(const TransducerModel& model);
/// `where` prefixes error locations (a JSON pointer into the enclosing document).
TransducerModel model_from_json(const nlohmann::json& j, const std::string& where = "");
nlohmann::json to_json(const ValidationReport& report);

}  // namespace oemt
