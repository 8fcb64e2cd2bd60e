#pragma once

#include <numbers>
#include <string>

namespace gcas {

/// CODATA 2018 values, SI units.
namespace constants {
inline constexpr double c = 299792458.0;           // m/s
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double kB = 1.380649e-23;         // J/K
inline constexpr double alpha = 7.2973525693e-3;   // fine-structure constant
inline constexpr double eV = 1.602176634e-19;      // J
inline constexpr double zeta3 = 1.2020569031595943;
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

/// Upper end of the energy range where the Dirac model applies.
inline constexpr double kDiracModelLimit_eV = 3.0;

/// Fixed inputs of a calculation: sheet temperature, separation and the
/// Dirac-model material constants.
struct PhysicalParams {
    double temperature_K = 300.0;
    double separation_m = 200e-9;
    double vf_over_c = 1.0 / 300.0;
    double alpha = constants::alpha;

    /// Throws std::invalid_argument on any violated bound.
    void validate() const;

    double fermi_velocity() const { return vf_over_c * constants::c; }

    /// hbar * omega_c with omega_c = c / (2a), in eV.
    double characteristic_energy_eV() const;

    bool dirac_model_valid() const { return characteristic_energy_eV() <= kDiracModelLimit_eV; }

    /// Empty when the Dirac model applies, otherwise a human-readable warning.
    std::string dirac_model_warning() const;
};

}  // namespace gcas
