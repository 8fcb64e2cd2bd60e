#include "gcas/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gcas {

void PhysicalParams::validate() const {
    if (!(vf_over_c > 0.0 && vf_over_c < 1.0)) throw std::invalid_argument("vf_over_c must lie in (0, 1)");
    if (!(separation_m > 0.0) || !std::isfinite(separation_m)) throw std::invalid_argument("separation_m must be > 0");
    if (!(temperature_K >= 0.0) || !std::isfinite(temperature_K)) throw std::invalid_argument("temperature_K must be >= 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
}

double PhysicalParams::characteristic_energy_eV() const {
    return constants::hbar * constants::c / (2.0 * separation_m) / constants::eV;
}

std::string PhysicalParams::dirac_model_warning() const {
    if (dirac_model_valid()) return {};
    std::ostringstream os;
    os << "hbar*c/(2a) = " << characteristic_energy_eV() << " eV exceeds the Dirac-model limit of "
       << kDiracModelLimit_eV << " eV at a = " << separation_m << " m";
    return os.str();
}

}  // namespace gcas
