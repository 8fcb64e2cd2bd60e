#pragma once

// Reflection coefficients of a free-standing 2D sheet for TM and TE
// polarizations, from the permittivities or from the sheet conductivity.
//
// The normal wave number is k0z = sqrt(omega^2/c^2 - q^2) for q <= omega/c and
// k0z = i sqrt(q^2 - omega^2/c^2) above the light cone (decaying waves).

#include "gcas/graphene_response.hpp"

namespace gcas {

enum class FrequencyAxis { Real, Imaginary };

struct ReflectionPair {
    cplx r_TM;
    cplx r_TE;
    FrequencyAxis axis = FrequencyAxis::Real;
};

/// k0z for a real-frequency point, with the branch rule above.
cplx normal_wavenumber(const SpectralPoint& p);

/// -omega^2 (eps_Tr - 1) / [i c^2 q k0z + omega^2 (eps_Tr - 1)], built from
/// e.regularized_Tr. Returns -1 when k0z q = 0 and eps_Tr != 1.
cplx r_te_real(const SpectralPoint& p, const PermittivityPair& e);

/// (eps_L - 1) k0z / [i q + (eps_L - 1) k0z]. Returns 0 at k0z = 0 and 1 when
/// eps_L is infinite.
cplx r_tm_real(const SpectralPoint& p, const PermittivityPair& e);

ReflectionPair r_pair_real(const SpectralPoint& p, const PermittivityPair& e);

/// Imaginary-axis coefficients; both real. TE uses regularized_Tr, so l = 0 works.
/// Throws std::invalid_argument if the permittivities carry an imaginary part
/// above 1e-10 of their magnitude.
ReflectionPair r_pair_imag(const MatsubaraPoint& p, const PermittivityPair& e);

/// Conductivity form: r_TE = -2 pi omega sigma_Tr / (c^2 k0z + 2 pi omega sigma_Tr),
/// r_TM = 2 pi sigma_L cos(theta0) / (c + 2 pi sigma_L cos(theta0)) with
/// cos(theta0) = c k0z / omega. Throws std::invalid_argument for omega <= 0.
ReflectionPair r_from_conductivity(const SpectralPoint& p, const Conductivity& sigma);

}  // namespace gcas
