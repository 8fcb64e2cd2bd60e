#include "gcas/fresnel2d.hpp"

#include <cmath>
#include <stdexcept>

namespace gcas {

namespace {

bool is_infinite(cplx z) { return std::isinf(z.real()) || std::isinf(z.imag()); }

}  // namespace

cplx normal_wavenumber(const SpectralPoint& p) {
    const double k0 = p.omega / constants::c;
    if (p.q <= k0) return {std::sqrt((k0 - p.q) * (k0 + p.q)), 0.0};
    return {0.0, std::sqrt((p.q - k0) * (p.q + k0))};
}

cplx r_te_real(const SpectralPoint& p, const PermittivityPair& e) {
    const cplx r = e.regularized_Tr;
    if (r == cplx(0.0, 0.0)) return 0.0;
    if (is_infinite(r)) return -1.0;
    const cplx root_term = cplx(0.0, constants::c * constants::c * p.q) * normal_wavenumber(p);
    return -r / (root_term + r);
}

cplx r_tm_real(const SpectralPoint& p, const PermittivityPair& e) {
    const cplx chi = e.eps_L - 1.0;
    if (is_infinite(chi)) return 1.0;
    const cplx k0z = normal_wavenumber(p);
    if (k0z == cplx(0.0, 0.0) || chi == cplx(0.0, 0.0)) return 0.0;
    return chi * k0z / (cplx(0.0, p.q) + chi * k0z);
}

ReflectionPair r_pair_real(const SpectralPoint& p, const PermittivityPair& e) {
    return {r_tm_real(p, e), r_te_real(p, e), FrequencyAxis::Real};
}

ReflectionPair r_pair_imag(const MatsubaraPoint& p, const PermittivityPair& e) {
    const cplx chi = e.eps_L - 1.0;
    const cplx r = e.regularized_Tr;
    if (std::abs(chi.imag()) > 1e-10 * std::abs(chi) || std::abs(r.imag()) > 1e-10 * std::abs(r))
        throw std::invalid_argument("r_pair_imag: permittivities must be real on the imaginary axis");
    const double kappa = std::hypot(p.q, p.xi / constants::c);  // sqrt(q^2 + xi^2/c^2)
    ReflectionPair out;
    out.axis = FrequencyAxis::Imaginary;
    if (std::isinf(chi.real()))
        out.r_TM = 1.0;
    else
        out.r_TM = chi.real() * kappa / (p.q + chi.real() * kappa);
    if (std::isinf(r.real()))
        out.r_TE = -1.0;
    else if (r.real() != 0.0)
        out.r_TE = -r.real() / (constants::c * constants::c * p.q * kappa + r.real());
    return out;
}

ReflectionPair r_from_conductivity(const SpectralPoint& p, const Conductivity& sigma) {
    if (!(p.omega > 0.0)) throw std::invalid_argument("r_from_conductivity: omega must be > 0");
    const cplx k0z = normal_wavenumber(p);
    const cplx cos_theta = constants::c * k0z / p.omega;
    const cplx te = 2.0 * constants::pi * p.omega * sigma.sigma_Tr;
    const cplx tm = 2.0 * constants::pi * sigma.sigma_L * cos_theta;
    ReflectionPair out;
    out.r_TE = te == cplx(0.0, 0.0) ? cplx(0.0) : -te / (constants::c * constants::c * k0z + te);
    out.r_TM = tm == cplx(0.0, 0.0) ? cplx(0.0) : tm / (constants::c + tm);
    return out;
}

}  // namespace gcas
