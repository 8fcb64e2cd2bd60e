#pragma once

// Spatially nonlocal longitudinal and transverse permittivities of a pristine
// (gapless, undoped) graphene sheet in the Dirac model, on the real and the
// imaginary frequency axis, plus the maps to the polarization tensor and to
// the 2D conductivity.
//
// Conventions:
//  * omega is an angular frequency in rad/s, q an in-plane wave number in 1/m.
//  * Real-axis results are retarded: Im eps >= 0 for omega > 0.
//  * Inside the band |x| < vF q the kernel F(x) = sqrt(x^2 - vF^2 q^2) takes the
//    lower branch -i sqrt(vF^2 q^2 - x^2) (and B = x^2/F follows). For q > omega/vF
//    the radicands 1 - w^2 - 2 lambda t w are continued as omega -> omega + i0,
//    i.e. sqrt of a negative radicand is -i lambda sqrt(|.|).

#include "gcas/params.hpp"

#include <complex>
#include <utility>

namespace gcas {

using cplx = std::complex<double>;

struct SpectralPoint {
    double q = 0.0;      // 1/m
    double omega = 0.0;  // rad/s
};

/// xi_l = 2 pi kB T l / hbar.
double matsubara_frequency(int l, double temperature_K);

struct MatsubaraPoint {
    double q = 0.0;  // 1/m
    int l = 0;
    double xi = 0.0;  // rad/s

    static MatsubaraPoint make(double q, int l, double temperature_K) {
        return {q, l, matsubara_frequency(l, temperature_K)};
    }
};

enum class SpectralRegion { Propagating, Plasmonic, DeepEvanescent };

const char* to_string(SpectralRegion r);

/// Propagating: q <= omega/c. Plasmonic: omega/c < q <= omega/vF.
/// DeepEvanescent: q > omega/vF.
SpectralRegion classify_region(const SpectralPoint& p, const PhysicalParams& params);

struct PermittivityPair {
    cplx eps_L{1.0, 0.0};
    cplx eps_Tr{1.0, 0.0};
    /// omega^2 (eps_Tr - 1) on the real axis, xi^2 (eps_Tr - 1) on the imaginary
    /// axis, in (rad/s)^2. Finite at xi = 0 where eps_Tr itself diverges.
    cplx regularized_Tr{0.0, 0.0};
    /// Temperature-dependent parts of eps - 1; eps - 1 = zero-temperature part + thermal part.
    cplx thermal_L{0.0, 0.0};
    cplx thermal_Tr{0.0, 0.0};
    double error_estimate = 0.0;
    bool converged = true;

    cplx zero_temperature_L() const { return eps_L - 1.0 - thermal_L; }
    cplx zero_temperature_Tr() const { return eps_Tr - 1.0 - thermal_Tr; }
};

/// Pi_00 and the combination Pi = q^2 Pi_mu^mu + (omega^2/c^2 - q^2) Pi_00, both in
/// the units implied by eps_L - 1 = c^2 Pi_00 / (2 hbar q) and
/// eps_Tr - 1 = -c^2 Pi / (2 hbar q omega^2).
struct PolarizationComponents {
    cplx pi_00;
    cplx pi_combo;
};

struct ThermalKernelParams {
    double u_minus = 0.0;  // (omega - vF q) / (2c), 1/m
    double beta = 0.0;     // hbar c / (kB T), m
    double D = 0.0;        // hbar sqrt(vF^2 q^2 - omega^2) / (2 kB T), 0 when the radicand is negative
    double D_l = 0.0;      // hbar sqrt(vF^2 q^2 + xi^2) / (2 kB T)
};

ThermalKernelParams thermal_kernel_params(double q, double omega, double xi, double temperature_K,
                                          const PhysicalParams& params);

/// B(x) = x^2 / sqrt(x^2 - vF^2 q^2). Throws std::domain_error at the pole |x| = vF q.
cplx eval_B(double x, double q, const PhysicalParams& params);

/// F(x) = sqrt(x^2 - vF^2 q^2); F(+-vF q) = 0.
cplx eval_F(double x, double q, const PhysicalParams& params);

/// Which permittivity to compute; the other one is left at its T = 0 value
/// (real axis) or unspecified (imaginary axis).
enum class Components { Both, Longitudinal, Transverse };

struct ResponseOptions {
    double rel_tol = 1e-10;
    int max_subdivisions = 300;
    Components components = Components::Both;
};

/// Real-frequency permittivities. Accepts T = 0 (thermal parts exactly zero).
/// At the exact band edge q = omega/vF both components diverge and are returned
/// as complex infinities.
PermittivityPair eps_real_axis(const SpectralPoint& p, double temperature_K, const PhysicalParams& params,
                               const ResponseOptions& opts = {});

/// Permittivities at imaginary frequency i xi_l. Requires T > 0. At l = 0 the
/// transverse permittivity is +infinity and only regularized_Tr is meaningful.
PermittivityPair eps_imag_axis(const MatsubaraPoint& p, double temperature_K, const PhysicalParams& params,
                               const ResponseOptions& opts = {});

/// Throws std::invalid_argument for q <= 0.
PolarizationComponents eps_to_polarization(const PermittivityPair& e, const SpectralPoint& p);
/// Inverse of eps_to_polarization (fills eps_L, eps_Tr and regularized_Tr only).
PermittivityPair polarization_to_eps(const PolarizationComponents& pi, const SpectralPoint& p);

struct Conductivity {
    cplx sigma_L;   // Gaussian-form sheet conductivity; a velocity, here in m/s
    cplx sigma_Tr;
};

/// sigma = omega (eps - 1) / (2 pi i q). Throws for q <= 0 or omega == 0.
Conductivity eps_to_conductivity(const PermittivityPair& e, const SpectralPoint& p);
/// eps = 1 + 2 pi i sigma q / omega.
PermittivityPair conductivity_to_eps(const Conductivity& s, const SpectralPoint& p);

}  // namespace gcas
