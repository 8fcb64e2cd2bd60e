#pragma once

// Casimir pressure between two parallel graphene sheets from the Lifshitz
// formula: the Matsubara representation and the real-frequency split into
// propagating and evanescent waves.
//
// Internally every integral runs over dimensionless variables scaled by the
// doubled separation A = 2a: y = A kappa, Omega = A omega / c, K = A k0z, Q = A q.

#include "gcas/params.hpp"

#include <string>
#include <vector>

namespace gcas {

enum class Polarization { TM, TE };

const char* to_string(Polarization p);

struct SummationConfig {
    double rel_tol = 1e-7;             // Matsubara pressures
    double real_freq_rel_tol = 1e-4;   // real-frequency integrals
    int l_max_cap = 100000;
    double q_cutoff_factor = 50.0;     // integrate A kappa up to its lower end plus this factor
    int propagating_cells = 24;        // half-period cells in K summed before acceleration

    /// Throws std::invalid_argument when rel_tol <= 0 or q_cutoff_factor < 20.
    void validate() const;
};

struct PressureValue {
    double value = 0.0;  // Pa
    double error = 0.0;  // Pa, absolute
    bool converged = true;
};

struct MatsubaraResult : PressureValue {
    int terms = 0;  // number of Matsubara frequencies summed, including l = 0
};

struct EvanescentResult {
    PressureValue total;
    PressureValue plasmonic;  // vF q < omega: omega/c < q <= omega/vF
    PressureValue deep;       // q > omega/vF
};

/// P_IM = -kB T zeta(3) / (4 pi a^3).
double ideal_metal_classical(double separation_m, double temperature_K);

/// Both pressure representations need T > 0 and validate params.
MatsubaraResult pressure_matsubara(const PhysicalParams& params, Polarization pol, const SummationConfig& cfg = {});

EvanescentResult pressure_evanescent(const PhysicalParams& params, Polarization pol,
                                     const SummationConfig& cfg = {});

/// P_prop = P (Matsubara) - P_evan, errors added.
PressureValue pressure_propagating_residual(const MatsubaraResult& matsubara, const EvanescentResult& evanescent);

/// Direct evaluation of the propagating-wave integral for TM. The round-trip
/// factor is split into its first harmonic r^2 e^{iK} and the remainder; each is
/// summed over cells in K that make its partial sums alternate, then
/// extrapolated with the epsilon algorithm. Validation grade; converged is false when the
/// extrapolation does not settle. TE is rejected with std::invalid_argument: its
/// reflection coefficient tends to -1 at grazing incidence, so the inner
/// integral does not converge in this ordering.
PressureValue pressure_propagating_direct(const PhysicalParams& params, Polarization pol,
                                          const SummationConfig& cfg = {});

struct PressureBreakdown {
    double separation_m = 0.0;
    double temperature_K = 0.0;
    PressureValue P_TM, P_TE, P_total;
    PressureValue P_TM_evan, P_TM_prop;
    PressureValue P_TM_evan_plasmonic, P_TM_evan_deep;
    double P_IM = 0.0;
    int matsubara_terms_TM = 0;
    int matsubara_terms_TE = 0;

    double ratio_TM_TE() const { return P_TM.value / P_TE.value; }
    double ratio_TM_total() const { return P_TM.value / P_total.value; }
    double ratio_total_IM() const { return P_total.value / P_IM; }
    bool converged() const;
};

/// Full decomposition at one separation. The evanescent split is skipped when
/// with_real_frequency is false (its fields stay zero).
PressureBreakdown compute_breakdown(const PhysicalParams& params, const SummationConfig& cfg = {},
                                    bool with_real_frequency = true);

struct SweepRow {
    double separation_m = 0.0;
    bool ok = false;
    std::string error;    // set when the row failed
    std::string warning;  // Dirac-model validity warning, if any
    double wall_time_s = 0.0;
    PressureBreakdown breakdown;
};

/// One row per separation, computed on up to `threads` worker threads. Rows are
/// independent and returned in grid order, so results do not depend on the
/// thread count. Throws std::invalid_argument if the grid is not ascending or
/// contains a separation below 50 nm.
std::vector<SweepRow> sweep(const std::vector<double>& separations_m, double temperature_K,
                            const SummationConfig& cfg = {}, int threads = 1, bool with_real_frequency = true,
                            const PhysicalParams& material = {});

}  // namespace gcas
