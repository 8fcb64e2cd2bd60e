#include "gcas/lifshitz.hpp"

#include "gcas/fresnel2d.hpp"
#include "gcas/quadrature.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gcas {

namespace {

using quad::Tolerance;

constexpr double kEpsRelTol = 1e-10;

struct Scales {
    double A;      // 2a
    double kT;     // J
    double tau;    // hbar omega / (2 kT) = tau * Omega
    double pref_real;  // hbar c / (2 pi^2 A^4)
};

Scales scales_of(const PhysicalParams& p) {
    Scales s;
    s.A = 2.0 * p.separation_m;
    s.kT = constants::kB * p.temperature_K;
    s.tau = constants::hbar * constants::c / (2.0 * s.A * s.kT);
    s.pref_real = constants::hbar * constants::c / (2.0 * constants::pi * constants::pi * std::pow(s.A, 4));
    return s;
}

ResponseOptions eps_options(Polarization pol) {
    ResponseOptions o;
    o.rel_tol = kEpsRelTol;
    o.components = pol == Polarization::TM ? Components::Longitudinal : Components::Transverse;
    return o;
}

double coth(double x) { return 1.0 / std::tanh(x); }

void check_inputs(const PhysicalParams& params, const SummationConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!(params.temperature_K > 0.0)) throw std::invalid_argument("pressure: temperature must be > 0");
}

// Imaginary-axis reflection coefficient at y = A kappa, with d = y - y_l known
// exactly. Returns (r, 1 - r).
std::pair<double, double> r_imag(Polarization pol, const PhysicalParams& params, const Scales& s, int l,
                                 double xi, double y_l, double d) {
    const double y = y_l + d;
    const double q = std::sqrt(d * (d + 2.0 * y_l)) / s.A;
    const double kappa = y / s.A;
    if (!(q > 0.0)) return pol == Polarization::TM ? std::pair{0.0, 1.0} : std::pair{-1.0, 2.0};
    const auto e = eps_imag_axis({q, l, xi}, params.temperature_K, params, eps_options(pol));
    if (pol == Polarization::TM) {
        const double chi = e.eps_L.real() - 1.0;
        if (std::isinf(chi)) return {1.0, 0.0};
        const double den = q + chi * kappa;
        return {chi * kappa / den, q / den};
    }
    const double R = e.regularized_Tr.real();
    if (std::isinf(R)) return {-1.0, 2.0};
    const double den = constants::c * constants::c * q * kappa + R;
    return {-R / den, 1.0 + R / den};
}

// J_l = int_{y_l}^{y_l + cutoff} y^2 dy / (r^-2 e^y - 1).
quad::IntegrationResult<double> matsubara_term(Polarization pol, const PhysicalParams& params, const Scales& s,
                                               int l, double cutoff, double rel, double abs) {
    const double xi = matsubara_frequency(l, params.temperature_K);
    const double y_l = s.A * xi / constants::c;
    auto f = [&](double d) {
        const auto [r, one_minus_r] = r_imag(pol, params, s, l, xi, y_l, d);
        const double y = y_l + d;
        const double r2 = r * r;
        // 1 - r^2 e^{-y} = r^2 (1 - e^{-y}) + (1 - r)(1 + r)
        return y * y * r2 * std::exp(-y) / (-r2 * std::expm1(-y) + one_minus_r * (2.0 - one_minus_r));
    };
    const double edges[] = {0.0, 1.0, 4.0, 12.0, cutoff};
    Tolerance tol{rel, abs / 4.0, 200};
    quad::IntegrationResult<double> out;
    quad::CompensatedSum<double> sum, err;
    for (int i = 0; i < 4; ++i) {
        quad::IntegrationResult<double> r;
        if (i == 0) {
            r = quad::integrate_sqrt_endpoints(f, edges[0], edges[1], true, false, tol);
        } else {
            r = quad::integrate_finite(f, edges[i], edges[i + 1], tol);
        }
        sum.add(r.value);
        err.add(r.error_estimate);
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    }
    out.value = sum.value();
    out.error_estimate = err.value();
    return out;
}

// Real-axis reflection coefficient together with 1 - r, each formed without
// cancellation so that 1 - r^2 e^{iphi} stays accurate when r -> 1.
struct Reflection {
    cplx r;
    cplx one_minus_r;
};

Reflection r_real(Polarization pol, const PhysicalParams& params, double q, double omega, cplx k0z) {
    const auto e = eps_real_axis({q, omega}, params.temperature_K, params, eps_options(pol));
    if (pol == Polarization::TM) {
        const cplx chi = e.eps_L - 1.0;
        if (std::isinf(chi.real()) || std::isinf(chi.imag())) return {1.0, 0.0};
        const cplx den = cplx(0.0, q) + chi * k0z;
        return {chi * k0z / den, cplx(0.0, q) / den};
    }
    const cplx R = e.regularized_Tr;
    if (std::isinf(R.real()) || std::isinf(R.imag())) return {-1.0, 2.0};
    if (R == cplx(0.0)) return {0.0, 1.0};
    const cplx den = cplx(0.0, constants::c * constants::c * q) * k0z + R;
    return {-R / den, 1.0 + R / den};
}

// X / (1 - X) with X = r^2 e^{-y} (evanescent, phase = 1) or r^2 e^{iK}.
cplx round_trip(const Reflection& r, double decay_y, cplx phase) {
    const cplx r2 = r.r * r.r;
    const cplx x = r2 * std::exp(-decay_y) * phase;
    // 1 - r^2 e^{-y} phase = r^2 (1 - e^{-y} phase) + (1 - r)(1 + r)
    const cplx one_minus_phase = phase == cplx(1.0) ? cplx(-std::expm1(-decay_y)) : 1.0 - phase;
    return x / (r2 * one_minus_phase + r.one_minus_r * (2.0 - r.one_minus_r));
}

// int y^2 Im[r^2 e^-y / (1 - r^2 e^-y)] dy, split at the band edge y_split.
// Returned as (plasmonic, deep) packed into a complex number.
struct EvanescentInner {
    cplx value;  // real: plasmonic, imag: deep
    double error = 0.0;
    bool converged = true;
};

EvanescentInner evanescent_inner(Polarization pol, const PhysicalParams& params, const Scales& s, double Omega,
                                 double cutoff, double rel) {
    const double omega = constants::c * Omega / s.A;
    const double v = params.vf_over_c;
    const double y_split = Omega * std::sqrt((1.0 - v) * (1.0 + v)) / v;
    auto f = [&](double y) {
        const double q = std::sqrt(y * y + Omega * Omega) / s.A;
        const auto r = r_real(pol, params, q, omega, cplx(0.0, y / s.A));
        return y * y * round_trip(r, y, 1.0).imag();
    };
    EvanescentInner out;
    Tolerance tol{rel, 0.0, 200};
    const double y_max = std::max(cutoff, 1.0);
    // Deep part first: at small Omega it dominates and sets the absolute scale.
    if (y_split < y_max) {
        const double mid = y_split + std::max(1.0, y_split);
        auto r1 = quad::integrate_sqrt_endpoints(f, y_split, mid, true, false, tol);
        auto r2 = quad::integrate_tail(f, mid, 1.0, tol);
        out.value += cplx(0.0, r1.value + r2.value);
        out.error += r1.error_estimate + r2.error_estimate;
        out.converged = out.converged && r1.converged && r2.converged;
    }
    if (y_split > 0.0) {
        const double hi = std::min(y_split, y_max);
        tol.abs = 0.1 * rel * std::abs(out.value.imag());
        auto r = quad::integrate_sqrt_endpoints(f, 0.0, hi, false, hi == y_split, tol);
        out.value += r.value;
        out.error += r.error_estimate;
        out.converged = out.converged && r.converged;
    }
    return out;
}

}  // namespace

const char* to_string(Polarization p) { return p == Polarization::TM ? "TM" : "TE"; }

void SummationConfig::validate() const {
    if (!(rel_tol > 0.0) || !(real_freq_rel_tol > 0.0))
        throw std::invalid_argument("SummationConfig: tolerances must be > 0");
    if (!(q_cutoff_factor >= 20.0)) throw std::invalid_argument("SummationConfig: q_cutoff_factor must be >= 20");
    if (l_max_cap < 1) throw std::invalid_argument("SummationConfig: l_max_cap must be >= 1");
    if (propagating_cells < 6) throw std::invalid_argument("SummationConfig: propagating_cells must be >= 6");
}

double ideal_metal_classical(double separation_m, double temperature_K) {
    return -constants::kB * temperature_K * constants::zeta3 / (4.0 * constants::pi * std::pow(separation_m, 3));
}

MatsubaraResult pressure_matsubara(const PhysicalParams& params, Polarization pol, const SummationConfig& cfg) {
    check_inputs(params, cfg);
    const Scales s = scales_of(params);
    const double inner_rel = 0.01 * cfg.rel_tol;
    quad::CompensatedSum<double> sum, err;
    MatsubaraResult out;
    auto t0 = matsubara_term(pol, params, s, 0, cfg.q_cutoff_factor, inner_rel, 0.0);
    sum.add(0.5 * t0.value);
    err.add(0.5 * t0.error_estimate);
    out.converged = t0.converged;
    double previous = std::abs(t0.value);
    int small_run = 0;
    int l = 1;
    for (; l <= cfg.l_max_cap; ++l) {
        const double floor = 0.01 * cfg.rel_tol * std::abs(sum.value());
        auto t = matsubara_term(pol, params, s, l, cfg.q_cutoff_factor, inner_rel, floor);
        sum.add(t.value);
        err.add(t.error_estimate);
        out.converged = out.converged && (t.converged || t.error_estimate <= floor);
        const double mag = std::abs(t.value);
        small_run = mag < cfg.rel_tol * std::abs(sum.value()) ? small_run + 1 : 0;
        // Terms fall off geometrically once y_l exceeds a few units; bound the tail.
        const double ratio = previous > 0.0 ? std::min(mag / previous, 0.99) : 0.99;
        const double tail = mag * ratio / (1.0 - ratio);
        if (small_run >= 3 && tail <= 0.1 * cfg.rel_tol * std::abs(sum.value())) {
            err.add(tail);
            break;
        }
        previous = mag;
    }
    if (l > cfg.l_max_cap) {
        out.converged = false;
        l = cfg.l_max_cap;
    }
    const double pref = -s.kT / (constants::pi * std::pow(s.A, 3));
    out.value = pref * sum.value();
    out.error = std::abs(pref) * err.value();
    out.terms = l + 1;
    return out;
}

EvanescentResult pressure_evanescent(const PhysicalParams& params, Polarization pol, const SummationConfig& cfg) {
    check_inputs(params, cfg);
    const Scales s = scales_of(params);
    const double rel = cfg.real_freq_rel_tol;
    bool inner_ok = true;
    // Outer integrand coth(tau Omega) F(Omega); coth ~ 1/(tau Omega) is cancelled by F ~ Omega.
    auto g = [&](double Omega) -> cplx {
        if (!(Omega > 0.0)) return 0.0;
        const auto in = evanescent_inner(pol, params, s, Omega, cfg.q_cutoff_factor, 0.1 * rel);
        inner_ok = inner_ok && in.converged;
        return in.value * coth(s.tau * Omega);
    };
    // Breakpoints span the thermal scale 1/tau and the geometric scale Omega ~ 1.
    const double lo_scale = std::min(1.0, 1.0 / s.tau), hi_scale = std::max(1.0, 1.0 / s.tau);
    std::vector<double> edges{0.0};
    for (double x = 1e-4 * lo_scale; x < 10.0 * hi_scale; x *= 10.0) edges.push_back(x);
    edges.push_back(10.0 * hi_scale);
    // Pieces carrying little weight need no relative accuracy of their own: the
    // Matsubara sum (cheap) fixes the pressure scale for an absolute floor.
    const double scale = std::abs(pressure_matsubara(params, pol, cfg).value) / s.pref_real;
    const double n_pieces = static_cast<double>(edges.size());
    Tolerance tol{rel, 0.5 * rel * scale / n_pieces, 100};
    quad::CompensatedSum<cplx> sum;
    double err = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto r = quad::integrate_finite(g, edges[i], edges[i + 1], tol);
        sum.add(r.value);
        err += r.error_estimate;
        ok = ok && r.converged;
    }
    auto tail = quad::integrate_tail(g, edges.back(), 0.0, tol, edges.back());
    sum.add(tail.value);
    err += tail.error_estimate;
    ok = ok && tail.converged;

    const double pref = -s.pref_real;
    EvanescentResult out;
    const cplx total = sum.value();
    out.plasmonic.value = pref * total.real();
    out.deep.value = pref * total.imag();
    out.total.value = out.plasmonic.value + out.deep.value;
    // Outer estimate (max-norm over both packed parts) plus the inner relative
    // tolerance 0.1 rel carried through the outer integral.
    const double inner = 0.1 * rel;
    out.plasmonic.error = s.pref_real * err + inner * std::abs(out.plasmonic.value);
    out.deep.error = s.pref_real * err + inner * std::abs(out.deep.value);
    out.total.error = out.plasmonic.error + out.deep.error;
    out.plasmonic.converged = out.deep.converged = out.total.converged = ok && inner_ok;
    return out;
}

PressureValue pressure_propagating_residual(const MatsubaraResult& m, const EvanescentResult& ev) {
    PressureValue p;
    p.value = m.value - ev.total.value;
    p.error = m.error + ev.total.error;
    p.converged = m.converged && ev.total.converged;
    return p;
}

PressureValue pressure_propagating_direct(const PhysicalParams& params, Polarization pol,
                                          const SummationConfig& cfg) {
    check_inputs(params, cfg);
    if (pol != Polarization::TM)
        throw std::invalid_argument("pressure_propagating_direct: only TM is supported");
    const Scales s = scales_of(params);
    bool inner_ok = true;
    // G(K) = int_0^inf dQ (Q K^2 / Omega) coth(tau Omega) Re[X / (1 - X)], X = r^2 e^{iK},
    // returned as (first harmonic Re X, remainder Re[X^2 / (1 - X)]) packed in a complex number.
    auto G = [&](double K) -> cplx {
        if (!(K > 0.0)) return 0.0;
        const cplx phase = std::polar(1.0, K);
        auto h = [&](double Q) -> cplx {
            if (!(Q > 0.0)) return 0.0;
            const double Omega = std::hypot(K, Q);
            const auto r = r_real(pol, params, Q / s.A, constants::c * Omega / s.A, cplx(K / s.A, 0.0));
            const cplx x = r.r * r.r * phase;
            const double w = Q * K * K / Omega * coth(s.tau * Omega);
            return {w * x.real(), w * (round_trip(r, 0.0, phase) - x).real()};
        };
        Tolerance tol{1e-10, 0.0, 200};
        auto a = quad::integrate_finite(h, 0.0, K, tol);
        auto b = quad::integrate_finite(h, K, 10.0 * K, tol);
        auto c = quad::integrate_tail(h, 10.0 * K, 0.0, tol, 10.0 * K);
        inner_ok = inner_ok && a.converged && b.converged && c.converged;
        return a.value + b.value + c.value;
    };
    // Quarter-period cells: pairs of them make the first harmonic alternate, single
    // ones make the second harmonic alternate. Higher harmonics carry r^6 ~ 1e-12.
    const int cells = 2 * cfg.propagating_cells;
    std::vector<double> first, rest;
    quad::CompensatedSum<double> sum_first, sum_rest;
    for (int m = 0; m < cells; ++m) {
        const double w = 0.5 * constants::pi;
        auto r = quad::integrate_finite(G, m * w, (m + 1) * w, Tolerance{1e-11, 0.0, 50});
        sum_first.add(r.value.real());
        sum_rest.add(r.value.imag());
        if (m % 2 == 1) first.push_back(sum_first.value());
        rest.push_back(sum_rest.value());
    }
    auto extrapolate = [](const std::vector<double>& partial, bool& stable) {
        const auto full = quad::accelerate(partial);
        const auto shorter = quad::accelerate(std::span<const double>(partial.data(), partial.size() - 2));
        stable = stable && full.stable;
        return std::pair{full.value, std::abs(full.value - shorter.value) + full.error_estimate};
    };
    bool stable = true;
    const auto [v1, e1] = extrapolate(first, stable);
    const auto [v2, e2] = extrapolate(rest, stable);
    PressureValue out;
    out.value = s.pref_real * (v1 + v2);
    // Cell quadrature noise shows up in the spread between the two extrapolations.
    out.error = s.pref_real * (e1 + e2);
    out.converged = inner_ok && stable && out.error <= 0.01 * std::abs(out.value);
    return out;
}

bool PressureBreakdown::converged() const {
    return P_TM.converged && P_TE.converged && P_TM_evan.converged && P_TM_prop.converged;
}

PressureBreakdown compute_breakdown(const PhysicalParams& params, const SummationConfig& cfg,
                                    bool with_real_frequency) {
    PressureBreakdown b;
    b.separation_m = params.separation_m;
    b.temperature_K = params.temperature_K;
    const auto tm = pressure_matsubara(params, Polarization::TM, cfg);
    const auto te = pressure_matsubara(params, Polarization::TE, cfg);
    b.P_TM = tm;
    b.P_TE = te;
    b.P_total = {tm.value + te.value, tm.error + te.error, tm.converged && te.converged};
    b.matsubara_terms_TM = tm.terms;
    b.matsubara_terms_TE = te.terms;
    b.P_IM = ideal_metal_classical(params.separation_m, params.temperature_K);
    if (with_real_frequency) {
        const auto ev = pressure_evanescent(params, Polarization::TM, cfg);
        b.P_TM_evan = ev.total;
        b.P_TM_evan_plasmonic = ev.plasmonic;
        b.P_TM_evan_deep = ev.deep;
        b.P_TM_prop = pressure_propagating_residual(tm, ev);
    }
    return b;
}

std::vector<SweepRow> sweep(const std::vector<double>& separations_m, double temperature_K,
                            const SummationConfig& cfg, int threads, bool with_real_frequency,
                            const PhysicalParams& material) {
    cfg.validate();
    for (std::size_t i = 0; i < separations_m.size(); ++i) {
        if (!(separations_m[i] >= 50e-9)) throw std::invalid_argument("sweep: separations must be >= 50 nm");
        if (i > 0 && !(separations_m[i] > separations_m[i - 1]))
            throw std::invalid_argument("sweep: separations must be strictly ascending");
    }
    std::vector<SweepRow> rows(separations_m.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            SweepRow& row = rows[i];
            row.separation_m = separations_m[i];
            PhysicalParams p = material;
            p.separation_m = separations_m[i];
            p.temperature_K = temperature_K;
            const auto start = std::chrono::steady_clock::now();
            try {
                row.warning = p.dirac_model_warning();
                row.breakdown = compute_breakdown(p, cfg, with_real_frequency);
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(rows.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace gcas
