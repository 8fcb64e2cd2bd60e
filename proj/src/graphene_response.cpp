#include "gcas/graphene_response.hpp"

#include "gcas/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gcas {

namespace {

using constants::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/(exp(y) + 1) for y >= 0.
double fermi(double y) {
    if (y > 745.0) return 0.0;
    const double e = std::exp(-y);
    return e / (1.0 + e);
}

// Y - sqrt(Y^2 - p^2) and Y^2/sqrt(Y^2 - p^2) - Y, given root = sqrt(Y^2 - p^2).
// Both vanish identically when p^2 underflows.
double g_minus(double y, double root, double p2) { return p2 == 0.0 ? 0.0 : p2 / (y + root); }
double b_excess(double y, double root, double p2) { return p2 == 0.0 ? 0.0 : y * p2 / (root * (y + root)); }

struct Accumulator {
    cplx value{};
    double error = 0.0;
    bool converged = true;

    template <class R>
    void add(const R& r) {
        value += cplx(r.value);
        error += r.error_estimate;
        converged = converged && r.converged;
    }
};

// f(d) is inverse-square-root singular at d = 0 and has a second singular point at
// d = -near. When near is small against the width, geometric breakpoints starting
// at near resolve the crossover between the two scales.
template <class F>
void add_near_split(Accumulator& acc, const F& f, double width, double near, const quad::Tolerance& tol) {
    if (!(width > 0.0)) return;
    if (!(near < 0.05 * width)) {
        acc.add(quad::integrate_sqrt_endpoints(f, 0.0, width, true, false, tol));
        return;
    }
    double edge = std::max(near, std::numeric_limits<double>::min());
    acc.add(quad::integrate_sqrt_endpoints(f, 0.0, edge, true, false, tol));
    while (edge < width) {
        const double next = edge * 16.0 > 0.5 * width ? width : edge * 16.0;
        acc.add(quad::integrate_finite(f, edge, next, tol));
        edge = next;
    }
}

quad::Tolerance make_tol(const ResponseOptions& o, double abs_floor) {
    return {o.rel_tol, abs_floor, o.max_subdivisions};
}

// Thermal integrals of the band-region kernels (omega > vF q), in the variable
// X = 2cu/omega. Returns the brace integrals; caller applies 4 alpha (c/vF)/p.
// Every piece is parametrized by the exact distance d to its singular point
// X = 1 -+ p, so the radicands are formed without cancellation.
struct BandIntegrals {
    Accumulator L;
    Accumulator Tr;
};

BandIntegrals band_thermal(double p, double s, double tau, bool want_L, bool want_Tr, const ResponseOptions& opts,
                           double abs_floor) {
    const double p2 = p * p;
    const double c0 = -2.0 * p2 / (1.0 + s);
    const double one_minus_s = p2 / (1.0 + s);
    const auto tol = make_tol(opts, abs_floor);
    BandIntegrals out;

    // X in [0, 1-p]: both F arguments outside the band.
    auto below_L = [&](double d) -> double {
        const double x = 1.0 - p - d;
        const double yp = 2.0 - p - d, rp = std::sqrt((2.0 - 2.0 * p - d) * (2.0 - d));
        const double ym = p + d, rm = std::sqrt(d * (2.0 * p + d));
        return fermi(tau * x) * (c0 + g_minus(yp, rp, p2) + g_minus(ym, rm, p2)) / (2.0 * s);
    };
    auto below_Tr = [&](double d) -> double {
        const double x = 1.0 - p - d;
        const double yp = 2.0 - p - d, rp = std::sqrt((2.0 - 2.0 * p - d) * (2.0 - d));
        const double ym = p + d, rm = std::sqrt(d * (2.0 * p + d));
        return fermi(tau * x) * (one_minus_s - 0.5 * s * (b_excess(yp, rp, p2) + b_excess(ym, rm, p2)));
    };
    // X in (1-p, 1+p): F(X-1) = -i sqrt(p^2 - (X-1)^2). xm1 = X - 1 = sign*(p - d).
    auto gap_L = [&](double d, double sign) -> cplx {
        const double xm1 = sign * (p - d);
        const double x = 1.0 + xm1;
        const double yp = 2.0 + xm1, rp = std::sqrt((yp - p) * (yp + p));
        const double radg = std::sqrt(d * (2.0 * p - d));
        return fermi(tau * x) * cplx(c0 - xm1 + g_minus(yp, rp, p2), -radg) / (2.0 * s);
    };
    auto gap_Tr = [&](double d, double sign) -> cplx {
        const double xm1 = sign * (p - d);
        const double x = 1.0 + xm1;
        const double yp = 2.0 + xm1, rp = std::sqrt((yp - p) * (yp + p));
        const double radg = std::sqrt(d * (2.0 * p - d));
        return fermi(tau * x) *
               cplx(one_minus_s - 0.5 * s * xm1 - 0.5 * s * b_excess(yp, rp, p2),
                    radg > 0.0 ? 0.5 * s * xm1 * xm1 / radg : 0.0);
    };
    // X in [1+p, inf).
    auto above_L = [&](double d) -> double {
        const double x = 1.0 + p + d;
        const double yp = 2.0 + p + d, rp = std::sqrt((2.0 + d) * (2.0 + 2.0 * p + d));
        const double ym = p + d, rm = std::sqrt(d * (2.0 * p + d));
        return fermi(tau * x) * (c0 + g_minus(yp, rp, p2) - g_minus(ym, rm, p2)) / (2.0 * s);
    };
    auto above_Tr = [&](double d) -> double {
        const double x = 1.0 + p + d;
        const double yp = 2.0 + p + d, rp = std::sqrt((2.0 + d) * (2.0 + 2.0 * p + d));
        const double ym = p + d, rm = std::sqrt(d * (2.0 * p + d));
        return fermi(tau * x) * (one_minus_s - 0.5 * s * (b_excess(yp, rp, p2) - b_excess(ym, rm, p2)));
    };

    const double head = 1.0;
    if (want_L) {
        add_near_split(out.L, below_L, 1.0 - p, 2.0 * p, tol);
        out.L.add(quad::integrate_sqrt_endpoints([&](double d) { return gap_L(d, -1.0); }, 0.0, p, true, false, tol));
        out.L.add(quad::integrate_sqrt_endpoints([&](double d) { return gap_L(d, 1.0); }, 0.0, p, true, false, tol));
        add_near_split(out.L, above_L, head, 2.0 * p, tol);
        out.L.add(quad::integrate_tail(above_L, head, tau, tol));
    }
    if (want_Tr) {
        add_near_split(out.Tr, below_Tr, 1.0 - p, 2.0 * p, tol);
        out.Tr.add(quad::integrate_sqrt_endpoints([&](double d) { return gap_Tr(d, -1.0); }, 0.0, p, true, false, tol));
        out.Tr.add(quad::integrate_sqrt_endpoints([&](double d) { return gap_Tr(d, 1.0); }, 0.0, p, true, false, tol));
        add_near_split(out.Tr, above_Tr, head, 2.0 * p, tol);
        out.Tr.add(quad::integrate_tail(above_Tr, head, tau, tol));
    }
    return out;
}

// Thermal integrals for q > omega/vF in w, with t = omega/sqrt(vF^2 q^2 - omega^2). The radicands 1 - w^2 -+ 2tw vanish at w1 = sqrt(1+t^2) - t and
// w2 = sqrt(1+t^2) + t; each piece carries the signed distances to both roots.
BandIntegrals deep_thermal(double t, double D, bool want_L, bool want_Tr, const ResponseOptions& opts,
                           double abs_floor) {
    const double k = 1.0 + t * t;
    const double root_k = std::sqrt(k);
    const double w1 = 1.0 / (root_k + t);
    const double w2 = root_k + t;
    const auto tol = make_tol(opts, abs_floor);

    struct Geometry {
        double w;
        double rad_plus;   // 1 - w^2 - 2tw
        double rad_minus;  // 1 - w^2 + 2tw
    };
    auto geom = [&](double w, double d1, double d2) -> Geometry {
        return {w, d1 * (w + w1 + 2.0 * t), d2 * (w + w1)};
    };
    // Roots continued as omega -> omega + i0: lambda = +1 -> -i, lambda = -1 -> +i.
    auto sqrt_plus = [](double r) { return r >= 0.0 ? cplx(std::sqrt(r), 0.0) : cplx(0.0, -std::sqrt(-r)); };
    auto sqrt_minus = [](double r) { return r >= 0.0 ? cplx(std::sqrt(r), 0.0) : cplx(0.0, std::sqrt(-r)); };

    auto brace_L = [&](const Geometry& g) -> cplx {
        if (g.rad_plus < 0.0 && g.rad_minus < 0.0) {
            const double a = std::sqrt(-g.rad_plus), b = std::sqrt(-g.rad_minus);
            return {1.0, 2.0 * g.w * t / (a + b)};
        }
        return 1.0 - 0.5 * (sqrt_plus(g.rad_plus) + sqrt_minus(g.rad_minus));
    };
    // t^2 times the transverse brace, so that no factor 1/t appears for omega -> 0.
    auto brace_Tr = [&](const Geometry& g) -> cplx {
        const double big_a = g.w + t, big_b = g.w - t;
        if (g.rad_plus < 0.0 && g.rad_minus < 0.0) {
            const double a = std::sqrt(-g.rad_plus), b = std::sqrt(-g.rad_minus);
            const double phi_a = big_a * k / (a * (big_a + a));
            const double phi_b = big_b * k / (b * (big_b + b));
            return {t * t, -0.5 * (2.0 * t + phi_a - phi_b)};
        }
        return t * t - 0.5 * (big_a * big_a / sqrt_plus(g.rad_plus) + big_b * big_b / sqrt_minus(g.rad_minus));
    };

    auto piece_a = [&](double d) { return geom(w1 - d, d, 2.0 * t + d); };          // [0, w1]
    auto piece_b = [&](double d) { return geom(w1 + d, -d, 2.0 * t - d); };         // [w1, sqrt(k)]
    auto piece_c = [&](double d) { return geom(w2 - d, -2.0 * t + d, d); };         // [sqrt(k), w2]
    auto piece_e = [&](double d) { return geom(w2 + d, -2.0 * t - d, -d); };        // [w2, inf)

    const double head = std::max(1.0, t);
    auto run = [&](auto&& brace, Accumulator& acc) {
        auto wrap = [&](auto&& piece) {
            return [&, piece](double d) -> cplx {
                const Geometry g = piece(d);
                return fermi(D * g.w) * brace(g);
            };
        };
        add_near_split(acc, wrap(piece_a), w1, 2.0 * t, tol);
        // Pieces between the roots shrink to width t; below 1e-60 they contribute ~ sqrt(t).
        if (t > 1e-60) {
            acc.add(quad::integrate_sqrt_endpoints(wrap(piece_b), 0.0, t, true, false, tol));
            acc.add(quad::integrate_sqrt_endpoints(wrap(piece_c), 0.0, t, true, false, tol));
        }
        add_near_split(acc, wrap(piece_e), head, 2.0 * t, tol);
        acc.add(quad::integrate_tail(wrap(piece_e), head, D, tol));
    };
    BandIntegrals out;
    if (want_L) run(brace_L, out.L);
    if (want_Tr) run(brace_Tr, out.Tr);
    return out;
}

}  // namespace

const char* to_string(SpectralRegion r) {
    switch (r) {
        case SpectralRegion::Propagating: return "propagating";
        case SpectralRegion::Plasmonic: return "plasmonic";
        case SpectralRegion::DeepEvanescent: return "deep_evanescent";
    }
    return "unknown";
}

double matsubara_frequency(int l, double temperature_K) {
    if (l < 0) throw std::invalid_argument("Matsubara index must be non-negative");
    return 2.0 * pi * constants::kB * temperature_K * static_cast<double>(l) / constants::hbar;
}

SpectralRegion classify_region(const SpectralPoint& p, const PhysicalParams& params) {
    if (p.q * constants::c <= p.omega) return SpectralRegion::Propagating;
    if (p.q * params.fermi_velocity() <= p.omega) return SpectralRegion::Plasmonic;
    return SpectralRegion::DeepEvanescent;
}

ThermalKernelParams thermal_kernel_params(double q, double omega, double xi, double temperature_K,
                                          const PhysicalParams& params) {
    const double vq = params.fermi_velocity() * q;
    ThermalKernelParams k;
    k.u_minus = (omega - vq) / (2.0 * constants::c);
    const double kt = constants::kB * temperature_K;
    k.beta = kt > 0.0 ? constants::hbar * constants::c / kt : kInf;
    const double rad = (vq - omega) * (vq + omega);
    k.D = rad > 0.0 ? (kt > 0.0 ? constants::hbar * std::sqrt(rad) / (2.0 * kt) : kInf) : 0.0;
    k.D_l = kt > 0.0 ? constants::hbar * std::hypot(vq, xi) / (2.0 * kt) : kInf;
    return k;
}

cplx eval_F(double x, double q, const PhysicalParams& params) {
    const double vq = params.fermi_velocity() * q;
    const double ax = std::abs(x);
    if (ax >= vq) return {std::sqrt((ax - vq) * (ax + vq)), 0.0};
    return {0.0, -std::sqrt((vq - ax) * (vq + ax))};
}

cplx eval_B(double x, double q, const PhysicalParams& params) {
    const cplx f = eval_F(x, q, params);
    if (f == cplx(0.0, 0.0)) throw std::domain_error("eval_B: pole at |x| = vF q");
    return x * x / f;
}

PermittivityPair eps_real_axis(const SpectralPoint& p, double temperature_K, const PhysicalParams& params,
                               const ResponseOptions& opts) {
    if (!(p.q >= 0.0) || !(p.omega > 0.0)) throw std::invalid_argument("eps_real_axis: need q >= 0 and omega > 0");
    if (!(temperature_K >= 0.0)) throw std::invalid_argument("eps_real_axis: temperature must be >= 0");
    const double gamma = 1.0 / params.vf_over_c;
    const double alpha = params.alpha;
    const bool want_L = opts.components != Components::Transverse;
    const bool want_Tr = opts.components != Components::Longitudinal;
    const double pv = params.fermi_velocity() * p.q / p.omega;  // vF q / omega
    const double kt = constants::kB * temperature_K;
    const double tau = kt > 0.0 ? constants::hbar * p.omega / (2.0 * kt) : kInf;
    const double omega2 = p.omega * p.omega;

    PermittivityPair out;
    if (p.q == 0.0) {
        out.regularized_Tr = 0.0;
        return out;
    }
    if (pv == 1.0) {
        out.eps_L = out.eps_Tr = cplx(kInf, kInf);
        out.regularized_Tr = cplx(kInf, kInf);
        return out;
    }

    cplx zero_L, zero_Tr, thermal_L, thermal_Tr;
    cplx regularized, tr_minus_1;
    double err_L = 0.0, err_Tr = 0.0;
    bool converged = true;
    if (pv < 1.0) {
        const double vq = params.fermi_velocity() * p.q;
        const double s = pv < 0.5 ? std::sqrt((1.0 - pv) * (1.0 + pv))
                                  : std::sqrt((p.omega - vq) * (p.omega + vq)) / p.omega;
        zero_L = cplx(0.0, pi * alpha * gamma * pv / (2.0 * s));
        zero_Tr = cplx(0.0, pi * alpha * gamma * pv * s / 2.0);
        if (kt > 0.0) {
            const double pref = 4.0 * alpha * gamma / pv;
            const double floor = 1e-3 * opts.rel_tol * std::abs(zero_L) / pref;
            const auto b = band_thermal(pv, s, tau, want_L, want_Tr, opts, floor);
            thermal_L = pref * b.L.value;
            thermal_Tr = -pref * b.Tr.value;
            err_L = pref * b.L.error;
            err_Tr = pref * b.Tr.error;
            converged = b.L.converged && b.Tr.converged;
        }
    } else {
        // Everything in terms of root = sqrt(vF^2 q^2 - omega^2) so that omega -> 0 stays finite.
        const double vq = params.fermi_velocity() * p.q;
        const double root = std::sqrt((vq - p.omega) * (vq + p.omega));
        const double t = p.omega / root;
        zero_L = pi * alpha * gamma * vq / (2.0 * root);
        zero_Tr = -pi * alpha * gamma * vq * root / 2.0;  // times omega^2, like thermal_Tr below
        if (kt > 0.0) {
            const double pref = 4.0 * alpha * gamma * root / vq;
            const double floor = 1e-3 * opts.rel_tol * std::abs(zero_L) / pref;
            const double D = constants::hbar * root / (2.0 * kt);
            const auto b = deep_thermal(t, D, want_L, want_Tr, opts, floor);
            thermal_L = pref * b.L.value;
            thermal_Tr = -pref * root * root * b.Tr.value;
            err_L = pref * b.L.error;
            err_Tr = pref * root * root * b.Tr.error / omega2;
            converged = b.L.converged && b.Tr.converged;
        }
        // Divide by omega^2 componentwise so that omega -> 0 yields infinities, not NaN.
        auto over_omega2 = [&](cplx z) {
            return cplx(z.real() / omega2, z.imag() == 0.0 ? 0.0 : z.imag() / omega2);
        };
        regularized = zero_Tr + thermal_Tr;
        tr_minus_1 = over_omega2(regularized);
        zero_Tr = over_omega2(zero_Tr);
        thermal_Tr = over_omega2(thermal_Tr);
    }
    out.thermal_L = thermal_L;
    out.thermal_Tr = thermal_Tr;
    out.eps_L = 1.0 + zero_L + thermal_L;
    out.eps_Tr = 1.0 + (pv < 1.0 ? zero_Tr + thermal_Tr : tr_minus_1);
    out.regularized_Tr = pv < 1.0 ? omega2 * (zero_Tr + thermal_Tr) : regularized;
    out.error_estimate = std::max(err_L, err_Tr);
    out.converged = converged;
    return out;
}

PermittivityPair eps_imag_axis(const MatsubaraPoint& p, double temperature_K, const PhysicalParams& params,
                               const ResponseOptions& opts) {
    if (!(temperature_K > 0.0)) throw std::invalid_argument("eps_imag_axis: Matsubara frequencies need T > 0");
    if (p.l < 0 || !(p.q >= 0.0) || !(p.xi >= 0.0)) throw std::invalid_argument("eps_imag_axis: invalid point");
    const double gamma = 1.0 / params.vf_over_c;
    const double alpha = params.alpha;
    const bool want_L = opts.components != Components::Transverse;
    const bool want_Tr = opts.components != Components::Longitudinal;
    const double vq = params.fermi_velocity() * p.q;
    const double big_s = std::hypot(vq, p.xi);
    PermittivityPair out;
    if (p.q == 0.0) {
        if (p.xi == 0.0) {
            out.eps_L = out.eps_Tr = cplx(kInf, 0.0);
            out.regularized_Tr = 0.0;
        } else {
            out.regularized_Tr = 0.0;
        }
        return out;
    }
    const double pv = vq / big_s;
    const double t = p.xi / big_s;
    const double D = constants::hbar * big_s / (2.0 * constants::kB * temperature_K);
    const double zero = pi * alpha * gamma * pv / 2.0;  // eps_L zero-T part; also xi^2 (eps_Tr-1) / S^2 zero-T part
    const double pref = 4.0 * alpha * gamma / pv;
    const auto tol = make_tol(opts, 1e-3 * opts.rel_tol * zero / pref);

    Accumulator int_L, int_Tr;
    if (p.xi == 0.0) {
        // d = 1 - w; 1 - w^2 = d (2 - d).
        auto fL = [&](double d) -> double {
            return fermi(D * (1.0 - d)) * (1.0 - std::sqrt(d * (2.0 - d)));
        };
        auto fTr = [&](double d) -> double {
            const double w = 1.0 - d;
            return fermi(D * w) * w * w / std::sqrt(d * (2.0 - d));
        };
        if (want_L) {
            int_L.add(quad::integrate_sqrt_endpoints(fL, 0.0, 1.0, true, false, tol));
            int_L.value += std::log1p(std::exp(-D)) / D;  // w > 1: brace is exactly 1
        }
        if (want_Tr) int_Tr.add(quad::integrate_sqrt_endpoints(fTr, 0.0, 1.0, true, false, tol));
    } else {
        const double p2 = pv * pv;
        const bool small_p = p2 < 0.5;
        // Conjugate lambda terms are summed as 2 Re of the lambda = +1 term.
        auto brace_L = [&](double w) -> double {
            const cplx z(w, t);
            if (small_p) {
                const cplx ratio = p2 / (z * z);
                const cplx delta = ratio / (1.0 + std::sqrt(1.0 - ratio));
                return p2 / (1.0 + t) + (cplx(0.0, -1.0) * z * delta).real();
            }
            return 1.0 - std::sqrt(p2 - z * z).real();
        };
        auto brace_Tr = [&](double w) -> double {
            const cplx z(w, t);
            if (small_p) {
                const cplx ratio = p2 / (z * z);
                const cplx rho = std::sqrt(1.0 - ratio);
                const cplx one_minus_rho = ratio / (1.0 + rho);
                return -t * p2 / (1.0 + t) + (cplx(0.0, 1.0) * z * one_minus_rho / rho).real();
            }
            return t * t + (z * z / std::sqrt(p2 - z * z)).real();
        };
        auto fL = [&](double w) { return fermi(D * w) * brace_L(w); };
        auto fTr = [&](double w) { return fermi(D * w) * brace_Tr(w); };
        std::vector<double> edges{0.0};
        if (t < 0.3) edges.push_back(pv);
        const double head = std::max(pv, 1.0) + 1.0;
        edges.push_back(head);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            if (want_L) int_L.add(quad::integrate_finite(fL, edges[i], edges[i + 1], tol));
            if (want_Tr) int_Tr.add(quad::integrate_finite(fTr, edges[i], edges[i + 1], tol));
        }
        if (want_L) int_L.add(quad::integrate_tail(fL, head, D, tol));
        if (want_Tr) int_Tr.add(quad::integrate_tail(fTr, head, D, tol));
    }
    const double thermal_L = pref * int_L.value.real();
    const double reg_over_s2 = zero - pref * int_Tr.value.real();  // xi^2 (eps_Tr - 1) / S^2
    out.thermal_L = thermal_L;
    out.eps_L = 1.0 + zero + thermal_L;
    out.regularized_Tr = big_s * big_s * reg_over_s2;
    if (p.xi > 0.0) {
        out.eps_Tr = 1.0 + reg_over_s2 / (t * t);
        out.thermal_Tr = -pref * int_Tr.value.real() / (t * t);
    } else {
        out.eps_Tr = cplx(kInf, 0.0);
        out.thermal_Tr = cplx(-kInf, 0.0);
    }
    out.error_estimate = pref * std::max(int_L.error, int_Tr.error) / std::min(1.0, t > 0.0 ? t * t : 1.0);
    out.converged = int_L.converged && int_Tr.converged;
    return out;
}

PolarizationComponents eps_to_polarization(const PermittivityPair& e, const SpectralPoint& p) {
    if (!(p.q > 0.0)) throw std::invalid_argument("eps_to_polarization: q must be > 0");
    const double c2 = constants::c * constants::c;
    const double k = 2.0 * constants::hbar * p.q / c2;
    return {k * (e.eps_L - 1.0), -k * p.omega * p.omega * (e.eps_Tr - 1.0)};
}

PermittivityPair polarization_to_eps(const PolarizationComponents& pi_c, const SpectralPoint& p) {
    if (!(p.q > 0.0)) throw std::invalid_argument("polarization_to_eps: q must be > 0");
    if (p.omega == 0.0) throw std::invalid_argument("polarization_to_eps: omega must be non-zero");
    const double c2 = constants::c * constants::c;
    const double k = c2 / (2.0 * constants::hbar * p.q);
    PermittivityPair e;
    e.eps_L = 1.0 + k * pi_c.pi_00;
    e.regularized_Tr = -k * pi_c.pi_combo;
    e.eps_Tr = 1.0 + e.regularized_Tr / (p.omega * p.omega);
    return e;
}

Conductivity eps_to_conductivity(const PermittivityPair& e, const SpectralPoint& p) {
    if (!(p.q > 0.0)) throw std::invalid_argument("eps_to_conductivity: q must be > 0");
    if (p.omega == 0.0) throw std::invalid_argument("eps_to_conductivity: omega must be non-zero");
    const cplx denom(0.0, 2.0 * pi * p.q);
    return {p.omega * (e.eps_L - 1.0) / denom, p.omega * (e.eps_Tr - 1.0) / denom};
}

PermittivityPair conductivity_to_eps(const Conductivity& s, const SpectralPoint& p) {
    if (!(p.q > 0.0)) throw std::invalid_argument("conductivity_to_eps: q must be > 0");
    if (p.omega == 0.0) throw std::invalid_argument("conductivity_to_eps: omega must be non-zero");
    const cplx k(0.0, 2.0 * pi * p.q / p.omega);
    PermittivityPair e;
    e.eps_L = 1.0 + k * s.sigma_L;
    e.eps_Tr = 1.0 + k * s.sigma_Tr;
    e.regularized_Tr = p.omega * p.omega * (e.eps_Tr - 1.0);
    return e;
}

}  // namespace gcas
