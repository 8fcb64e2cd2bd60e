#include "gcas/graphene_response.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

using namespace gcas;

namespace {

const PhysicalParams kParams{};
constexpr double kT = 300.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

struct NaiveImag {
    cplx L;   // eps_L - 1
    cplx Tr;  // eps_Tr - 1
};

// Imaginary-axis permittivities straight from the textbook formulas: complex
// principal square roots, no cancellation handling, Boost double-exponential
// quadrature in long double. Valid for xi > 0; loses about 1/p'^2 digits with
// p' = vF q / sqrt(vF^2 q^2 + xi^2).
NaiveImag naive_imag_axis(double q_in, double xi_in, double T) {
    using R = long double;
    using C = std::complex<R>;
    const R q = q_in, xi = xi_in;
    const R vf = kParams.fermi_velocity(), c = constants::c, a = kParams.alpha;
    const R big_s = std::sqrt(vf * vf * q * q + xi * xi);
    const R D = R(constants::hbar) * big_s / (2 * R(constants::kB) * T);
    auto radicand = [&](R w, int lam) { return std::sqrt(C(1 - w * w, -2 * lam * xi * w / big_s)); };
    auto weight = [&](R w) { return 1 / (std::exp(D * w) + 1); };
    auto bracket_L = [&](R w) {
        if (D * w > 11000) return C(0);
        C sum = 0;
        for (int lam : {-1, 1}) sum += radicand(w, lam);
        return (R(1) - sum / R(2)) * weight(w);
    };
    auto bracket_Tr = [&](R w) {
        if (D * w > 11000) return C(0);
        C sum = 0;
        for (int lam : {-1, 1}) {
            const C num(big_s * w, lam * xi);
            sum += num * num / (xi * xi * radicand(w, lam));
        }
        return (R(1) + sum / R(2)) * weight(w);
    };
    boost::math::quadrature::tanh_sinh<R> finite;
    boost::math::quadrature::exp_sinh<R> tail;
    auto integrate = [&](auto&& f) {
        auto re = [&](R w) { return f(w).real(); };
        auto im = [&](R w) { return f(w).imag(); };
        const R split = 2, inf = std::numeric_limits<R>::infinity(), tol = 1e-18L;
        return C(finite.integrate(re, R(0), split, tol) + tail.integrate(re, split, inf, tol),
                 finite.integrate(im, R(0), split, tol) + tail.integrate(im, split, inf, tol));
    };
    const R pref = 4 * a * c * big_s / (vf * vf * q);
    const C L = R(constants::pi) * a * c * q / (2 * big_s) + pref * integrate(bracket_L);
    const C Tr = R(constants::pi) * a * q * c * big_s / (2 * xi * xi) - pref * integrate(bracket_Tr);
    return {cplx(double(L.real()), double(L.imag())), cplx(double(Tr.real()), double(Tr.imag()))};
}

// Kramers-Kronig: eps_L(q, i xi) - 1 = (2/pi) int_0^inf omega Im eps_L(q, omega) / (omega^2 + xi^2).
double kramers_kronig_L(double q, double xi, double T) {
    const double edge = kParams.fermi_velocity() * q;
    auto f = [&](double w) {
        if (w < 1e-150) return 0.0;  // finite integrand, negligible width
        const auto e = eps_real_axis({q, w}, T, kParams);
        return w * e.eps_L.imag() / (w * w + xi * xi);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    // omega = 2 edge / u on the far piece, integrand ~ 1/omega^2 so finite at u -> 0.
    // At u -> 0 the mapped integrand tends to pi alpha c q / (4 vF q).
    const double far_limit = constants::pi * kParams.alpha * constants::c * q / (4.0 * edge);
    auto far = [&](double u) { return u < 1e-100 ? far_limit : f(2.0 * edge / u) * 2.0 * edge / (u * u); };
    const double sum = ts.integrate(f, 0.0, edge, 1e-12) + ts.integrate(f, edge, 2.0 * edge, 1e-12) +
                       ts.integrate(far, 0.0, 1.0, 1e-12);
    return 2.0 / constants::pi * sum;
}

}  // namespace

TEST_CASE("spectral region classification") {
    const double vf = kParams.fermi_velocity();
    const double q = 1e7;
    CHECK(classify_region({q, 2.0 * constants::c * q}, kParams) == SpectralRegion::Propagating);
    CHECK(classify_region({q, constants::c * q}, kParams) == SpectralRegion::Propagating);
    CHECK(classify_region({q, 0.5 * constants::c * q}, kParams) == SpectralRegion::Plasmonic);
    CHECK(classify_region({q, vf * q}, kParams) == SpectralRegion::Plasmonic);
    CHECK(classify_region({q, 0.5 * vf * q}, kParams) == SpectralRegion::DeepEvanescent);
    CHECK(std::string(to_string(SpectralRegion::DeepEvanescent)) == "deep_evanescent");
}

TEST_CASE("kernel helpers") {
    const double vf = kParams.fermi_velocity();
    const double q = 1e6;
    const double vq = vf * q;
    CHECK(eval_F(2.0 * vq, q, kParams).real() == doctest::Approx(std::sqrt(3.0) * vq).epsilon(1e-15));
    CHECK(eval_F(-2.0 * vq, q, kParams).real() == doctest::Approx(std::sqrt(3.0) * vq).epsilon(1e-15));
    const cplx inside = eval_F(0.6 * vq, q, kParams);
    CHECK(inside.real() == 0.0);
    CHECK(inside.imag() == doctest::Approx(-0.8 * vq).epsilon(1e-15));
    CHECK(eval_F(vq, q, kParams) == cplx(0.0, 0.0));
    CHECK(eval_B(2.0 * vq, q, kParams).real() == doctest::Approx(4.0 * vq / std::sqrt(3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(eval_B(vq, q, kParams), std::domain_error);

    const auto k = thermal_kernel_params(q, 0.5 * vq, 2.0 * vq, kT, kParams);
    CHECK(k.u_minus == doctest::Approx(-0.25 * vq / constants::c));
    CHECK(k.beta == doctest::Approx(constants::hbar * constants::c / (constants::kB * kT)));
    CHECK(k.D == doctest::Approx(constants::hbar * std::sqrt(0.75) * vq / (2.0 * constants::kB * kT)));
    CHECK(k.D_l == doctest::Approx(constants::hbar * std::sqrt(5.0) * vq / (2.0 * constants::kB * kT)));
    CHECK(matsubara_frequency(3, kT) == doctest::Approx(6.0 * constants::pi * constants::kB * kT / constants::hbar));
    CHECK_THROWS(matsubara_frequency(-1, kT));
}

TEST_CASE("zero-temperature closed forms") {
    const double vf = kParams.fermi_velocity();
    const double ag = constants::pi * kParams.alpha / kParams.vf_over_c;  // pi alpha c / vF
    const double q = 1e7;

    SUBCASE("propagating region is purely dissipative") {
        const double w = 2.0 * constants::c * q;
        const auto e = eps_real_axis({q, w}, 0.0, kParams);
        const double p = vf * q / w, s = std::sqrt(1.0 - p * p);
        CHECK(e.eps_L.real() == 1.0);
        CHECK(e.eps_Tr.real() == 1.0);
        CHECK(e.eps_L.imag() == doctest::Approx(ag * p / (2.0 * s)).epsilon(1e-14));
        CHECK(e.eps_Tr.imag() == doctest::Approx(ag * p * s / 2.0).epsilon(1e-14));
        CHECK(e.thermal_L == cplx(0.0, 0.0));
    }
    SUBCASE("static limit below the band edge") {
        const auto e = eps_real_axis({q, 1e-6 * vf * q}, 0.0, kParams);
        CHECK((e.eps_L - 1.0).real() == doctest::Approx(ag / 2.0).epsilon(1e-10));
        CHECK(e.eps_L.imag() == 0.0);
    }
}

TEST_CASE("local limit reproduces the tanh conductivity") {
    // q -> 0: Im eps_L -> (pi alpha c q / 2 omega) tanh(hbar omega / 4 kB T).
    for (double w : {1e12, 1e13, 1e14, 1e15}) {
        const double q = 1e-5 * w / kParams.fermi_velocity();
        const auto e = eps_real_axis({q, w}, kT, kParams);
        const double local = constants::pi * kParams.alpha * constants::c * q / (2.0 * w) *
                             std::tanh(constants::hbar * w / (4.0 * constants::kB * kT));
        CAPTURE(w);
        CHECK(e.converged);
        CHECK(e.eps_L.imag() / local == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(e.eps_Tr.imag() / local == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("static Drude-like limit on the imaginary axis") {
    // l = 0, vF q << kB T / hbar: eps_L - 1 -> 8 ln2 alpha c kB T / (hbar vF^2 q).
    const double vf = kParams.fermi_velocity();
    const double q = 1e3;
    const auto e = eps_imag_axis(MatsubaraPoint::make(q, 0, kT), kT, kParams);
    const double drude =
        8.0 * std::log(2.0) * kParams.alpha * constants::c * constants::kB * kT / (constants::hbar * vf * vf * q);
    CHECK((e.eps_L - 1.0).real() == doctest::Approx(drude).epsilon(1e-8));
    CHECK(std::isinf(e.eps_Tr.real()));
}

TEST_CASE("imaginary axis matches the local Kubo conductivity") {
    // Independent of the Dirac-model integrals: for vF q << xi,
    // eps - 1 = (pi alpha c q / 2 xi) s(xi) with s from the dispersion integral of
    // Re sigma = tanh(hbar omega / 4kT) plus the intraband weight 8 ln2 kT / (pi hbar xi).
    const double kt = constants::kB * kT, hb = constants::hbar;
    boost::math::quadrature::exp_sinh<double> es;
    for (int l : {1, 2, 5, 20}) {
        const double xi = matsubara_frequency(l, kT);
        const double inter = es.integrate([&](double t) { return std::tanh(hb * xi * t / (4.0 * kt)) / (t * t + 1.0); });
        const double s = 2.0 / constants::pi * inter + 8.0 * std::log(2.0) * kt / (constants::pi * hb * xi);
        const double q = 1e3;
        const auto e = eps_imag_axis(MatsubaraPoint::make(q, l, kT), kT, kParams);
        const double local = constants::pi * kParams.alpha * constants::c * q / (2.0 * xi) * s;
        CAPTURE(l);
        CHECK(e.eps_L.real() - 1.0 == doctest::Approx(local).epsilon(1e-8));
        CHECK(e.eps_Tr.real() - 1.0 == doctest::Approx(local).epsilon(1e-8));
    }
}

TEST_CASE("static transverse response gives the orbital susceptibility") {
    // McClure: chi = -alpha hbar vF^2 / (6 pi c kB T) for undoped graphene, so
    // xi^2 (eps_Tr - 1) -> 2 pi |chi| c^2 q^3 at l = 0 when vF q << kB T / hbar.
    const double vf = kParams.fermi_velocity();
    const double chi = kParams.alpha * constants::hbar * vf * vf / (6.0 * constants::pi * constants::c * constants::kB * kT);
    for (double q : {1e3, 1e4}) {
        const auto e = eps_imag_axis(MatsubaraPoint::make(q, 0, kT), kT, kParams);
        const double expected = 2.0 * constants::pi * chi * constants::c * constants::c * q * q * q;
        CHECK(e.regularized_Tr.real() == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("imaginary axis agrees with the naive complex formulas") {
    // The naive evaluation keeps explicit imaginary parts; they must cancel.
    for (int l : {1, 2, 7, 40}) {
        for (double q : {1e4, 3e6, 1e8, 2e9}) {
            const auto m = MatsubaraPoint::make(q, l, kT);
            const auto ours = eps_imag_axis(m, kT, kParams);
            const double pv = kParams.fermi_velocity() * q / std::hypot(kParams.fermi_velocity() * q, m.xi);
            if (pv * pv < 1e-8) continue;  // the oracle itself is ill-conditioned there
            const auto ref = naive_imag_axis(q, m.xi, kT);
            CAPTURE(l);
            CAPTURE(q);
            CHECK(ours.converged);
            CHECK(std::abs(ref.L.imag()) <= 1e-10 * std::abs(ref.L));
            CHECK(std::abs(ref.Tr.imag()) <= 1e-10 * std::abs(ref.Tr));
            CHECK(rel_diff(ours.eps_L - 1.0, ref.L.real()) < 1e-8);
            CHECK(rel_diff(ours.eps_Tr - 1.0, ref.Tr.real()) < 1e-8);
            CHECK(ours.eps_L.imag() == 0.0);
            CHECK(ours.eps_Tr.imag() == 0.0);
        }
    }
}

TEST_CASE("real axis continues analytically to the imaginary axis") {
    // Kramers-Kronig integral of the real-axis Im eps_L reproduces eps_L(i xi). The
    // tolerance reflects the accuracy of the double-exponential oracle across the
    // inverse-square-root band edge.
    const std::pair<double, int> cases[] = {{3e6, 0}, {1e8, 1}, {3e6, 5}};
    for (const auto& [q, l] : cases) {
        const auto m = MatsubaraPoint::make(q, l, kT);
        const double kk = kramers_kronig_L(q, m.xi, kT);
        const double direct = (eps_imag_axis(m, kT, kParams).eps_L - 1.0).real();
        CAPTURE(q);
        CAPTURE(l);
        CHECK(std::abs(kk - direct) <= 1e-7 * std::abs(direct));
    }
}

TEST_CASE("regularized transverse part is continuous at xi -> 0") {
    // xi^2 (eps_Tr - 1) approaches its l = 0 value with a correction linear in |xi|.
    for (double q : {1e5, 1e7, 1e9}) {
        const double h = 1e-8 * kParams.fermi_velocity() * q;
        const auto at = [&](double xi) { return eps_imag_axis({q, 1, xi}, kT, kParams).regularized_Tr.real(); };
        const double extrapolated = 2.0 * at(h / 2.0) - at(h);
        const double l0 = eps_imag_axis(MatsubaraPoint::make(q, 0, kT), kT, kParams).regularized_Tr.real();
        CAPTURE(q);
        CHECK(extrapolated == doctest::Approx(l0).epsilon(1e-8));
    }
}

TEST_CASE("static transverse response agrees between the two axes") {
    // omega^2 (eps_Tr - 1) at omega -> 0 equals -xi^2 (eps_Tr(i xi) - 1) at xi -> 0.
    for (double q : {1e5, 3e6, 1e9}) {
        const double real_axis = eps_real_axis({q, 1e-9 * kParams.fermi_velocity() * q}, kT, kParams).regularized_Tr.real();
        const double imag_axis = eps_imag_axis(MatsubaraPoint::make(q, 0, kT), kT, kParams).regularized_Tr.real();
        CAPTURE(q);
        CHECK(-real_axis == doctest::Approx(imag_axis).epsilon(1e-8));
        const double l_real = eps_real_axis({q, 1e-9 * kParams.fermi_velocity() * q}, kT, kParams).eps_L.real();
        const double l_imag = eps_imag_axis(MatsubaraPoint::make(q, 0, kT), kT, kParams).eps_L.real();
        CHECK(l_real == doctest::Approx(l_imag).epsilon(1e-8));
    }
}

TEST_CASE("band edge q = omega / vF") {
    const double vf = kParams.fermi_velocity();
    const double q = 1e7;
    const double edge = vf * q;
    // eps_L diverges like 1/sqrt(omega^2 - vF^2 q^2) from both sides; the coefficient
    // of the divergence, with the square root continued through omega + i0, is
    // continuous. eps_Tr itself is finite and continuous.
    const double d = 1e-14;
    const double w_band = edge * (1.0 + d), w_deep = edge * (1.0 - d);
    const auto band = eps_real_axis({q, w_band}, kT, kParams);
    const auto deep = eps_real_axis({q, w_deep}, kT, kParams);
    const cplx root_band(std::sqrt((w_band - edge) * (w_band + edge)) / w_band, 0.0);
    const cplx root_deep(0.0, std::sqrt((edge - w_deep) * (edge + w_deep)) / w_deep);
    CHECK(rel_diff((band.eps_L - 1.0) * root_band, (deep.eps_L - 1.0) * root_deep) < 1e-6);
    CHECK(rel_diff(band.eps_Tr, deep.eps_Tr) < 1e-6);

    const auto exact = eps_real_axis({q, edge}, kT, kParams);
    CHECK(std::isinf(exact.eps_L.real()));
}

TEST_CASE("thermal correction vanishes as T -> 0") {
    for (double w : {3e14, 3e15}) {
        for (double q_scale : {0.5, 2.0}) {
            const SpectralPoint p{q_scale * w / kParams.fermi_velocity(), w};
            const auto e0 = eps_real_axis(p, 0.0, kParams);
            CHECK(e0.thermal_L == cplx(0.0, 0.0));
            CHECK(e0.thermal_Tr == cplx(0.0, 0.0));
            double previous = kInf;
            for (double T : {300.0, 30.0, 3.0, 0.3}) {
                const auto e = eps_real_axis(p, T, kParams);
                const double ratio = std::abs(e.thermal_L) / std::abs(e0.eps_L - 1.0);
                CAPTURE(T);
                CHECK(ratio < previous);
                previous = ratio;
                CHECK(rel_diff(e.zero_temperature_L(), e0.eps_L - 1.0) < 1e-12);
            }
            CHECK(previous < 1e-6);
        }
    }
}

TEST_CASE("passivity and symmetry on the real axis") {
    const double vf = kParams.fermi_velocity();
    for (double q : {1e5, 1e7, 1e9}) {
        for (double ratio : {1e-3, 0.3, 0.99, 1.01, 5.0, 1e3, 3e4}) {
            const auto e = eps_real_axis({q, ratio * vf * q}, kT, kParams);
            CAPTURE(q);
            CAPTURE(ratio);
            CHECK(e.converged);
            CHECK(e.eps_L.imag() >= 0.0);
            CHECK(std::isfinite(e.eps_L.real()));
            CHECK(std::isfinite(e.eps_Tr.real()));
        }
    }
}

TEST_CASE("round trips through polarization and conductivity") {
    const double vf = kParams.fermi_velocity();
    for (double ratio : {0.2, 3.0, 500.0}) {
        const SpectralPoint p{1e7, ratio * vf * 1e7};
        const auto e = eps_real_axis(p, kT, kParams);
        const auto back = polarization_to_eps(eps_to_polarization(e, p), p);
        CHECK(rel_diff(back.eps_L, e.eps_L) < 1e-12);
        CHECK(rel_diff(back.eps_Tr, e.eps_Tr) < 1e-12);
        CHECK(rel_diff(back.regularized_Tr, e.regularized_Tr) < 1e-12);
        const auto via_sigma = conductivity_to_eps(eps_to_conductivity(e, p), p);
        CHECK(rel_diff(via_sigma.eps_L, e.eps_L) < 1e-12);
        CHECK(rel_diff(via_sigma.eps_Tr, e.eps_Tr) < 1e-12);
    }
    CHECK_THROWS_AS(eps_to_polarization(PermittivityPair{}, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(eps_to_conductivity(PermittivityPair{}, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(eps_real_axis({1e7, -1.0}, kT, kParams), std::invalid_argument);
    CHECK_THROWS_AS(eps_real_axis({1e7, 1e13}, -1.0, kParams), std::invalid_argument);
    CHECK_THROWS_AS(eps_imag_axis(MatsubaraPoint::make(1e7, 1, kT), 0.0, kParams), std::invalid_argument);
}
