#include "gcas/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

using namespace gcas::quad;

namespace {

struct Fixture {
    std::string name;
    IntegrationProblem<double> problem;
    double exact;
};

IntegrationProblem<double> make(std::function<double(double)> f, double lo, double hi,
                                std::vector<SingularPoint> sing = {}, double rate = 0.0) {
    IntegrationProblem<double> p;
    p.integrand = std::move(f);
    p.lo = lo;
    p.hi = hi;
    p.known_singularities = std::move(sing);
    p.tail_decay_rate = rate;
    return p;
}

std::vector<Fixture> analytic_fixtures() {
    using std::numbers::pi;
    const double inf = std::numeric_limits<double>::infinity();
    const double zeta3 = 1.2020569031595942854;
    return {
        {"x^5", make([](double x) { return std::pow(x, 5); }, 0, 1), 1.0 / 6.0},
        {"exp", make([](double x) { return std::exp(x); }, 0, 1), std::numbers::e - 1.0},
        {"sin", make([](double x) { return std::sin(x); }, 0, pi), 2.0},
        {"lorentz", make([](double x) { return 1.0 / (1.0 + x * x); }, 0, 1), pi / 4},
        {"sqrt", make([](double x) { return std::sqrt(x); }, 0, 1), 2.0 / 3.0},
        {"inv_sqrt_lo", make([](double x) { return 1.0 / std::sqrt(x); }, 0, 1, {{0.0, Singularity::InverseSqrt}}), 2.0},
        {"exp_tail", make([](double x) { return std::exp(-x); }, 0, inf, {}, 1.0), 1.0},
        {"lorentz_tail", make([](double x) { return 1.0 / (1.0 + x * x); }, 0, inf), pi / 2},
        {"log", make([](double x) { return std::log(x); }, 0, 1, {{0.0, Singularity::LogLike}}), -1.0},
        {"xlogx", make([](double x) { return x * std::log(x); }, 0, 1), -0.25},
        {"cos2", make([](double x) { return std::cos(x) * std::cos(x); }, 0, 2 * pi), pi},
        {"arcsin", make([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, 0, 1, {{1.0, Singularity::InverseSqrt}}), pi / 2},
        {"abs", make([](double x) { return std::abs(x); }, -1, 1, {{0.0, Singularity::Unknown}}), 1.0},
        {"x_exp_tail", make([](double x) { return x * std::exp(-x); }, 0, inf, {}, 0.5), 1.0},
        {"gauss_tail", make([](double x) { return std::exp(-x * x); }, 0, inf, {}, 1.0), std::sqrt(pi) / 2},
        {"inv_sqrt_hi", make([](double x) { return 1.0 / std::sqrt(4.0 - x); }, 0, 4, {{4.0, Singularity::InverseSqrt}}), 4.0},
        {"near_pole", make([](double x) { return 1.0 / (x + 0.01); }, 0, 1), std::log(101.0)},
        {"sin2_long", make([](double x) { return std::sin(x) * std::sin(x); }, 0, 10), 5.0 - std::sin(20.0) / 4.0},
        {"fermi", make([](double x) { return 1.0 / (std::exp(x) + 1.0); }, 0, inf, {}, 1.0), std::log(2.0)},
        {"bose_x2", make([](double x) { return x * x / std::expm1(x); }, 0, inf, {}, 1.0), 2.0 * zeta3},
    };
}

}  // namespace

TEST_CASE("reference integrals") {
    SUBCASE("1/sqrt(x) on [0,1] with declared endpoint singularity") {
        auto p = make([](double x) { return 1.0 / std::sqrt(x); }, 0, 1, {{0.0, Singularity::InverseSqrt}});
        p.tol.rel = 1e-13;
        const auto r = integrate(p);
        CHECK(r.converged);
        CHECK(std::abs(r.value - 2.0) <= 1e-12 * 2.0);
    }
    SUBCASE("exp(-x) on [0,inf)") {
        auto p = make([](double x) { return std::exp(-x); }, 0, std::numeric_limits<double>::infinity(), {}, 1.0);
        p.tol.rel = 1e-13;
        const auto r = integrate(p);
        CHECK(std::abs(r.value - 1.0) <= 1e-12);
    }
    SUBCASE("singular dispersion kernel against a high-precision reference") {
        // (1-X)^2 / sqrt((1-X)^2 - p^2) / (exp(tau X) + 1) on [0, 1-p], p = 1/2, tau = 2.
        // Reference from 60-digit tanh-sinh quadrature.
        const double reference = 0.220298410709236231033338759700423807845984370965996437422714;
        auto p = make(
            [](double x) {
                const double y = 1.0 - x;
                return y * y / std::sqrt(y * y - 0.25) / (std::exp(2.0 * x) + 1.0);
            },
            0.0, 0.5, {{0.5, Singularity::InverseSqrt}});
        p.tol.rel = 1e-13;
        const auto r = integrate(p);
        CHECK(std::abs(r.value - reference) <= 1e-10 * reference);
    }
}

TEST_CASE("error estimates are honest on the analytic fixture suite") {
    const auto fixtures = analytic_fixtures();
    REQUIRE(fixtures.size() == 20);
    int honest = 0;
    for (const auto& fx : fixtures) {
        for (double rel : {1e-6, 1e-10}) {
            auto p = fx.problem;
            p.tol.rel = rel;
            const auto r = integrate(p);
            const double true_err = std::abs(r.value - fx.exact);
            const bool ok = true_err <= 5.0 * r.error_estimate + 1e-15 * std::abs(fx.exact);
            INFO(fx.name << " rel=" << rel << " value=" << r.value << " true=" << true_err
                         << " est=" << r.error_estimate);
            CHECK(std::abs(r.value - fx.exact) <= 1e3 * rel * std::abs(fx.exact) + 1e-14);
            if (ok) ++honest;
        }
    }
    CHECK(honest >= static_cast<int>(0.95 * 2 * fixtures.size()));
}

TEST_CASE("converged flag matches the reported estimate") {
    auto p = make([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0, 1);
    p.tol.rel = 1e-14;
    p.tol.max_subdivisions = 5;
    const auto r = integrate(p);
    CHECK_FALSE(r.converged);
    CHECK(r.worst_cell.hi > r.worst_cell.lo);
    p.tol.max_subdivisions = 2000;
    p.tol.rel = 1e-8;
    const auto r2 = integrate(p);
    CHECK(r2.converged);
    CHECK(r2.error_estimate <= 1e-8 * std::abs(r2.value));
}

TEST_CASE("complex integrands share one mesh") {
    auto f = [](double x) { return std::exp(std::complex<double>(0.0, x)); };
    const auto r = integrate_finite(f, 0.0, 1.0, {1e-13, 0.0, 100});
    CHECK(std::abs(r.value.real() - std::sin(1.0)) < 1e-13);
    CHECK(std::abs(r.value.imag() - (1.0 - std::cos(1.0))) < 1e-13);
}

TEST_CASE("s^2 substitution agrees with direct integration on shifted domains") {
    // f(x)/sqrt(x-a) with smooth f: direct adaptive on [a+d, b] plus the
    // analytic piece on [a, a+d] must match the mapped integral.
    const double a = 0.3, b = 1.7, d = 1e-3;
    auto f = [](double x) { return std::cos(x) + x * x; };
    // Offset-aware form: d is the exact distance to the singular endpoint.
    auto g_offset = [&](double x, double dist) { return f(x) / std::sqrt(dist); };
    auto g = [&](double x) { return f(x) / std::sqrt(x - a); };
    const auto mapped = integrate_sqrt_endpoints(g_offset, a, b, true, false, {1e-13, 0.0, 200});
    const auto mapped_head = integrate_sqrt_endpoints(g_offset, a, a + d, true, false, {1e-13, 0.0, 200});
    const auto direct_tail = integrate_finite(g, a + d, b, {1e-13, 0.0, 2000});
    CHECK(std::abs(mapped.value - (mapped_head.value + direct_tail.value)) <= 1e-10 * std::abs(mapped.value));
}

TEST_CASE("determinism") {
    auto p = make([](double x) { return std::exp(-x) * std::cos(5 * x); }, 0,
                  std::numeric_limits<double>::infinity(), {}, 1.0);
    const auto a = integrate(p);
    const auto b = integrate(p);
    CHECK(a.value == b.value);
    CHECK(a.error_estimate == b.error_estimate);
}

TEST_CASE("input validation") {
    auto p = make([](double x) { return x; }, 1, 0);
    CHECK_THROWS_AS(integrate(p), std::invalid_argument);
    auto q = make([](double x) { return x; }, 0, 1, {{2.0, Singularity::Unknown}});
    CHECK_THROWS_AS(integrate(q), std::invalid_argument);
}

TEST_CASE("find_roots") {
    SUBCASE("x^2 - 2") {
        const auto r = find_roots([](double x) { return x * x - 2.0; }, 0.0, 2.0);
        REQUIRE(r.size() == 1);
        CHECK(std::abs(r[0] - std::sqrt(2.0)) <= 1e-14 * std::sqrt(2.0));
    }
    SUBCASE("dispersion radicand at omega = vF q / 2") {
        // 1 - w^2 - 2 t w with t = omega / sqrt(vF^2 q^2 - omega^2) = 1/sqrt(3).
        const double t = 1.0 / std::sqrt(3.0);
        const auto r = find_roots([t](double w) { return 1.0 - w * w - 2.0 * t * w; }, 0.0, 4.0);
        REQUIRE(r.size() == 1);
        const double quadratic = -t + std::sqrt(t * t + 1.0);
        CHECK(std::abs(r[0] - quadratic) <= 1e-14 * quadratic);
    }
    SUBCASE("no sign change") {
        CHECK(find_roots([](double x) { return 1.0 + x * x; }, -3.0, 3.0).empty());
    }
}

TEST_CASE("accelerate") {
    SUBCASE("alternating harmonic series -> ln 2") {
        std::vector<double> s;
        double acc = 0.0;
        for (int k = 0; k < 20; ++k) {
            acc += (k % 2 == 0 ? 1.0 : -1.0) / (k + 1.0);
            s.push_back(acc);
        }
        const auto r = accelerate(s);
        CHECK(r.stable);
        CHECK(std::abs(r.value - std::log(2.0)) < 1e-10);
    }
    SUBCASE("alternating geometric series is reproduced exactly") {
        std::vector<double> s;
        double acc = 0.0, term = 1.0;
        for (int k = 0; k < 8; ++k) {
            acc += term;
            term *= -0.5;
            s.push_back(acc);
        }
        const auto r = accelerate(s);
        CHECK(std::abs(r.value - 2.0 / 3.0) < 1e-14);
    }
    SUBCASE("alternating series with cubic growth has antilimit eta(-3) = -1/8") {
        std::vector<double> s;
        double acc = 0.0;
        for (int n = 1; n <= 16; ++n) {
            acc += (n % 2 == 1 ? 1.0 : -1.0) * n * n * n;
            s.push_back(acc);
        }
        const auto r = accelerate(s);
        CHECK(std::abs(r.value + 0.125) < 1e-9);
    }
    SUBCASE("monotone divergence is flagged") {
        std::vector<double> s{1, 3, 6, 10, 15, 21};
        CHECK_FALSE(accelerate(s).stable);
    }
    SUBCASE("too few terms") {
        std::vector<double> s{1, 2, 3};
        CHECK_THROWS(accelerate(s));
    }
}
