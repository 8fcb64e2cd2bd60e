#pragma once

// Adaptive Gauss-Kronrod integration with endpoint-singularity maps,
// bracketing root location, Wynn-epsilon acceleration and compensated sums.
//
// All routines are stateless. A single problem is refined sequentially in a
// fixed order, so identical inputs give bit-identical results.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace gcas::quad {

/// Neumaier compensated accumulator. Works for double and std::complex<double>.
template <class T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_same_v<T, double>) {
            add_real(sum_, comp_, x);
        } else {
            double re = sum_.real(), im = sum_.imag();
            double cre = comp_.real(), cim = comp_.imag();
            add_real(re, cre, x.real());
            add_real(im, cim, x.imag());
            sum_ = T(re, im);
            comp_ = T(cre, cim);
        }
    }
    T value() const { return sum_ + comp_; }

private:
    static void add_real(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x)) {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    T sum_{};
    T comp_{};
};

enum class Singularity { InverseSqrt, LogLike, Unknown };

struct SingularPoint {
    double x;
    Singularity kind;
};

struct Interval {
    double lo;
    double hi;
};

template <class T>
struct IntegrationResult {
    T value{};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
    Interval worst_cell{0.0, 0.0};
};

struct Tolerance {
    double rel = 1e-10;
    double abs = 0.0;
    int max_subdivisions = 400;
};

/// Integrand description for the generic driver. `hi` may be +infinity; a
/// positive `tail_decay_rate` r declares that |f(x)| falls off at least like
/// exp(-r x), and the tail is mapped with x = x0 - ln(u)/r. Without a rate the
/// algebraic map x = x0 + s/(1-s) is used.
template <class T>
struct IntegrationProblem {
    std::function<T(double)> integrand;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<SingularPoint> known_singularities;
    Tolerance tol;
    double tail_decay_rate = 0.0;
};

namespace detail {

// 21-point Kronrod rule with embedded 10-point Gauss rule.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525683964, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Cell {
    double lo;
    double hi;
    T value;
    double error;
    bool operator<(const Cell& o) const {
        if (error != o.error) return error < o.error;
        return lo > o.lo;
    }
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) {
    return std::max(std::abs(z.real()), std::abs(z.imag()));
}

/// One GK21 panel with the QUADPACK error heuristic.
template <class T, class F>
Cell<T> gk21(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);
    T fv[21];
    const T fc = f(center);
    T resk = fc * kWgk[10];
    T resg{};
    double resabs = magnitude(fc) * kWgk[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += (f1 + f2) * kWgk[j];
        resabs += kWgk[j] * (magnitude(f1) + magnitude(f2));
        if (j % 2 == 1) resg += (f1 + f2) * kWg[j / 2];
    }
    const T mean = resk * 0.5;
    double resasc = kWgk[10] * magnitude(fc - mean);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk[j] * (magnitude(fv[2 * j] - mean) + magnitude(fv[2 * j + 1] - mean));
    }
    resasc *= abs_half;
    resabs *= abs_half;
    const T result = resk * half;
    double err = magnitude((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    if (!std::isfinite(magnitude(result))) err = std::numeric_limits<double>::infinity();
    return {a, b, result, err};
}

}  // namespace detail

/// Globally adaptive GK21 on a finite interval. The cell with the largest
/// error is bisected until the total error meets the tolerance or the
/// subdivision budget is exhausted.
template <class F>
auto integrate_finite(const F& f, double lo, double hi, const Tolerance& tol = {})
    -> IntegrationResult<decltype(f(lo))> {
    using T = decltype(f(lo));
    IntegrationResult<T> out;
    if (lo == hi) return out;
    std::priority_queue<detail::Cell<T>> cells;
    cells.push(detail::gk21<T>(f, lo, hi));
    std::size_t evals = 21;
    double total_err = cells.top().error;
    T total = cells.top().value;
    int divisions = 0;
    auto target = [&] { return std::max(tol.abs, tol.rel * detail::magnitude(total)); };
    while (total_err > target() && divisions < tol.max_subdivisions) {
        const auto worst = cells.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > std::min(worst.lo, worst.hi) && mid < std::max(worst.lo, worst.hi))) break;
        cells.pop();
        auto left = detail::gk21<T>(f, worst.lo, mid);
        auto right = detail::gk21<T>(f, mid, worst.hi);
        evals += 42;
        total += (left.value + right.value) - worst.value;
        total_err += (left.error + right.error) - worst.error;
        cells.push(left);
        cells.push(right);
        ++divisions;
        // Resum periodically to keep the running totals free of drift.
        if (divisions % 64 == 0) {
            auto copy = cells;
            CompensatedSum<T> s;
            CompensatedSum<double> e;
            while (!copy.empty()) {
                s.add(copy.top().value);
                e.add(copy.top().error);
                copy.pop();
            }
            total = s.value();
            total_err = e.value();
        }
    }
    // Final deterministic reduction in ascending-abscissa order.
    std::vector<detail::Cell<T>> all;
    all.reserve(cells.size());
    while (!cells.empty()) {
        all.push_back(cells.top());
        cells.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    CompensatedSum<T> s;
    CompensatedSum<double> e;
    const detail::Cell<T>* worst = &all.front();
    for (const auto& c : all) {
        s.add(c.value);
        e.add(c.error);
        if (c.error > worst->error) worst = &c;
    }
    out.value = s.value();
    out.error_estimate = e.value();
    out.evaluations = evals;
    out.converged = out.error_estimate <= std::max(tol.abs, tol.rel * detail::magnitude(out.value));
    out.worst_cell = {worst->lo, worst->hi};
    return out;
}

namespace detail {

template <class F>
using one_arg_result_t = std::conditional_t<std::is_invocable_v<const F&, double, double>,
                                            std::invoke_result<const F&, double, double>,
                                            std::invoke_result<const F&, double>>;

template <class T, class F>
T call_with_offset(const F& f, double x, double offset) {
    if constexpr (std::is_invocable_v<const F&, double, double>) {
        return f(x, offset);
    } else {
        return f(x);
    }
}

}  // namespace detail

/// Integral over [lo, hi] with a 1/sqrt-type (or sqrt-type) singular point at
/// `lo` (x = lo + s^2) and/or at `hi` (x = hi - s^2). When both ends are
/// singular the interval is split at its midpoint.
///
/// An integrand callable as f(x, d) receives d, the exact distance from x to
/// the nearer singular endpoint, so it can form radicands without cancellation.
template <class F>
auto integrate_sqrt_endpoints(const F& f, double lo, double hi, bool singular_lo, bool singular_hi,
                              const Tolerance& tol = {})
    -> IntegrationResult<typename detail::one_arg_result_t<F>::type> {
    using T = typename detail::one_arg_result_t<F>::type;
    if (singular_lo && singular_hi) {
        const double mid = 0.5 * (lo + hi);
        Tolerance half = tol;
        half.abs *= 0.5;
        auto a = integrate_sqrt_endpoints(f, lo, mid, true, false, half);
        auto b = integrate_sqrt_endpoints(f, mid, hi, false, true, half);
        IntegrationResult<T> r;
        r.value = a.value + b.value;
        r.error_estimate = a.error_estimate + b.error_estimate;
        r.evaluations = a.evaluations + b.evaluations;
        r.converged = a.converged && b.converged;
        r.worst_cell = a.error_estimate >= b.error_estimate ? a.worst_cell : b.worst_cell;
        return r;
    }
    const double width = hi - lo;
    if (singular_lo) {
        auto g = [&](double s) -> T { return detail::call_with_offset<T>(f, lo + s * s, s * s) * (2.0 * s); };
        auto r = integrate_finite(g, 0.0, std::sqrt(width), tol);
        r.worst_cell = {lo + r.worst_cell.lo * r.worst_cell.lo, lo + r.worst_cell.hi * r.worst_cell.hi};
        return r;
    }
    if (singular_hi) {
        auto g = [&](double s) -> T { return detail::call_with_offset<T>(f, hi - s * s, s * s) * (2.0 * s); };
        auto r = integrate_finite(g, 0.0, std::sqrt(width), tol);
        r.worst_cell = {hi - r.worst_cell.hi * r.worst_cell.hi, hi - r.worst_cell.lo * r.worst_cell.lo};
        return r;
    }
    auto g = [&](double x) -> T { return detail::call_with_offset<T>(f, x, std::min(x - lo, hi - x)); };
    return integrate_finite(g, lo, hi, tol);
}

/// Integral over [lo, inf). With rate > 0: x = lo - ln(u)/rate, u in (0,1].
/// Otherwise x = lo + scale * s/(1-s), s in (0,1).
template <class F>
auto integrate_tail(const F& f, double lo, double rate, const Tolerance& tol = {}, double scale = 1.0)
    -> IntegrationResult<decltype(f(lo))> {
    using T = decltype(f(lo));
    if (rate > 0.0) {
        auto g = [&](double u) -> T { return f(lo - std::log(u) / rate) * (1.0 / (rate * u)); };
        auto r = integrate_finite(g, 0.0, 1.0, tol);
        r.worst_cell = {lo - std::log(r.worst_cell.hi) / rate, lo - std::log(r.worst_cell.lo) / rate};
        return r;
    }
    auto g = [&](double s) -> T {
        const double d = 1.0 - s;
        return f(lo + scale * s / d) * (scale / (d * d));
    };
    auto r = integrate_finite(g, 0.0, 1.0, tol);
    r.worst_cell = {lo + scale * r.worst_cell.lo / (1.0 - r.worst_cell.lo),
                    r.worst_cell.hi >= 1.0 ? std::numeric_limits<double>::infinity()
                                           : lo + scale * r.worst_cell.hi / (1.0 - r.worst_cell.hi)};
    return r;
}

/// Generic driver: splits at declared singularities, maps InverseSqrt points
/// with the s^2 substitution, maps an infinite upper limit to (0,1].
template <class T>
IntegrationResult<T> integrate(const IntegrationProblem<T>& p) {
    if (!(p.lo < p.hi)) throw std::invalid_argument("integrate: require lo < hi");
    if (!(p.tol.rel > 0.0) && !(p.tol.abs > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");
    std::vector<SingularPoint> sing = p.known_singularities;
    for (const auto& s : sing) {
        if (s.x < p.lo || s.x > p.hi) throw std::invalid_argument("integrate: singularity outside the domain");
    }
    std::sort(sing.begin(), sing.end(), [](const auto& a, const auto& b) { return a.x < b.x; });

    std::vector<double> edges{p.lo};
    std::vector<bool> edge_sqrt{false};
    for (const auto& s : sing) {
        const bool is_sqrt = s.kind == Singularity::InverseSqrt;
        if (s.x == edges.back()) {
            edge_sqrt.back() = edge_sqrt.back() || is_sqrt;
            continue;
        }
        edges.push_back(s.x);
        edge_sqrt.push_back(is_sqrt);
    }
    const bool infinite = std::isinf(p.hi);
    if (!infinite) {
        if (edges.back() != p.hi) {
            edges.push_back(p.hi);
            edge_sqrt.push_back(false);
        }
    }
    const auto& f = p.integrand;
    IntegrationResult<T> out;
    CompensatedSum<T> sum;
    CompensatedSum<double> err;
    double worst_err = -1.0;
    std::size_t pieces = edges.size() - 1 + (infinite ? 1 : 0);
    Tolerance piece_tol = p.tol;
    piece_tol.abs = p.tol.abs / static_cast<double>(std::max<std::size_t>(pieces, 1));
    auto absorb = [&](const IntegrationResult<T>& r) {
        sum.add(r.value);
        err.add(r.error_estimate);
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
        if (r.error_estimate > worst_err) {
            worst_err = r.error_estimate;
            out.worst_cell = r.worst_cell;
        }
    };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        absorb(integrate_sqrt_endpoints(f, edges[i], edges[i + 1], edge_sqrt[i], edge_sqrt[i + 1], piece_tol));
    }
    if (infinite) {
        double start = edges.back();
        if (edge_sqrt.back()) {
            // Peel off a unit-length piece so the tail map starts on a regular point.
            const double next = start + std::max(1.0, std::abs(start));
            absorb(integrate_sqrt_endpoints(f, start, next, true, false, piece_tol));
            start = next;
        }
        absorb(integrate_tail(f, start, p.tail_decay_rate, piece_tol, std::max(1.0, std::abs(start))));
    }
    out.value = sum.value();
    out.error_estimate = err.value();
    return out;
}

/// Sign-change scan on `scan_points` equally spaced abscissae followed by
/// bracketed refinement of every bracket to relative tolerance `tol`.
std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14,
                               int scan_points = 256);

struct AccelerationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    /// False when the input shows no alternating/convergent structure the
    /// transform can exploit (e.g. monotone divergence).
    bool stable = true;
};

/// Wynn epsilon extrapolation of a sequence of partial sums. Needs at least
/// four entries. The error estimate is the magnitude of the last correction
/// between the two most recent even-column diagonal estimates.
AccelerationResult accelerate(std::span<const double> partial_sums);

}  // namespace gcas::quad
