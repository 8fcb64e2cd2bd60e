#include "gcas/quadrature.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace gcas::quad {

std::vector<double> find_roots(const std::function<double(double)>& f, double lo, double hi, double tol,
                               int scan_points) {
    std::vector<double> roots;
    if (!(lo < hi) || scan_points < 2) return roots;
    const int n = scan_points;
    double x_prev = lo;
    double f_prev = f(lo);
    if (f_prev == 0.0) roots.push_back(lo);
    for (int i = 1; i < n; ++i) {
        const double x = (i == n - 1) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (f_prev != 0.0 && std::signbit(fx) != std::signbit(f_prev)) {
            auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol * std::max(std::abs(a), std::abs(b)); };
            std::uintmax_t iters = 200;
            const auto bracket = boost::math::tools::toms748_solve(f, x_prev, x, f_prev, fx, stop, iters);
            roots.push_back(0.5 * (bracket.first + bracket.second));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

namespace {

// Highest even-column epsilon estimate using the first `count` partial sums.
double wynn_estimate(std::span<const double> s, std::size_t count) {
    // prev = column k-1, cur = column k; entries indexed by starting n.
    std::vector<double> prev(count + 1, 0.0);
    std::vector<double> cur(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(count));
    double best = cur.back();
    for (std::size_t k = 1; k < count; ++k) {
        std::vector<double> next(count - k);
        for (std::size_t n = 0; n + 1 < cur.size(); ++n) {
            const double diff = cur[n + 1] - cur[n];
            if (diff == 0.0) {
                // Column converged exactly; the previous even column holds the limit.
                return (k % 2 == 1) ? cur[n + 1] : best;
            }
            next[n] = prev[n + 1] + 1.0 / diff;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0) best = cur.back();
    }
    return best;
}

}  // namespace

AccelerationResult accelerate(std::span<const double> partial_sums) {
    const std::size_t n = partial_sums.size();
    if (n < 4) throw std::invalid_argument("accelerate: need at least four partial sums");
    AccelerationResult out;
    const double e0 = wynn_estimate(partial_sums, n);
    const double e1 = wynn_estimate(partial_sums, n - 1);
    const double e2 = wynn_estimate(partial_sums, n - 2);
    out.value = e0;
    out.error_estimate = std::max(std::abs(e0 - e1), std::abs(e0 - e2));

    // Monotone sequences whose increments do not shrink carry no usable tail.
    bool same_sign = true;
    const double d_first = partial_sums[1] - partial_sums[0];
    for (std::size_t i = 2; i < n; ++i) {
        const double d = partial_sums[i] - partial_sums[i - 1];
        if (std::signbit(d) != std::signbit(d_first) || d == 0.0) same_sign = false;
    }
    const double d_last = partial_sums[n - 1] - partial_sums[n - 2];
    if (same_sign && std::abs(d_last) >= std::abs(d_first)) out.stable = false;
    if (!std::isfinite(out.value) || !std::isfinite(out.error_estimate)) out.stable = false;
    return out;
}

}  // namespace gcas::quad
