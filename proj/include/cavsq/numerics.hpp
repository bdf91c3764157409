#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

namespace cavsq
{

struct Minimum
{
    double x;
    double value;
};

/// Brent minimization of a unimodal function on [lo, hi].
template<class F>
Minimum minimize_bracketed(F&& f, double lo, double hi)
{
    constexpr int bits = std::numeric_limits<double>::digits / 2;
    std::uintmax_t iters = 500;
    auto [x, v] = boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
    return {x, v};
}

/*!
 * Global minimum of f on [lo, hi] (lo > 0): scan a log-spaced grid, then run
 * Brent in log(x) on the two cells around the best grid point.
 */
template<class F>
Minimum minimize_log_grid(F&& f, double lo, double hi, int points = 400)
{
    if (!(lo > 0) || !(hi > lo) || points < 3)
        throw std::invalid_argument("minimize_log_grid: bad bracket");
    double const llo = std::log(lo);
    double const step = (std::log(hi) - llo) / (points - 1);
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i < points; ++i)
    {
        double const v = f(std::exp(llo + i * step));
        if (v < best_val)
        {
            best_val = v;
            best = i;
        }
    }
    double const a = llo + std::max(best - 1, 0) * step;
    double const b = llo + std::min(best + 1, points - 1) * step;
    auto in_log = [&f](double lx) { return f(std::exp(lx)); };
    auto m = minimize_bracketed(in_log, a, b);
    if (m.value <= best_val)
        return {std::exp(m.x), m.value};
    return {std::exp(llo + best * step), best_val};
}

/*!
 * Minimizer of a smooth function located as the sign change of its
 * derivative. Resolves the argmin to machine precision, which value-only
 * searches cannot (they stall near sqrt(eps)).
 */
template<class F, class DF>
Minimum minimize_by_derivative(F&& f, DF&& df, double lo, double hi)
{
    if (!(df(lo) < 0) || !(df(hi) > 0))
        throw std::invalid_argument("derivative does not bracket a minimum");
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits);
    auto [a, b] = boost::math::tools::toms748_solve(df, lo, hi, tol, iters);
    double const x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Order-independent compensated sum.
class KahanSum
{
  public:
    void add(double v)
    {
        double const y = v - comp_;
        double const t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0;
    double comp_ = 0;
};

}  // namespace cavsq
