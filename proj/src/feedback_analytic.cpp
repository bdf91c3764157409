#include "cavsq/feedback_analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace cavsq
{

CoherenceCoefficient coherence_coefficient(int n, double sz,
                                           CavityAtomParams const& params,
                                           DrivePulse const& drive)
{
    if (n < 1)
        throw std::invalid_argument("coherence order must be >= 1");
    double const ratio = params.omega_shift() / params.kappa();
    double const nn = n;
    cplx const bracket = 1.0 + nn * cplx(-1.0, 1.0) * ratio + 2.0 * ratio * sz;
    return {n, nn * params.omega_shift() * drive.drive_rate() * bracket};
}

cplx rotated_frame_factor(int n, double sz, CavityAtomParams const& params,
                          DrivePulse const& drive)
{
    cplx const fn = coherence_coefficient(n, sz, params, drive).value;
    cplx const f1 = coherence_coefficient(1, 0.0, params, drive).value;
    cplx const rate = fn - static_cast<double>(n) * f1;
    return std::exp(cplx(0, 1) * rate * drive.pulse_time());
}

namespace
{
struct SignedLog
{
    double log_abs;  // -inf when the value is zero
    int sign;
};

SignedLog log_g(EnsembleSpec const& spec, double u)
{
    long const k = spec.two_s() - 1;
    if (k == 0)
        return {0.0, 1};
    double const x = u / spec.spin();
    double const c = std::cos(x);
    if (c == 0.0)
        return {-INFINITY, 1};
    // ln|cos x| via log1p(-2 sin^2(x/2)) keeps precision for small x
    double const h = std::sin(0.5 * x);
    double const log_abs = c > 0 ? std::log1p(-2.0 * h * h) : std::log(-c);
    int const sign = (c < 0 && (k % 2 == 1)) ? -1 : 1;
    return {static_cast<double>(k) * log_abs, sign};
}
}  // namespace

double g_factor(EnsembleSpec const& spec, double u)
{
    long const k = spec.two_s() - 1;
    if (k == 0)
        return 1.0;
    if (spec.spin() <= 50.0)
        return std::pow(std::cos(u / spec.spin()), static_cast<int>(k));
    auto const lg = log_g(spec, u);
    return lg.sign * std::exp(lg.log_abs);
}

namespace detail
{
double one_minus_damped_g(EnsembleSpec const& spec, double a, double u)
{
    auto const lg = log_g(spec, u);
    if (lg.sign > 0)
        return -std::expm1(lg.log_abs - a);
    return 1.0 + std::exp(lg.log_abs - a);
}
}  // namespace detail

MomentSet analytic_moments(EnsembleSpec const& spec, double q)
{
    if (!std::isfinite(q) || q < 0)
        throw std::invalid_argument("shearing strength must be finite and >= 0");
    double const s = spec.spin();
    MomentSet out;
    out.spin = s;
    out.shearing = q;

    double const g_half = g_factor(spec, 0.5 * q);
    out.mean_sp = s * std::polar(1.0, q / (2.0 * s)) * g_half;

    // S^2/2 + S/4 - (S^2/2 - S/4) e^{-Q/S} G_S(Q), regrouped so the
    // large-S cancellation happens inside expm1.
    double const one_minus = detail::one_minus_damped_g(spec, q / s, q);
    out.var_y = 0.5 * s * s * one_minus + 0.25 * s * (2.0 - one_minus);
    out.var_z = 0.5 * s;
    out.cov_w = (2.0 * s * s - s) * std::sin(q / (2.0 * s)) * g_half;
    return out;
}

double large_s_variance(EnsembleSpec const& spec, double q)
{
    return 0.5 * spec.spin() * (1.0 + q + q * q);
}

RotatedVariance extremal_variances(MomentSet const& m)
{
    if (!std::isfinite(m.var_y) || !std::isfinite(m.var_z) || !std::isfinite(m.cov_w))
        throw std::invalid_argument("moments must be finite");
    RotatedVariance rv;
    rv.v_plus = m.var_y + m.var_z;
    rv.v_minus = m.var_y - m.var_z;
    rv.w = m.cov_w;
    rv.degenerate = (rv.v_minus == 0.0 && rv.w == 0.0);
    rv.alpha0 = rv.degenerate ? 0.0 : 0.5 * std::atan2(rv.w, rv.v_minus);

    double const radius = std::hypot(rv.v_minus, rv.w);
    double const norm = 0.5 * m.spin;
    double const max_var = 0.5 * (rv.v_plus + radius);
    // lambda_min = det / lambda_max avoids subtracting two large numbers
    double const det = m.var_y * m.var_z - 0.25 * m.cov_w * m.cov_w;
    double const min_var = max_var > 0 ? det / max_var : 0.5 * (rv.v_plus - radius);
    rv.sigma_min_sq = min_var / norm;
    rv.sigma_max_sq = max_var / norm;
    return rv;
}

double rotated_variance(MomentSet const& m, double alpha)
{
    auto const rv = extremal_variances(m);
    double const radius = std::hypot(rv.v_minus, rv.w);
    return 0.5 * (rv.v_plus - radius * std::cos(2.0 * (alpha - rv.alpha0)));
}

double curvature_corrected_min(EnsembleSpec const& spec, double q)
{
    if (!(q > 0))
        throw std::invalid_argument("curvature_corrected_min needs Q > 0");
    double const s = spec.spin();
    return 1.0 / q + q * q * q * q / (24.0 * s * s);
}

}  // namespace cavsq
