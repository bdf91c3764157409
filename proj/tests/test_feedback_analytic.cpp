#include "cavsq/exact_oracle.hpp"
#include "cavsq/feedback_analytic.hpp"
#include "cavsq/numerics.hpp"
#include "cavsq/design.hpp"

#include "doctest.h"

#include <cmath>

using namespace cavsq;

namespace
{
double rel(double a, double b)
{
    double const scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

MomentSet as_moment_set(OracleMoments const& o)
{
    MomentSet m;
    m.mean_sp = o.mean_sp;
    m.var_y = o.var_y;
    m.var_z = o.var_z;
    m.cov_w = o.cov_w;
    m.spin = o.spin;
    m.shearing = o.shearing;
    return m;
}
}  // namespace

TEST_CASE("G_S trivial values")
{
    for (double s : {0.5, 1.0, 7.5, 1e4})
        CHECK(g_factor(EnsembleSpec::from_spin(s), 0.0) == 1.0);
    auto const half = EnsembleSpec::from_spin(0.5);
    for (double u : {0.1, 1.0, 3.0, 100.0})
        CHECK(g_factor(half, u) == 1.0);
}

TEST_CASE("G_S log-space path matches a long double power")
{
    auto const spec = EnsembleSpec::from_spin(1e4);
    for (double u : {1.0, 10.0, 50.0, 120.0})
    {
        long double const direct
            = std::pow(std::cos(static_cast<long double>(u) / 1e4L), 19999.0L);
        CAPTURE(u);
        CHECK(rel(g_factor(spec, u), static_cast<double>(direct)) < 1e-12);
    }
}

TEST_CASE("G_S beyond a quarter turn keeps the sign of the odd power")
{
    // 2S - 1 is an integer, so the power is defined for negative cosines
    CHECK(g_factor(EnsembleSpec::from_spin(1), 5.0) == doctest::Approx(std::cos(5.0)));
    CHECK(g_factor(EnsembleSpec::from_spin(1.5), 4.0)
          == doctest::Approx(std::pow(std::cos(4.0 / 1.5), 2)));
    auto const big = EnsembleSpec::from_spin(100);
    long double const direct = std::pow(std::cos(250.0L / 100.0L), 199.0L);
    CHECK(rel(g_factor(big, 250.0), static_cast<double>(direct)) < 1e-12);
}

TEST_CASE("coherence rates and rotated-frame factors")
{
    auto const spec = EnsembleSpec::from_spin(1e4);
    auto const p = CavityAtomParams::from_hz(0.4e6, 1e6, 6.07e6, 500 * 6.07e6);
    double const q = 50;
    auto const d = DrivePulse::from_shearing(spec, p, q, 400 / p.kappa());
    double const s = spec.spin();

    auto const f1 = coherence_coefficient(1, 0.0, p, d);
    CHECK(f1.value.real() * d.pulse_time() > 0);
    double const ratio = p.omega_shift() / p.kappa();
    CHECK(f1.value.imag()
          == doctest::Approx(p.omega_shift() * d.drive_rate() * ratio).epsilon(1e-14));

    // second coherence in the rotated frame: e^{-(1+i)Q/S}
    cplx const f2 = rotated_frame_factor(2, 0.0, p, d);
    CHECK(std::abs(f2) == doctest::Approx(std::exp(-q / s)).epsilon(1e-12));
    CHECK(std::arg(f2) == doctest::Approx(-q / s).epsilon(1e-10));

    // first coherence: phase Q S_z / S, no damping
    for (double sz : {-30.0, 0.0, 17.0})
    {
        cplx const f = rotated_frame_factor(1, sz, p, d);
        CHECK(std::abs(f) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::arg(f) == doctest::Approx(q * sz / s).epsilon(1e-10));
    }

    auto const weak = CavityAtomParams::from_hz(1e-3, 1e6, 6.07e6, 500 * 6.07e6);
    auto const dw = DrivePulse::from_photons(spec, weak, 1e5, 1e-4);
    CHECK(std::abs(coherence_coefficient(3, 0.0, weak, dw).value) < 1e-10);
    CHECK_THROWS_AS(coherence_coefficient(0, 0.0, p, d), std::invalid_argument);
}

TEST_CASE("moments of the unsheared coherent state")
{
    for (double s : {0.5, 1.0, 10.0, 1e4, 1e6})
    {
        auto const m = analytic_moments(EnsembleSpec::from_spin(s), 0.0);
        CAPTURE(s);
        CHECK(m.var_y == doctest::Approx(s / 2).epsilon(1e-15));
        CHECK(m.cov_w == 0.0);
        CHECK(m.var_z == s / 2);
        auto const rv = extremal_variances(m);
        CHECK(rv.degenerate);
        CHECK(rv.sigma_min_sq == doctest::Approx(1.0));
        CHECK(rv.sigma_max_sq == doctest::Approx(1.0));
        for (double a : {0.0, 0.4, 1.3, 2.9})
            CHECK(rotated_variance(m, a) == doctest::Approx(s / 2).epsilon(1e-15));
    }
}

TEST_CASE("large-S variance")
{
    auto const spec = EnsembleSpec::from_spin(1e4);
    CHECK(large_s_variance(spec, 0.0) == 5e3);
    CHECK(large_s_variance(spec, 1.0) == 1.5e4);
    CHECK(rel(analytic_moments(spec, 10.0).var_y, large_s_variance(spec, 10.0)) < 0.01);

    auto const huge = EnsembleSpec::from_spin(1e6);
    CHECK(rel(analytic_moments(huge, 3.0).var_y, large_s_variance(huge, 3.0)) < 1e-4);
}

TEST_CASE("closed forms equal explicit Dicke sums")
{
    for (double s : {0.5, 1.0, 3.5, 5.0, 20.0, 50.0, 120.0, 200.0})
    {
        auto const spec = EnsembleSpec::from_spin(s);
        for (double q_over_s : {0.0, 0.01, 0.1, 0.3, 0.6, 1.0})
        {
            double const q = q_over_s * s;
            auto const c = analytic_moments(spec, q);
            auto const o = oracle_moments_sum(spec, q);
            CAPTURE(s);
            CAPTURE(q);
            CHECK(rel(c.var_y, o.var_y) < 1e-10);
            CHECK(rel(c.cov_w, o.cov_w) < 1e-10);
            CHECK(rel(c.var_z, o.var_z) < 1e-10);
            CHECK(std::abs(c.mean_sp - o.mean_sp) < 1e-10 * s);
        }
    }
    for (double s : {1.0, 5.0, 50.0})
        for (double q : {0.1, 1.0, 5.0})
        {
            auto const spec = EnsembleSpec::from_spin(s);
            CHECK(rel(analytic_moments(spec, q).var_y, oracle_moments_sum(spec, q).var_y)
                  < 1e-10);
        }
}

TEST_CASE("sheared y variance grows with Q")
{
    for (double s : {0.5, 2.0, 10.0, 100.0, 1e4})
    {
        auto const spec = EnsembleSpec::from_spin(s);
        double prev = analytic_moments(spec, 0.0).var_y;
        for (int k = 1; k <= 400; ++k)
        {
            double const v = analytic_moments(spec, s * k / 400.0).var_y;
            CAPTURE(s);
            CAPTURE(k);
            CHECK(v >= prev * (1 - 1e-15));
            CHECK(v >= 0);
            prev = v;
        }
    }
}

TEST_CASE("extremal variances bound the rotated variance")
{
    for (double s : {0.5, 3.0, 100.0, 1e4})
        for (double q : {0.3, 2.0, 20.0, 0.7 * s})
        {
            auto const m = analytic_moments(EnsembleSpec::from_spin(s), q);
            auto const rv = extremal_variances(m);
            double const norm = s / 2;
            CAPTURE(s);
            CAPTURE(q);
            for (int i = 0; i < 1000; ++i)
            {
                double const a = kPi * i / 1000.0;
                double const v = rotated_variance(m, a) / norm;
                CHECK(v >= rv.sigma_min_sq - 1e-12 * std::max(1.0, rv.sigma_max_sq));
                CHECK(v <= rv.sigma_max_sq * (1 + 1e-12));
                CHECK(rotated_variance(m, a + kPi) == doctest::Approx(rotated_variance(m, a)));
            }
            CHECK(rotated_variance(m, rv.alpha0) / norm
                  == doctest::Approx(rv.sigma_min_sq).epsilon(1e-9));
            CHECK(rotated_variance(m, rv.alpha0 + kPi / 2) / norm
                  == doctest::Approx(rv.sigma_max_sq).epsilon(1e-12));
            if (rv.v_minus != 0)
                CHECK(std::tan(2 * rv.alpha0) == doctest::Approx(rv.w / rv.v_minus).epsilon(1e-10));
        }
}

TEST_CASE("asymptotic squeezing and anti-squeezing")
{
    auto const spec = EnsembleSpec::from_spin(1e4);
    auto const rv = extremal_variances(analytic_moments(spec, 20.0));
    CHECK(rv.sigma_min_sq == doctest::Approx(1.0 / 20).epsilon(0.15));
    CHECK(rv.sigma_max_sq == doctest::Approx(400).epsilon(0.15));
    CHECK(std::sqrt(rv.sigma_min_sq * rv.sigma_max_sq)
          == doctest::Approx(std::sqrt(20.0)).epsilon(0.10));
}

TEST_CASE("two-term curvature form")
{
    for (double s : {1.0, 100.0, 1e4, 1e6})
    {
        auto const spec = EnsembleSpec::from_spin(s);
        auto const opt = curvature_optimum(spec);
        CHECK(rel(curvature_corrected_min(spec, opt.q_curv), opt.sigma_curv_sq) < 1e-12);
    }
    auto const spec = EnsembleSpec::from_spin(1e4);
    for (double q : {1e-3, 1e-5, 1e-7})
        CHECK(q * curvature_corrected_min(spec, q) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(curvature_corrected_min(spec, 0.0), std::invalid_argument);
}

TEST_CASE("full pipeline optimum sits near Q_curv")
{
    auto const spec = EnsembleSpec::from_spin(1e4);
    auto f = [&spec](double q) { return extremal_variances(analytic_moments(spec, q)).sigma_min_sq; };
    auto const best = minimize_log_grid(f, 1e-2, 1e4);
    CHECK(best.x == doctest::Approx(curvature_optimum(spec).q_curv).epsilon(0.05));
}

TEST_CASE("uncertainty bound on oracle states")
{
    for (double s : {0.5, 1.0, 4.0, 25.0, 150.0})
        for (double q : {0.0, 0.2, 1.5, 8.0, 0.8 * s})
        {
            auto const o = oracle_moments_sum(EnsembleSpec::from_spin(s), q);
            auto const rv = extremal_variances(as_moment_set(o));
            double const contrast = o.mean_sp.real() / s;
            CAPTURE(s);
            CAPTURE(q);
            CHECK(rv.sigma_min_sq * rv.sigma_max_sq >= std::pow(contrast, 4) - 1e-12);
        }
}
