#include "cavsq/exact_oracle.hpp"
#include "cavsq/feedback_analytic.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace cavsq;

namespace
{
double rel(double a, double b)
{
    double const scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

Eigen::MatrixXcd random_density(std::size_t dim, std::mt19937_64& gen)
{
    std::normal_distribution<double> normal;
    auto const n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = cplx(normal(gen), normal(gen));
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace().real();
    // exact Hermiticity after the product's rounding
    return 0.5 * (rho + rho.adjoint()).eval();
}

Eigen::VectorXcd random_pure(std::size_t dim, std::mt19937_64& gen)
{
    std::normal_distribution<double> normal;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (auto& x : v)
        x = cplx(normal(gen), normal(gen));
    return v / v.norm();
}

void check_moments_agree(OracleMoments const& a, OracleMoments const& b, double tol)
{
    double const s = a.spin;
    CHECK(std::abs(a.mean_sp - b.mean_sp) <= tol * std::max(1.0, s));
    CHECK(std::abs(a.mean_sp2 - b.mean_sp2) <= tol * std::max(1.0, s * s));
    CHECK(std::abs(a.mean_sz - b.mean_sz) <= tol * std::max(1.0, s));
    CHECK(rel(a.var_y, b.var_y) <= tol);
    CHECK(rel(a.var_z, b.var_z) <= tol);
    CHECK(std::abs(a.cov_w - b.cov_w) <= tol * std::max({1.0, std::abs(a.cov_w), s}));
}
}  // namespace

TEST_CASE("oracle on the unsheared coherent state")
{
    for (double s : {0.5, 1.0, 12.5, 200.0})
    {
        auto const o = oracle_moments_sum(EnsembleSpec::from_spin(s), 0.0);
        CAPTURE(s);
        CHECK(o.mean_sp.real() == doctest::Approx(s).epsilon(1e-13));
        CHECK(std::abs(o.mean_sp.imag()) < 1e-13 * s);
        CHECK(o.var_y == doctest::Approx(s / 2).epsilon(1e-13));
        CHECK(o.var_z == doctest::Approx(s / 2).epsilon(1e-13));
        CHECK(std::abs(o.cov_w) < 1e-13 * s);
    }
}

TEST_CASE("oracle invariants")
{
    for (double s : {0.5, 2.0, 30.0})
        for (double q : {0.0, 1.0, 0.9 * s})
        {
            auto const o = oracle_moments_sum(EnsembleSpec::from_spin(s), q);
            CHECK(std::abs(o.mean_sp) <= s * (1 + 1e-14));
            CHECK(o.var_y >= 0);
            CHECK(o.var_z >= 0);
            CHECK(o.centered_var_y <= o.var_y);
        }
}

TEST_CASE("oracle at S = 10^4 against the closed form")
{
    auto const spec = EnsembleSpec::from_spin(1e4);
    auto const o = oracle_moments_sum(spec, 50.0);
    auto const c = analytic_moments(spec, 50.0);
    CHECK(std::isfinite(o.var_y));
    CHECK(rel(o.var_y, c.var_y) < 1e-8);
    CHECK(rel(o.cov_w, c.cov_w) < 1e-8);
}

TEST_CASE("oracle rejects bad input")
{
    auto const spec = EnsembleSpec::from_spin(2);
    std::vector<cplx> wrong(3, cplx(1, 0));
    CHECK_THROWS_AS(oracle_moments_state(spec, wrong, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(oracle_moments_sum(spec, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(oracle_moments_sum(EnsembleSpec::from_spin(100), 1.0, 100),
                    std::length_error);
}

TEST_CASE("density matrix validation")
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3) / 3.0;
    CHECK_NOTHROW(DensityMatrix{m});

    Eigen::MatrixXcd bad_trace = m * 1.1;
    CHECK_THROWS_AS(DensityMatrix{bad_trace}, std::invalid_argument);

    Eigen::MatrixXcd non_herm = m;
    non_herm(0, 1) = cplx(0.1, 0);
    CHECK_THROWS_AS(DensityMatrix{non_herm}, std::invalid_argument);

    Eigen::MatrixXcd negative = Eigen::MatrixXcd::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);

    Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(402, 402) / 402.0;
    CHECK_THROWS_AS(DensityMatrix{big}, std::length_error);
}

TEST_CASE("channel at Q = 0 is the identity")
{
    std::mt19937_64 gen(7);
    auto const spec = EnsembleSpec::from_spin(3.5);
    DensityMatrix const rho(random_density(spec.dicke_dim(), gen));
    auto const out = apply_feedback_channel(rho, spec, 0.0);
    CHECK((out.elements() - rho.elements()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel preserves trace, Hermiticity and populations")
{
    std::mt19937_64 gen(2024);
    for (double s : {0.5, 1.0, 4.5, 20.0, 60.0})
    {
        auto const spec = EnsembleSpec::from_spin(s);
        for (double q : {0.3, 3.0, s})
        {
            DensityMatrix const rho(random_density(spec.dicke_dim(), gen));
            auto const out = apply_feedback_channel(rho, spec, q);
            CAPTURE(s);
            CAPTURE(q);
            CHECK(out.hermiticity_error() <= 1e-14);
            CHECK(std::abs(out.elements().trace() - rho.elements().trace()) <= 1e-14);
            CHECK((out.elements().diagonal() - rho.elements().diagonal()).cwiseAbs().maxCoeff()
                  == 0.0);
        }
    }
}

TEST_CASE("second coherence is damped by exactly e^{-Q/S}")
{
    auto const spec = EnsembleSpec::from_spin(10);
    auto const n = static_cast<Eigen::Index>(spec.dicke_dim());
    DensityMatrix const rho(Eigen::MatrixXcd::Constant(n, n, 1.0 / n));
    double const q = 3.0;
    auto const out = apply_feedback_channel(rho, spec, q);
    for (Eigen::Index k = 0; k + 2 < n; ++k)
    {
        CHECK(std::abs(out.elements()(k + 2, k)) * n
              == doctest::Approx(std::exp(-q / 10)).epsilon(1e-14));
        CHECK(std::abs(out.elements()(k + 1, k)) * n == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("channel moments equal the direct sums")
{
    auto const spec50 = EnsembleSpec::from_spin(50);
    auto const css = DensityMatrix::from_pure(make_css(spec50));
    auto const out = apply_feedback_channel(css, spec50, 2.0);
    check_moments_agree(density_moments(out, spec50, 2.0), oracle_moments_sum(spec50, 2.0), 1e-10);

    for (double s : {0.5, 1.0, 2.5, 10.0, 33.0, 100.0})
    {
        auto const spec = EnsembleSpec::from_spin(s);
        auto const rho = DensityMatrix::from_pure(make_css(spec));
        for (double q : {0.0, 0.1, 1.0, 5.0, 0.5 * s, s})
        {
            CAPTURE(s);
            CAPTURE(q);
            check_moments_agree(density_moments(apply_feedback_channel(rho, spec, q), spec, q),
                                oracle_moments_sum(spec, q), 1e-10);
        }
    }
}

TEST_CASE("channel reproduces the sums on arbitrary pure states")
{
    std::mt19937_64 gen(99);
    for (double s : {1.5, 8.0, 40.0})
    {
        auto const spec = EnsembleSpec::from_spin(s);
        Eigen::VectorXcd const psi = random_pure(spec.dicke_dim(), gen);
        auto const rho = DensityMatrix::from_pure(DickeState(psi));
        std::vector<cplx> amps(psi.data(), psi.data() + psi.size());
        for (double q : {0.5, 4.0})
        {
            CAPTURE(s);
            check_moments_agree(density_moments(apply_feedback_channel(rho, spec, q), spec, q),
                                oracle_moments_state(spec, amps, q), 1e-10);
        }
    }
}

TEST_CASE("lowest-order channel is not completely positive")
{
    auto const spec = EnsembleSpec::from_spin(50);
    auto const out = apply_feedback_channel(DensityMatrix::from_pure(make_css(spec)), spec, 2.0);
    CHECK(out.min_eigenvalue() < -1e-3);
    CHECK(out.trace_error() < 1e-14);
}

TEST_CASE("brute-force minimum over the rotation angle")
{
    auto const spec0 = EnsembleSpec::from_spin(20);
    CHECK(brute_force_min_variance(spec0, 0.0).sigma_min_sq == doctest::Approx(1.0).epsilon(1e-12));

    auto const spec = EnsembleSpec::from_spin(100);
    for (double q : {0.5, 5.0, 20.0, 60.0})
    {
        auto const bf = brute_force_min_variance(spec, q);
        auto const rv = extremal_variances(analytic_moments(spec, q));
        CAPTURE(q);
        CHECK(std::abs(bf.sigma_min_sq - rv.sigma_min_sq) < 1e-8);
        double const d = std::remainder(bf.alpha_min - rv.alpha0, kPi);
        CHECK(std::abs(d) < 1e-6);
    }
    CHECK(brute_force_min_variance(spec, 60.0).sigma_min_sq > 1.0 / 60);
}
