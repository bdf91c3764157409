#include "cavsq/exact_oracle.hpp"

#include <cmath>
#include <quadmath.h>
#include <stdexcept>
#include <vector>

namespace cavsq
{

DensityMatrix::DensityMatrix(Eigen::MatrixXcd elements, std::size_t dim_cap)
    : rho_(std::move(elements))
{
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0)
        throw std::invalid_argument("density matrix must be square and nonempty");
    if (static_cast<std::size_t>(rho_.rows()) > dim_cap)
        throw std::length_error("density matrix dimension exceeds cap");
    if (hermiticity_error() > 1e-12)
        throw std::invalid_argument("density matrix is not Hermitian");
    if (trace_error() > 1e-12)
        throw std::invalid_argument("density matrix trace differs from 1");
    if (min_eigenvalue() < -1e-10)
        throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix::DensityMatrix(Unchecked, Eigen::MatrixXcd elements)
    : rho_(std::move(elements))
{
}

DensityMatrix DensityMatrix::from_pure(DickeState const& psi)
{
    auto const& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::hermiticity_error() const
{
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::trace_error() const
{
    return std::abs(rho_.trace() - cplx(1.0, 0.0));
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

namespace
{
// The sums run in binary128: with Q/S near 1 the phase-wound terms of size
// S^2 cancel to W ~ S^2 cos^{2S}(1/2), far below double rounding.
using quad = __float128;

struct QuadComplex
{
    quad re = 0;
    quad im = 0;

    QuadComplex& operator+=(QuadComplex const& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
};

QuadComplex times(QuadComplex a, QuadComplex b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

QuadComplex scaled(QuadComplex a, quad f)
{
    return {a.re * f, a.im * f};
}

QuadComplex unit_phase(quad phi)
{
    return {cosq(phi), sinq(phi)};
}

quad raising_element_q(quad s, quad m)
{
    return sqrtq((s - m) * (s + m + 1));
}

cplx to_cplx(QuadComplex z)
{
    return {static_cast<double>(z.re), static_cast<double>(z.im)};
}

template <class Amp>
OracleMoments oracle_sums(EnsembleSpec const& spec, std::size_t dim, Amp amp, double q)
{
    quad const s = static_cast<quad>(spec.two_s()) / 2;
    quad const twist = static_cast<quad>(q) / s;

    QuadComplex sum_sp;
    QuadComplex sum_sp2;
    QuadComplex sum_anti;  // <S~_+ S_z + S_z S~_+>
    quad sum_sz = 0;
    quad sum_sz2 = 0;

    for (std::size_t k = 0; k < dim; ++k)
    {
        quad const m = s - static_cast<quad>(k);
        QuadComplex const a_k = amp(k);
        quad const pk = a_k.re * a_k.re + a_k.im * a_k.im;
        sum_sz += pk * m;
        sum_sz2 += pk * m * m;

        // <m+1| e^{iQ S_z/S} S_+ |m>, upper state at index k-1
        if (k >= 1)
        {
            QuadComplex const up = amp(k - 1);
            QuadComplex const bra{up.re, -up.im};
            QuadComplex const elem = scaled(times(times(bra, a_k), unit_phase(twist * (m + 1))),
                                            raising_element_q(s, m));
            sum_sp += elem;
            sum_anti += scaled(elem, 2 * m + 1);
        }
        // <m+2| e^{2iQ S_z/S} S_+^2 |m>, upper state at index k-2
        if (k >= 2)
        {
            QuadComplex const up = amp(k - 2);
            QuadComplex const bra{up.re, -up.im};
            quad const a2 = raising_element_q(s, m) * raising_element_q(s, m + 1);
            sum_sp2 += scaled(times(times(bra, a_k), unit_phase(2 * twist * (m + 2))), a2);
        }
    }

    QuadComplex const prefactor = scaled(unit_phase(-twist), expq(-twist));
    QuadComplex const mean_sp2 = times(prefactor, sum_sp2);
    // S~_y^2 = -(S~_+^2 + S~_-^2 - S_+S_- - S_-S_+)/4, S_+S_- + S_-S_+ = 2(S^2 - S_z^2)
    quad const var_y = (s * (s + 1) - sum_sz2) / 2 - mean_sp2.re / 2;
    quad const mean_sy = sum_sp.im;

    OracleMoments out;
    out.spin = spec.spin();
    out.shearing = q;
    out.mean_sp = to_cplx(sum_sp);
    out.mean_sp2 = to_cplx(mean_sp2);
    out.mean_sz = static_cast<double>(sum_sz);
    out.var_z = static_cast<double>(sum_sz2 - sum_sz * sum_sz);
    out.var_y = static_cast<double>(var_y);
    out.centered_var_y = static_cast<double>(var_y - mean_sy * mean_sy);
    out.cov_w = static_cast<double>(sum_anti.im);
    return out;
}
}  // namespace

OracleMoments oracle_moments_state(EnsembleSpec const& spec,
                                   std::span<cplx const> psi, double q)
{
    if (psi.size() != spec.dicke_dim())
        throw std::invalid_argument("amplitude vector does not match Dicke dimension");
    if (!std::isfinite(q) || q < 0)
        throw std::invalid_argument("shearing strength must be finite and >= 0");
    return oracle_sums(spec, psi.size(), [&psi](std::size_t k) {
        return QuadComplex{psi[k].real(), psi[k].imag()};
    }, q);
}

OracleMoments oracle_moments_sum(EnsembleSpec const& spec, double q, std::size_t dim_cap)
{
    if (spec.dicke_dim() > dim_cap)
        throw std::length_error("oracle sum: Dicke dimension exceeds cap");
    if (!std::isfinite(q) || q < 0)
        throw std::invalid_argument("shearing strength must be finite and >= 0");
    // binomial amplitudes sqrt(C(2S, k)) 2^{-S}
    long const n = spec.two_s();
    quad const nq = static_cast<quad>(n);
    quad const lg_n = lgammaq(nq + 1);
    std::vector<quad> amps(spec.dicke_dim());
    for (std::size_t k = 0; k < amps.size(); ++k)
    {
        quad const kq = static_cast<quad>(k);
        quad const log_p = lg_n - lgammaq(kq + 1) - lgammaq(nq - kq + 1) - nq * M_LN2q;
        amps[k] = expq(log_p / 2);
    }
    return oracle_sums(spec, amps.size(), [&amps](std::size_t k) { return QuadComplex{amps[k], 0}; },
                       q);
}

DensityMatrix apply_feedback_channel(DensityMatrix const& rho, EnsembleSpec const& spec,
                                     double q)
{
    if (rho.dim() != spec.dicke_dim())
        throw std::invalid_argument("density matrix does not match Dicke dimension");
    if (!std::isfinite(q) || q < 0)
        throw std::invalid_argument("shearing strength must be finite and >= 0");

    double const s = spec.spin();
    double const twist = q / s;
    auto const dim = static_cast<Eigen::Index>(rho.dim());
    Eigen::MatrixXcd out = rho.elements();

    for (Eigen::Index row = 0; row < dim; ++row)
    {
        // col < row means m_col > m_row: the element feeds <S_+^n>
        for (Eigen::Index col = 0; col < row; ++col)
        {
            double const n = static_cast<double>(row - col);
            double const m_upper = spec.m_at(static_cast<std::size_t>(col));
            double const damp = -0.5 * n * (n - 1.0) * twist;
            cplx const factor = std::exp(cplx(damp, damp + n * twist * m_upper));
            if (std::abs(factor) > 1.0 + 1e-15)
                throw std::logic_error("feedback channel factor exceeds unit modulus");
            out(row, col) *= factor;
            out(col, row) *= std::conj(factor);
        }
    }
    return DensityMatrix(DensityMatrix::Unchecked{}, std::move(out));
}

OracleMoments density_moments(DensityMatrix const& rho, EnsembleSpec const& spec,
                              double q)
{
    auto const ops = build_operators(spec);
    auto const& r = rho.elements();
    auto tr = [&r](Eigen::MatrixXcd const& op) { return (r * op).trace(); };

    OracleMoments out;
    out.spin = spec.spin();
    out.shearing = q;
    out.mean_sp = tr(ops.sp);
    out.mean_sp2 = tr(ops.sp * ops.sp);
    out.mean_sz = tr(ops.sz).real();
    out.var_z = tr(ops.sz * ops.sz).real() - out.mean_sz * out.mean_sz;
    out.var_y = tr(ops.sy * ops.sy).real();
    double const mean_sy = tr(ops.sy).real();
    out.centered_var_y = out.var_y - mean_sy * mean_sy;
    out.cov_w = tr(ops.sy * ops.sz + ops.sz * ops.sy).real();
    return out;
}

double oracle_rotated_variance(OracleMoments const& m, double alpha)
{
    double const c = std::cos(alpha);
    double const sn = std::sin(alpha);
    double const second_z = m.var_z + m.mean_sz * m.mean_sz;
    double const value = c * c * second_z + sn * sn * m.var_y - sn * c * m.cov_w;
    return value / (0.5 * m.spin);
}

BruteForceMinimum brute_force_min_variance(EnsembleSpec const& spec, double q)
{
    auto const m = oracle_moments_sum(spec, q);
    auto f = [&m](double a) { return oracle_rotated_variance(m, a); };

    constexpr int grid = 720;
    double const step = kPi / grid;
    int best = 0;
    double best_val = f(0.0);
    for (int i = 1; i < grid; ++i)
    {
        double const v = f(i * step);
        if (v < best_val)
        {
            best_val = v;
            best = i;
        }
    }

    double lo = (best - 1) * step;
    double hi = (best + 1) * step;
    while (hi - lo > 1e-10)
    {
        double const m1 = lo + (hi - lo) / 3.0;
        double const m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2))
            hi = m2;
        else
            lo = m1;
    }
    double alpha = 0.5 * (lo + hi);
    double value = f(alpha);
    if (best_val < value)
    {
        alpha = best * step;
        value = best_val;
    }
    alpha = std::fmod(alpha, kPi);
    if (alpha < 0)
        alpha += kPi;
    return {alpha, value};
}

}  // namespace cavsq
