#pragma once

#include "cavsq/spin_core.hpp"

namespace cavsq
{

//---------------------------------------------------------------------------//
/*!
 * Complex rate f_n(S_z) at which <S_+^n> accumulates phase under the probe.
 *
 * Lowest order in (Omega/kappa)|S_z|:
 *   f_n = n Omega |beta|^2 (1 + n(i-1) Omega/kappa + 2 (Omega/kappa) S_z)
 * The imaginary part damps the n-th coherence.
 */
struct CoherenceCoefficient
{
    int n;
    cplx value;
};

CoherenceCoefficient coherence_coefficient(int n, double sz,
                                           CavityAtomParams const& params,
                                           DrivePulse const& drive);

/// exp(i t [f_n(sz) - n f_1(0)]): the factor multiplying S_+^n after the
/// frame is rotated back about z by f_1(0) t.
cplx rotated_frame_factor(int n, double sz, CavityAtomParams const& params,
                          DrivePulse const& drive);

//---------------------------------------------------------------------------//
/*!
 * Second moments of the sheared state in the (y, z) plane.
 *
 * var_y is the second moment <S~_y^2> in the frame rotated back by f_1(0)t;
 * cov_w = <S~_y S_z + S_z S~_y>. With no Raman scattering var_z = S/2.
 */
struct MomentSet
{
    cplx mean_sp{0, 0};
    double var_y = 0;
    double var_z = 0;
    double cov_w = 0;
    double spin = 0;
    double shearing = 0;
};

struct RotatedVariance
{
    double alpha0 = 0;
    double sigma_min_sq = 0;
    double sigma_max_sq = 0;
    double v_plus = 0;
    double v_minus = 0;
    double w = 0;
    /// V_- = W = 0: every axis is a principal axis and alpha0 is set to 0.
    bool degenerate = false;
};

/// G_S(u) = cos^(2S-1)(u/S). Since 2S-1 is a nonnegative integer this is
/// defined for every u; S > 50 goes through log-space.
double g_factor(EnsembleSpec const& spec, double u);

MomentSet analytic_moments(EnsembleSpec const& spec, double q);

/// (S/2)(1 + Q + Q^2)
double large_s_variance(EnsembleSpec const& spec, double q);

/// Variance along z after rotating by -alpha about x.
double rotated_variance(MomentSet const& moments, double alpha);

RotatedVariance extremal_variances(MomentSet const& moments);

/// 1/Q + Q^4/(24 S^2), the normalized minimum to lowest order in curvature.
double curvature_corrected_min(EnsembleSpec const& spec, double q);

namespace detail
{
/// 1 - e^{-a} G_S(u) without cancellation when the product is close to 1.
double one_minus_damped_g(EnsembleSpec const& spec, double a, double u);
}  // namespace detail

}  // namespace cavsq
