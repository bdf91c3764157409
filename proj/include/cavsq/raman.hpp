#pragma once

#include "cavsq/feedback_analytic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cavsq
{

//---------------------------------------------------------------------------//
/*!
 * Raman (S_z-changing) free-space scattering during the probe pulse.
 *
 * Each atom leaves its current ground state at rate lambda = r/t, so the
 * collective S_z has 2<S_z(t1) S_z(t2)>/S = exp(-2 r |t1 - t2| / t).
 */
struct RamanProcess
{
    double r = 0;
    double flip_rate = 0;
    long n_atoms = 0;
    double pulse_time = 1.0;

    static RamanProcess make(EnsembleSpec const& spec, double r, double pulse_time = 1.0);
};

/// Normalized time-averaged correlations for the exponential autocorrelation:
///   c_bar_sq    = 2<Sbar_z^2>/S       = 2(x - 1 + e^{-x})/x^2
///   c_bar_final = 2<Sbar_z S_z(t)>/S  = (1 - e^{-x})/x,     x = 2r
struct CorrelationIntegrals
{
    double c_bar_sq;
    double c_bar_final;
};

CorrelationIntegrals correlation_integrals(double r);

/*!
 * Sheared moments with S_z replaced by its pulse average in the phase.
 *
 * The curvature factor G_S loses the decorrelated part of the S_z variance
 * (argument scaled by sqrt(c_bar_sq)); the y-z correlation is scaled by
 * c_bar_final. With r = 0 this is analytic_moments exactly.
 */
MomentSet modified_moments(EnsembleSpec const& spec, double q,
                           CorrelationIntegrals const& corr);

/// Normalized minimum variance including Raman decorrelation, r = Q/(4 S eta).
double modified_min_variance(EnsembleSpec const& spec, double eta, double q);

/// 1/Q + Q/(3 S eta)
double scattering_two_term(EnsembleSpec const& spec, double eta, double q);

//---------------------------------------------------------------------------//
enum class McMode
{
    automatic,
    exact,
    gaussian
};

char const* to_string(McMode mode);
McMode mc_mode_from_string(std::string const& name);

struct McOptions
{
    std::size_t n_traj = 10000;
    int time_steps = 64;
    std::uint64_t seed = 0;
    McMode mode = McMode::automatic;
    unsigned workers = 1;
};

struct LagCorrelation
{
    double lag_fraction;  // tau / t
    double value;         // 2<S_z(0) S_z(tau)>/S
    double std_error;
};

struct TrajectoryStats
{
    McMode mode_used = McMode::exact;
    std::size_t n_trajectories = 0;
    double mean_sz_bar_sq = 0;    // <Sbar_z^2>
    double mean_sz_bar_sq_se = 0;
    double cov_bar_final = 0;     // <Sbar_z S_z(t)>
    double cov_bar_final_se = 0;
    double c_bar_sq = 0;          // normalized by S/2
    double c_bar_sq_se = 0;
    double c_bar_final = 0;
    double c_bar_final_se = 0;
    std::vector<LagCorrelation> lags;
};

/// Trajectories of S_z under independent per-atom telegraph flips, started
/// from the coherent-state binomial distribution. Exact per-event jumps up to
/// 10^4 atoms, an exactly discretized Ornstein-Uhlenbeck aggregate above.
/// Bit-reproducible for a given seed regardless of the worker count.
TrajectoryStats sample_trajectories(RamanProcess const& process,
                                    EnsembleSpec const& spec,
                                    McOptions const& options);

//---------------------------------------------------------------------------//
struct Fig2Point
{
    double eta;
    double q;
    double sigma_min_sq;    // with Raman scattering
    double sigma_curv_sq;   // no scattering, full curvature
    double sigma_ideal_sq;  // 1/Q
};

std::vector<Fig2Point> fig2_curve(EnsembleSpec const& spec, double eta,
                                  std::vector<double> const& q_grid);

/// No-scattering normalized minimum variance from the full closed forms.
double no_scattering_min_variance(EnsembleSpec const& spec, double q);

}  // namespace cavsq
