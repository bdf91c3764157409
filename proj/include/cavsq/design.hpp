#pragma once

#include "cavsq/spin_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cavsq
{

inline constexpr int kSchemaVersion = 1;

struct CurvatureOptimum
{
    double q_curv;
    double sigma_curv_sq;
};

/// Q_curv = 6^{1/5} S^{2/5}, sigma_curv^2 = (5/4) 6^{-1/5} S^{-2/5}: the
/// minimum of 1/Q + Q^4/(24 S^2).
CurvatureOptimum curvature_optimum(EnsembleSpec const& spec);

struct ScatteringOptimum
{
    double q_scatt;
    double r_opt;
    double sigma_sq;
    /// r_opt >= 0.3: the small-r expansion behind these numbers is not trusted.
    bool expansion_warning;
};

/// Optimum of 1/Q + Q/(3 S eta): Q = sqrt(3 S eta), r = sqrt(3/(16 S eta)).
ScatteringOptimum scattering_optimum(EnsembleSpec const& spec, double eta);

enum class LimitingRegime
{
    scattering,
    curvature
};

char const* to_string(LimitingRegime regime);

struct RegimeClassification
{
    LimitingRegime regime;
    double s_eta5;
    /// S eta^5 within a factor 3 of the threshold.
    bool near_boundary;
    double sigma_curv_sq;
    double sigma_scatt_sq;
};

RegimeClassification classify_regime(EnsembleSpec const& spec, double eta,
                                     double threshold = 1.0);

struct CurveOptimum
{
    double q;
    double sigma_min_sq;
};

/// Minimum over 0 < Q <= S of the Raman-degraded closed-form variance.
CurveOptimum full_curve_optimum(EnsembleSpec const& spec, double eta);

/// Minimum over 0 < Q <= S of the no-scattering closed-form variance.
CurveOptimum no_scattering_optimum(EnsembleSpec const& spec);

struct DesignTargets
{
    /// Requested shearing; the numerical optimum is used when absent.
    std::optional<double> q;
    std::optional<double> pulse_time;
    RegimeThresholds thresholds;
};

struct SqueezeReport
{
    double spin = 0;
    double g = 0, kappa = 0, gamma = 0, delta = 0;
    double omega_shift = 0;
    double eta = 0;

    double q_curv = 0;
    double sigma_curv_sq = 0;
    double q_scatt = 0;
    double r_opt = 0;
    double sigma_scatt_sq = 0;
    double q_full_opt = 0;
    double sigma_full_min = 0;
    RegimeClassification classification{};

    double q_recommended = 0;
    double sigma_at_recommended = 0;
    double r_at_recommended = 0;
    double p0_required = 0;
    double kappa_t_min = 0;
    double t_min_s = 0;
    double t_used_s = 0;
    RegimeReport validity;
    std::vector<std::string> warnings;
};

/// Throws std::invalid_argument("no shearing requested") for a zero target.
SqueezeReport design_report(EnsembleSpec const& spec, CavityAtomParams const& params,
                            DesignTargets const& targets = {});

struct SweepRow
{
    double spin;
    double eta;
    RegimeClassification classification;
    CurvatureOptimum curvature;
    ScatteringOptimum scattering;
    CurveOptimum full;
    /// True when the S eta^5 rule picks the larger of the two floors.
    bool rule_agrees;
};

std::vector<SweepRow> design_sweep(std::vector<double> const& spins,
                                   std::vector<double> const& etas,
                                   unsigned workers = 1);

}  // namespace cavsq
