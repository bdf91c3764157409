#include "cavsq/design.hpp"

#include "cavsq/numerics.hpp"
#include "cavsq/parallel.hpp"
#include "cavsq/raman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavsq
{

CurvatureOptimum curvature_optimum(EnsembleSpec const& spec)
{
    double const s = spec.spin();
    if (s < 1.0)
        throw std::invalid_argument("curvature optimum needs S >= 1");
    double const six_fifth = std::pow(6.0, 0.2);
    double const s_two_fifths = std::pow(s, 0.4);
    return {six_fifth * s_two_fifths, 1.25 / (six_fifth * s_two_fifths)};
}

ScatteringOptimum scattering_optimum(EnsembleSpec const& spec, double eta)
{
    double const s_eta = spec.spin() * eta;
    if (!(s_eta > 0))
        throw std::invalid_argument("collective cooperativity must be positive");
    double const q = std::sqrt(3.0 * s_eta);
    double const r = std::sqrt(3.0 / (16.0 * s_eta));
    return {q, r, 2.0 / q, r >= 0.3};
}

char const* to_string(LimitingRegime regime)
{
    return regime == LimitingRegime::curvature ? "curvature" : "scattering";
}

RegimeClassification classify_regime(EnsembleSpec const& spec, double eta,
                                     double threshold)
{
    if (!(eta > 0))
        throw std::invalid_argument("cooperativity eta must be positive");
    double const s_eta5 = spec.spin() * std::pow(eta, 5);
    RegimeClassification out;
    out.s_eta5 = s_eta5;
    out.regime = s_eta5 >= threshold ? LimitingRegime::curvature : LimitingRegime::scattering;
    out.near_boundary = s_eta5 >= threshold / 3.0 && s_eta5 <= threshold * 3.0;
    out.sigma_curv_sq = curvature_optimum(spec).sigma_curv_sq;
    out.sigma_scatt_sq = scattering_optimum(spec, eta).sigma_sq;
    return out;
}

namespace
{
constexpr double kQMin = 1e-2;

double q_search_max(EnsembleSpec const& spec)
{
    // keep Q/S <= 1, well short of the one-axis-twisting revival at Q/S = pi
    return std::max(spec.spin(), 2.0 * kQMin);
}
}  // namespace

CurveOptimum full_curve_optimum(EnsembleSpec const& spec, double eta)
{
    auto f = [&](double q) { return modified_min_variance(spec, eta, q); };
    auto const m = minimize_log_grid(f, kQMin, q_search_max(spec));
    return {m.x, m.value};
}

CurveOptimum no_scattering_optimum(EnsembleSpec const& spec)
{
    auto f = [&](double q) { return no_scattering_min_variance(spec, q); };
    auto const m = minimize_log_grid(f, kQMin, q_search_max(spec));
    return {m.x, m.value};
}

SqueezeReport design_report(EnsembleSpec const& spec, CavityAtomParams const& params,
                            DesignTargets const& targets)
{
    if (targets.q && !(*targets.q > 0))
        throw std::invalid_argument("no shearing requested");

    SqueezeReport rep;
    double const s = spec.spin();
    rep.spin = s;
    rep.g = params.g();
    rep.kappa = params.kappa();
    rep.gamma = params.gamma();
    rep.delta = params.delta();
    rep.omega_shift = params.omega_shift();
    rep.eta = params.eta();

    auto const curv = curvature_optimum(spec);
    auto const scatt = scattering_optimum(spec, rep.eta);
    auto const full = full_curve_optimum(spec, rep.eta);
    rep.q_curv = curv.q_curv;
    rep.sigma_curv_sq = curv.sigma_curv_sq;
    rep.q_scatt = scatt.q_scatt;
    rep.r_opt = scatt.r_opt;
    rep.sigma_scatt_sq = scatt.sigma_sq;
    rep.q_full_opt = full.q;
    rep.sigma_full_min = full.sigma_min_sq;
    rep.classification = classify_regime(spec, rep.eta);

    rep.q_recommended = targets.q ? *targets.q : std::min(full.q, curv.q_curv);
    rep.sigma_at_recommended = modified_min_variance(spec, rep.eta, rep.q_recommended);
    rep.r_at_recommended = rep.q_recommended / (4.0 * s * rep.eta);
    double const phase = params.phase_per_photon();
    rep.p0_required = rep.q_recommended / (s * phase * phase);

    double const max_eps = targets.thresholds.max_excited_pop;
    rep.kappa_t_min = excited_pop_kappa_t(spec, params, rep.q_recommended) / max_eps;
    rep.t_min_s = rep.kappa_t_min / params.kappa();
    rep.t_used_s = targets.pulse_time ? *targets.pulse_time : rep.t_min_s;

    auto const drive = DrivePulse::from_shearing(spec, params, rep.q_recommended, rep.t_used_s);
    rep.validity = validate_regime(spec, params, drive, targets.thresholds);

    if (scatt.expansion_warning)
        rep.warnings.push_back("r_opt >= 0.3: small-r scattering expansion is unreliable");
    if (rep.r_at_recommended > 0.1)
        rep.warnings.push_back("r > 0.1: spin-vector shortening by Raman projection is neglected");
    if (rep.classification.near_boundary)
        rep.warnings.push_back("S eta^5 is near 1: limiting mechanism is borderline");
    for (auto const& flag : rep.validity.flags)
        if (!flag.pass)
            rep.warnings.push_back("regime check failed: " + flag.name);
    return rep;
}

std::vector<SweepRow> design_sweep(std::vector<double> const& spins,
                                   std::vector<double> const& etas, unsigned workers)
{
    std::vector<SweepRow> rows(spins.size() * etas.size());
    parallel_for(rows.size(), workers, [&](std::size_t i) {
        auto const spec = EnsembleSpec::from_spin(spins[i / etas.size()]);
        double const eta = etas[i % etas.size()];
        SweepRow row;
        row.spin = spec.spin();
        row.eta = eta;
        row.classification = classify_regime(spec, eta);
        row.curvature = curvature_optimum(spec);
        row.scattering = scattering_optimum(spec, eta);
        row.full = full_curve_optimum(spec, eta);
        bool const curvature_floor_higher
            = row.curvature.sigma_curv_sq >= row.scattering.sigma_sq;
        row.rule_agrees = curvature_floor_higher
                          == (row.classification.regime == LimitingRegime::curvature);
        rows[i] = row;
    });
    return rows;
}

}  // namespace cavsq
