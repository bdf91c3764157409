#include "cavsq/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavsq
{

EnsembleSpec EnsembleSpec::from_twice_spin(long two_s)
{
    if (two_s < 1)
        throw std::invalid_argument("total spin must be at least 1/2");
    return EnsembleSpec(two_s);
}

EnsembleSpec EnsembleSpec::from_spin(double s)
{
    double const twice = 2.0 * s;
    double const rounded = std::round(twice);
    if (!std::isfinite(s) || std::abs(twice - rounded) > 1e-9 || rounded < 1)
        throw std::invalid_argument("total spin must be a positive half-integer, got "
                                    + std::to_string(s));
    return EnsembleSpec(static_cast<long>(rounded));
}

CavityAtomParams::CavityAtomParams(double g, double kappa, double gamma, double delta)
    : g_(g), kappa_(kappa), gamma_(gamma), delta_(delta)
{
    if (!(g > 0) || !(kappa > 0) || !(gamma > 0))
        throw std::invalid_argument("g, kappa and gamma must be positive");
    if (!(delta != 0) || !std::isfinite(delta))
        throw std::invalid_argument("detuning must be finite and nonzero");
    omega_shift_ = 2.0 * g * g / std::abs(delta);
    eta_ = 4.0 * g * g / (kappa * gamma);
}

CavityAtomParams CavityAtomParams::from_hz(double g_hz, double kappa_hz,
                                           double gamma_hz, double delta_hz)
{
    return CavityAtomParams(kTwoPi * g_hz, kTwoPi * kappa_hz, kTwoPi * gamma_hz,
                            kTwoPi * delta_hz);
}

double shearing_strength(EnsembleSpec const& spec, CavityAtomParams const& params,
                         double p0)
{
    double const phase = params.phase_per_photon();
    return spec.spin() * p0 * phase * phase;
}

DrivePulse DrivePulse::from_photons(EnsembleSpec const& spec,
                                    CavityAtomParams const& params, double p0,
                                    double pulse_time)
{
    if (!(p0 >= 0) || !std::isfinite(p0))
        throw std::invalid_argument("photon number p0 must be finite and >= 0");
    if (!(pulse_time > 0) || !std::isfinite(pulse_time))
        throw std::invalid_argument("pulse time must be positive");
    double const rate = 2.0 * p0 / (params.kappa() * pulse_time);
    return DrivePulse(p0, pulse_time, rate, shearing_strength(spec, params, p0));
}

DrivePulse DrivePulse::from_shearing(EnsembleSpec const& spec,
                                     CavityAtomParams const& params, double q,
                                     double pulse_time)
{
    if (!(q >= 0) || !std::isfinite(q))
        throw std::invalid_argument("shearing strength must be finite and >= 0");
    double const phase = params.phase_per_photon();
    double const p0 = q / (spec.spin() * phase * phase);
    auto pulse = from_photons(spec, params, p0, pulse_time);
    pulse.shearing_ = q;
    return pulse;
}

DickeState::DickeState(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes))
{
    if (amps_.size() == 0)
        throw std::invalid_argument("empty Dicke state");
    if (std::abs(amps_.squaredNorm() - 1.0) > 1e-12)
        throw std::invalid_argument("Dicke state is not normalized");
}

namespace
{
// ln C(n, k)
double log_binomial(long n, long k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void check_cap(std::size_t dim, std::size_t cap, char const* what)
{
    if (dim > cap)
        throw std::length_error(std::string(what) + ": Dicke dimension "
                                + std::to_string(dim) + " exceeds cap "
                                + std::to_string(cap));
}
}  // namespace

std::vector<double> css_probabilities(EnsembleSpec const& spec)
{
    long const n = spec.two_s();
    std::vector<double> logp(spec.dicke_dim());
    for (long k = 0; k <= n; ++k)
        logp[k] = log_binomial(n, k);
    double const peak = *std::max_element(logp.begin(), logp.end());
    std::vector<double> p(logp.size());
    double total = 0;
    for (std::size_t k = 0; k < p.size(); ++k)
    {
        p[k] = std::exp(logp[k] - peak);
        total += p[k];
    }
    for (auto& v : p)
        v /= total;
    return p;
}

DickeState make_css(EnsembleSpec const& spec, CssAxis axis, std::size_t dim_cap)
{
    check_cap(spec.dicke_dim(), dim_cap, "make_css");
    auto const prob = css_probabilities(spec);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(prob.size()));
    for (std::size_t k = 0; k < prob.size(); ++k)
    {
        // sign (-1)^(S-m) = (-1)^k for the -x state
        double const sign = (axis == CssAxis::minus_x && (k % 2 == 1)) ? -1.0 : 1.0;
        amps[static_cast<Eigen::Index>(k)] = sign * std::sqrt(prob[k]);
    }
    amps /= amps.norm();
    return DickeState(std::move(amps));
}

double raising_element(double s, double m)
{
    return std::sqrt(std::max(0.0, (s - m) * (s + m + 1.0)));
}

SpinOperators build_operators(EnsembleSpec const& spec, std::size_t dim_cap)
{
    auto const dim = static_cast<Eigen::Index>(spec.dicke_dim());
    check_cap(spec.dicke_dim(), dim_cap, "build_operators");
    double const s = spec.spin();

    SpinOperators ops;
    ops.sz = Eigen::MatrixXcd::Zero(dim, dim);
    ops.sp = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k)
    {
        double const m = spec.m_at(static_cast<std::size_t>(k));
        ops.sz(k, k) = m;
        // |m> at index k is raised to |m+1> at index k-1
        if (k > 0)
            ops.sp(k - 1, k) = raising_element(s, m);
    }
    ops.sm = ops.sp.adjoint();
    ops.sx = 0.5 * (ops.sp + ops.sm);
    ops.sy = cplx(0, -0.5) * (ops.sp - ops.sm);
    return ops;
}

cplx expectation(DickeState const& state, Eigen::MatrixXcd const& op)
{
    auto const& v = state.amplitudes();
    return v.dot(op * v);
}

double cavity_field_photon_number(CavityAtomParams const& params,
                                  DrivePulse const& drive, double sz_value)
{
    double const kappa = params.kappa();
    // |gamma - i omega|^2 with the drive at omega_c + kappa/2
    double const detuning = params.omega_shift() * sz_value - 0.5 * kappa;
    double const denom = 0.25 * kappa * kappa + detuning * detuning;
    return drive.p0() * (0.5 * kappa * kappa) / denom;
}

double excited_pop_kappa_t(EnsembleSpec const& spec, CavityAtomParams const& params,
                           double q)
{
    double const ratio = params.kappa() / params.g();
    return ratio * ratio * q / (8.0 * spec.spin());
}

bool RegimeReport::all_pass() const
{
    return std::all_of(flags.begin(), flags.end(),
                       [](RegimeFlag const& f) { return f.pass; });
}

RegimeReport validate_regime(EnsembleSpec const& spec, CavityAtomParams const& params,
                             DrivePulse const& drive, RegimeThresholds const& thresholds)
{
    RegimeReport rep;
    double const s = spec.spin();
    double const kappa = params.kappa();
    double const g = params.g();

    rep.ratio_linearity = params.omega_shift() * std::sqrt(s / 2.0) / kappa;
    rep.intracavity_photons = drive.drive_rate();
    rep.excited_pop = rep.intracavity_photons * g * g / (params.delta() * params.delta());
    rep.kappa_t = kappa * drive.pulse_time();
    rep.detuning_margin = std::abs(params.delta())
                          / std::max({kappa, params.gamma(), g});

    double const target = excited_pop_kappa_t(spec, params, drive.shearing());
    double const measured = rep.excited_pop * rep.kappa_t;
    rep.identity_residual = target == 0 ? std::abs(measured)
                                        : std::abs(measured - target) / target;
    rep.kappa_t_required = target / thresholds.max_excited_pop;

    bool const driven = drive.p0() > 0;
    rep.flags = {
        {"linearity", rep.ratio_linearity, thresholds.max_linearity,
         rep.ratio_linearity <= thresholds.max_linearity},
        {"excited_pop", rep.excited_pop, thresholds.max_excited_pop,
         rep.excited_pop <= thresholds.max_excited_pop},
        {"kappa_t", rep.kappa_t, thresholds.min_kappa_t,
         !driven || rep.kappa_t >= thresholds.min_kappa_t},
        {"detuning_margin", rep.detuning_margin, thresholds.min_detuning_margin,
         rep.detuning_margin >= thresholds.min_detuning_margin},
    };
    return rep;
}

}  // namespace cavsq
