#include "cavsq/raman.hpp"

#include "cavsq/numerics.hpp"
#include "cavsq/parallel.hpp"
#include "cavsq/rng.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cavsq
{

RamanProcess RamanProcess::make(EnsembleSpec const& spec, double r, double pulse_time)
{
    if (!(r >= 0) || !std::isfinite(r))
        throw std::invalid_argument("Raman photon number r must be finite and >= 0");
    if (!(pulse_time > 0))
        throw std::invalid_argument("pulse time must be positive");
    return {r, r / pulse_time, spec.atom_count(), pulse_time};
}

CorrelationIntegrals correlation_integrals(double r)
{
    if (!(r >= 0))
        throw std::invalid_argument("correlation_integrals needs r >= 0");
    double const x = 2.0 * r;
    if (x == 0)
        return {1.0, 1.0};
    double c_sq;
    if (x < 0.1)
    {
        // 2 sum_{j>=0} (-x)^j / (j+2)!
        double term = 0.5;
        double sum = 0;
        for (int j = 0; j < 25; ++j)
        {
            sum += term;
            term *= -x / (j + 3);
        }
        c_sq = 2.0 * sum;
    }
    else
    {
        c_sq = 2.0 * (x + std::expm1(-x)) / (x * x);
    }
    double const c_final = -std::expm1(-x) / x;
    return {c_sq, c_final};
}

MomentSet modified_moments(EnsembleSpec const& spec, double q,
                           CorrelationIntegrals const& corr)
{
    if (!std::isfinite(q) || q < 0)
        throw std::invalid_argument("shearing strength must be finite and >= 0");
    double const s = spec.spin();
    double const q_eff = q * std::sqrt(corr.c_bar_sq);
    MomentSet out;
    out.spin = s;
    out.shearing = q;

    double const g_half = g_factor(spec, 0.5 * q_eff);
    out.mean_sp = s * std::polar(1.0, q / (2.0 * s)) * g_half;
    double const one_minus = detail::one_minus_damped_g(spec, q / s, q_eff);
    out.var_y = 0.5 * s * s * one_minus + 0.25 * s * (2.0 - one_minus);
    out.var_z = 0.5 * s;
    out.cov_w = (2.0 * s * s - s) * corr.c_bar_final * std::sin(q / (2.0 * s)) * g_half;
    return out;
}

double modified_min_variance(EnsembleSpec const& spec, double eta, double q)
{
    if (!(eta > 0))
        throw std::invalid_argument("cooperativity eta must be positive");
    if (!(q > 0))
        throw std::invalid_argument("modified_min_variance needs Q > 0");
    double const r = q / (4.0 * spec.spin() * eta);
    auto const corr = correlation_integrals(r);
    return extremal_variances(modified_moments(spec, q, corr)).sigma_min_sq;
}

double scattering_two_term(EnsembleSpec const& spec, double eta, double q)
{
    return 1.0 / q + q / (3.0 * spec.spin() * eta);
}

double no_scattering_min_variance(EnsembleSpec const& spec, double q)
{
    return extremal_variances(analytic_moments(spec, q)).sigma_min_sq;
}

char const* to_string(McMode mode)
{
    switch (mode)
    {
        case McMode::automatic: return "auto";
        case McMode::exact: return "exact";
        case McMode::gaussian: return "gaussian";
    }
    return "?";
}

McMode mc_mode_from_string(std::string const& name)
{
    if (name == "auto")
        return McMode::automatic;
    if (name == "exact")
        return McMode::exact;
    if (name == "gaussian")
        return McMode::gaussian;
    throw std::invalid_argument("unknown Monte Carlo mode '" + name + "'");
}

namespace
{
constexpr long kExactAtomLimit = 10'000;
constexpr std::size_t kBlockSize = 256;

// Per trajectory: S_z on the time grid and the pulse average.
struct Trajectory
{
    std::vector<double> sz;
    double sz_bar = 0;
};

long binomial_half(Philox4x32& rng, long n)
{
    long count = 0;
    long remaining = n;
    while (remaining > 0)
    {
        std::uint64_t word = rng();
        if (remaining < 64)
            word &= (std::uint64_t{1} << remaining) - 1;
        count += std::popcount(word);
        remaining -= 64;
    }
    return count;
}

void run_exact(RamanProcess const& proc, double s, int steps, Philox4x32& rng,
               Trajectory& out)
{
    long const n = proc.n_atoms;
    long n_up = binomial_half(rng, n);
    double const t_end = proc.pulse_time;
    double const dt = t_end / steps;
    double const total_rate = proc.flip_rate * static_cast<double>(n);

    double now = 0;
    double integral = 0;
    int next_grid = 0;
    while (true)
    {
        double const sz = static_cast<double>(n_up) - s;
        double const next_event = total_rate > 0 ? now + rng.exponential(total_rate)
                                                 : INFINITY;
        double const stop = std::min(next_event, t_end);
        while (next_grid <= steps && next_grid * dt <= stop)
        {
            // grid point at exactly an event time records the pre-jump value;
            // this has probability zero
            out.sz[next_grid] = sz;
            ++next_grid;
        }
        integral += sz * (stop - now);
        if (next_event >= t_end)
            break;
        now = next_event;
        // a uniformly chosen atom flips
        if (rng.uniform() * static_cast<double>(n) < static_cast<double>(n_up))
            --n_up;
        else
            ++n_up;
    }
    while (next_grid <= steps)
        out.sz[next_grid++] = static_cast<double>(n_up) - s;
    out.sz_bar = integral / t_end;
}

// Exact transition of an Ornstein-Uhlenbeck process and its time integral.
void run_gaussian(RamanProcess const& proc, double s, int steps, Philox4x32& rng,
                  Trajectory& out)
{
    double const var0 = 0.5 * s;
    double x = std::sqrt(var0) * rng.normal();
    double const t_end = proc.pulse_time;
    double const dt = t_end / steps;
    double const theta = 2.0 * proc.flip_rate;
    out.sz[0] = x;
    if (theta == 0)
    {
        for (int j = 1; j <= steps; ++j)
            out.sz[j] = x;
        out.sz_bar = x;
        return;
    }
    double const a = theta * dt;
    double const decay = std::exp(-a);
    double const var_x = var0 * -std::expm1(-2.0 * a);
    // Var(I) = (sigma^2/theta^3) f(a), sigma^2 = theta * S
    double const f = a < 1e-3 ? a * a * a / 3.0 - a * a * a * a / 4.0 + 7.0 * std::pow(a, 5) / 60.0
                              : a + 2.0 * std::expm1(-a) - 0.5 * std::expm1(-2.0 * a);
    double const sigma_sq = theta * s;
    double const var_i = sigma_sq / (theta * theta * theta) * f;
    double const em1 = -std::expm1(-a);
    double const cov_xi = sigma_sq / (2.0 * theta * theta) * em1 * em1;
    double const sd_x = std::sqrt(var_x);
    double const cond_sd_i = std::sqrt(std::max(0.0, var_i - cov_xi * cov_xi / var_x));
    double const mean_i_coeff = em1 / theta;

    double integral = 0;
    for (int j = 1; j <= steps; ++j)
    {
        double const z1 = rng.normal();
        double const z2 = rng.normal();
        double const x_next = decay * x + sd_x * z1;
        integral += mean_i_coeff * x + (cov_xi / sd_x) * z1 + cond_sd_i * z2;
        x = x_next;
        out.sz[j] = x;
    }
    out.sz_bar = integral / t_end;
}

struct MomentAccumulator
{
    KahanSum sum;
    KahanSum sum_sq;
    void add(double v)
    {
        sum.add(v);
        sum_sq.add(v * v);
    }
};

struct BlockSums
{
    std::vector<double> sum;
    std::vector<double> sum_sq;
};

std::pair<double, double> mean_and_se(double sum, double sum_sq, std::size_t n)
{
    double const nn = static_cast<double>(n);
    double const mean = sum / nn;
    if (n < 2)
        return {mean, 0.0};
    double const var = std::max(0.0, (sum_sq - sum * mean) / (nn - 1.0));
    return {mean, std::sqrt(var / nn)};
}
}  // namespace

TrajectoryStats sample_trajectories(RamanProcess const& process, EnsembleSpec const& spec,
                                    McOptions const& options)
{
    if (options.n_traj < 1)
        throw std::invalid_argument("need at least one trajectory");
    if (options.time_steps < 1)
        throw std::invalid_argument("time step count must be >= 1");
    if (process.n_atoms != spec.atom_count())
        throw std::invalid_argument("process atom count does not match ensemble");

    McMode mode = options.mode;
    if (mode == McMode::automatic)
        mode = spec.atom_count() <= kExactAtomLimit ? McMode::exact : McMode::gaussian;

    int const steps = options.time_steps;
    double const s = spec.spin();
    // statistics: lags 0..steps, then sbar^2, then sbar * sz(t)
    std::size_t const n_stats = static_cast<std::size_t>(steps) + 3;
    std::size_t const n_blocks = (options.n_traj + kBlockSize - 1) / kBlockSize;
    std::vector<BlockSums> blocks(n_blocks);

    parallel_for(n_blocks, options.workers, [&](std::size_t b) {
        std::vector<MomentAccumulator> acc(n_stats);
        Trajectory traj;
        traj.sz.assign(static_cast<std::size_t>(steps) + 1, 0.0);
        std::size_t const first = b * kBlockSize;
        std::size_t const last = std::min(options.n_traj, first + kBlockSize);
        for (std::size_t i = first; i < last; ++i)
        {
            Philox4x32 rng(options.seed, i);
            if (mode == McMode::exact)
                run_exact(process, s, steps, rng, traj);
            else
                run_gaussian(process, s, steps, rng, traj);
            for (int j = 0; j <= steps; ++j)
                acc[j].add(traj.sz[0] * traj.sz[j]);
            acc[steps + 1].add(traj.sz_bar * traj.sz_bar);
            acc[steps + 2].add(traj.sz_bar * traj.sz[steps]);
        }
        auto& out = blocks[b];
        out.sum.resize(n_stats);
        out.sum_sq.resize(n_stats);
        for (std::size_t k = 0; k < n_stats; ++k)
        {
            out.sum[k] = acc[k].sum.value();
            out.sum_sq[k] = acc[k].sum_sq.value();
        }
    });

    std::vector<MomentAccumulator> total(n_stats);
    for (auto const& blk : blocks)
    {
        for (std::size_t k = 0; k < n_stats; ++k)
        {
            total[k].sum.add(blk.sum[k]);
            total[k].sum_sq.add(blk.sum_sq[k]);
        }
    }

    double const norm = 2.0 / s;
    TrajectoryStats stats;
    stats.mode_used = mode;
    stats.n_trajectories = options.n_traj;
    for (int j = 0; j <= steps; ++j)
    {
        auto [mean, se] = mean_and_se(total[j].sum.value(), total[j].sum_sq.value(),
                                      options.n_traj);
        stats.lags.push_back({static_cast<double>(j) / steps, norm * mean, norm * se});
    }
    auto [bar_sq, bar_sq_se] = mean_and_se(total[steps + 1].sum.value(),
                                           total[steps + 1].sum_sq.value(), options.n_traj);
    auto [bar_fin, bar_fin_se] = mean_and_se(total[steps + 2].sum.value(),
                                             total[steps + 2].sum_sq.value(), options.n_traj);
    stats.mean_sz_bar_sq = bar_sq;
    stats.mean_sz_bar_sq_se = bar_sq_se;
    stats.cov_bar_final = bar_fin;
    stats.cov_bar_final_se = bar_fin_se;
    stats.c_bar_sq = norm * bar_sq;
    stats.c_bar_sq_se = norm * bar_sq_se;
    stats.c_bar_final = norm * bar_fin;
    stats.c_bar_final_se = norm * bar_fin_se;
    return stats;
}

std::vector<Fig2Point> fig2_curve(EnsembleSpec const& spec, double eta,
                                  std::vector<double> const& q_grid)
{
    std::vector<Fig2Point> out;
    out.reserve(q_grid.size());
    for (double q : q_grid)
    {
        if (!(q > 0))
            throw std::invalid_argument("fig2 grid must contain positive Q only");
        out.push_back({eta, q, modified_min_variance(spec, eta, q),
                       no_scattering_min_variance(spec, q), 1.0 / q});
    }
    return out;
}

}  // namespace cavsq
