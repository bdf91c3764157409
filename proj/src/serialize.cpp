#include "cavsq/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace cavsq
{

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw std::runtime_error("format_double failed");
    return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> const& header)
    : os_(os), columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i)
        os_ << (i ? "," : "") << header[i];
    os_ << '\n';
}

CsvWriter& CsvWriter::cell(double v)
{
    return cell(format_double(v));
}

CsvWriter& CsvWriter::cell(bool v)
{
    return cell(std::string(v ? "true" : "false"));
}

CsvWriter& CsvWriter::cell(std::string const& v)
{
    if (filled_ == columns_)
        throw std::logic_error("CSV row has too many cells");
    os_ << (filled_ ? "," : "") << v;
    ++filled_;
    return *this;
}

void CsvWriter::end_row()
{
    if (filled_ != columns_)
        throw std::logic_error("CSV row has too few cells");
    os_ << '\n';
    filled_ = 0;
}

nlohmann::json to_json(RegimeReport const& rep)
{
    nlohmann::json flags = nlohmann::json::array();
    for (auto const& f : rep.flags)
        flags.push_back({{"name", f.name},
                         {"value", f.value},
                         {"threshold", f.threshold},
                         {"pass", f.pass}});
    return {{"ratio_linearity", rep.ratio_linearity},
            {"excited_pop", rep.excited_pop},
            {"kappa_t", rep.kappa_t},
            {"kappa_t_required", rep.kappa_t_required},
            {"detuning_margin", rep.detuning_margin},
            {"intracavity_photons", rep.intracavity_photons},
            {"identity_residual", rep.identity_residual},
            {"all_pass", rep.all_pass()},
            {"flags", flags}};
}

nlohmann::json to_json(SqueezeReport const& rep)
{
    auto const& cls = rep.classification;
    return {{"schema_version", kSchemaVersion},
            {"parameters",
             {{"S", rep.spin},
              {"g", rep.g},
              {"kappa", rep.kappa},
              {"gamma", rep.gamma},
              {"delta", rep.delta},
              {"omega_shift", rep.omega_shift},
              {"eta", rep.eta},
              {"units", "rad/s"}}},
            {"curvature", {{"q_curv", rep.q_curv}, {"sigma_curv_sq", rep.sigma_curv_sq}}},
            {"scattering",
             {{"q_scatt", rep.q_scatt},
              {"r_opt", rep.r_opt},
              {"sigma_scatt_sq", rep.sigma_scatt_sq}}},
            {"full_curve",
             {{"q_opt", rep.q_full_opt}, {"sigma_min_sq", rep.sigma_full_min}}},
            {"limiting_regime", to_string(cls.regime)},
            {"s_eta5", cls.s_eta5},
            {"near_boundary", cls.near_boundary},
            {"q_recommended", rep.q_recommended},
            {"sigma_at_recommended", rep.sigma_at_recommended},
            {"r_at_recommended", rep.r_at_recommended},
            {"p0_required", rep.p0_required},
            {"t_constraints",
             {{"kappa_t_min", rep.kappa_t_min},
              {"t_min_s", rep.t_min_s},
              {"t_used_s", rep.t_used_s}}},
            {"validity", to_json(rep.validity)},
            {"warnings", rep.warnings}};
}

nlohmann::json to_json(TrajectoryStats const& stats)
{
    nlohmann::json lags = nlohmann::json::array();
    for (auto const& l : stats.lags)
        lags.push_back({{"lag_fraction", l.lag_fraction},
                        {"value", l.value},
                        {"std_error", l.std_error}});
    return {{"schema_version", kSchemaVersion},
            {"mode", to_string(stats.mode_used)},
            {"n_trajectories", stats.n_trajectories},
            {"mean_sz_bar_sq", stats.mean_sz_bar_sq},
            {"mean_sz_bar_sq_se", stats.mean_sz_bar_sq_se},
            {"cov_bar_final", stats.cov_bar_final},
            {"cov_bar_final_se", stats.cov_bar_final_se},
            {"c_bar_sq", stats.c_bar_sq},
            {"c_bar_sq_se", stats.c_bar_sq_se},
            {"c_bar_final", stats.c_bar_final},
            {"c_bar_final_se", stats.c_bar_final_se},
            {"lags", lags}};
}

nlohmann::json to_json(PhysicalConfig const& cfg)
{
    nlohmann::json j = nlohmann::json::object();
    for (auto const& [k, v] : cfg.raw)
        j[k] = v;
    j["gamma_hz_used"] = cfg.gamma_hz;
    j["gamma_defaulted"] = cfg.gamma_defaulted;
    return j;
}

}  // namespace cavsq
