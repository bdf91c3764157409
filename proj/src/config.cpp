#include "cavsq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavsq
{

namespace
{
std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view value)
{
    double out = 0;
    auto const* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("config: value for '" + std::string(key)
                                    + "' is not a number: '" + std::string(value) + "'");
    return out;
}
}  // namespace

double PhysicalConfig::resolved_delta_hz() const
{
    if (delta_hz)
        return *delta_hz;
    return *delta_over_gamma * gamma_hz;
}

EnsembleSpec PhysicalConfig::ensemble() const
{
    return EnsembleSpec::from_spin(spin);
}

CavityAtomParams PhysicalConfig::params() const
{
    return CavityAtomParams::from_hz(g_hz, kappa_hz, gamma_hz, resolved_delta_hz());
}

PhysicalConfig parse_config(std::string_view text)
{
    PhysicalConfig cfg;
    bool have_s = false, have_g = false, have_kappa = false;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line))
    {
        ++line_no;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty())
            continue;
        auto const sep = view.find_first_of("=:");
        if (sep == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no)
                                        + ": expected 'key = value'");
        auto const key = trim(view.substr(0, sep));
        auto const value = trim(view.substr(sep + 1));
        if (cfg.raw.count(std::string(key)))
            throw std::invalid_argument("config: duplicate key '" + std::string(key) + "'");
        cfg.raw[std::string(key)] = std::string(value);
        double const v = parse_number(key, value);

        if (key == "S")
            cfg.spin = v, have_s = true;
        else if (key == "g_hz")
            cfg.g_hz = v, have_g = true;
        else if (key == "kappa_hz")
            cfg.kappa_hz = v, have_kappa = true;
        else if (key == "gamma_hz")
            cfg.gamma_hz = v, cfg.gamma_defaulted = false;
        else if (key == "delta_over_gamma")
            cfg.delta_over_gamma = v;
        else if (key == "delta_hz")
            cfg.delta_hz = v;
        else if (key == "p0")
            cfg.p0 = v;
        else if (key == "t_s")
            cfg.t_s = v;
        else
            throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
    }
    if (!have_s || !have_g || !have_kappa)
        throw std::invalid_argument("config: S, g_hz and kappa_hz are required");
    if (cfg.delta_hz.has_value() == cfg.delta_over_gamma.has_value())
        throw std::invalid_argument("config: give exactly one of delta_hz, delta_over_gamma");
    // validate eagerly so errors point at the config
    (void)cfg.ensemble();
    (void)cfg.params();
    return cfg;
}

PhysicalConfig load_config(std::string const& path)
{
    std::ifstream file(path);
    if (!file)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_config(buf.str());
}

}  // namespace cavsq
