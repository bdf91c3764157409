#pragma once

#include "cavsq/spin_core.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cavsq
{

/*!
 * Physical parameters read from a key-value file.
 *
 *   # comment
 *   S = 10000
 *   g_hz = 0.4e6
 *   kappa_hz = 1e6
 *   gamma_hz = 6.07e6        # optional, Rb D2 by default
 *   delta_over_gamma = 500   # or delta_hz, exactly one of the two
 *   p0 = 1e5                 # optional
 *   t_s = 1e-4               # optional
 *
 * Frequencies are in Hz (cycles per second); 2*pi is applied on conversion.
 */
struct PhysicalConfig
{
    double spin = 0;
    double g_hz = 0;
    double kappa_hz = 0;
    double gamma_hz = kDefaultGamma / kTwoPi;
    bool gamma_defaulted = true;
    std::optional<double> delta_over_gamma;
    std::optional<double> delta_hz;
    std::optional<double> p0;
    std::optional<double> t_s;
    /// Keys exactly as read, for the run manifest.
    std::map<std::string, std::string> raw;

    double resolved_delta_hz() const;
    EnsembleSpec ensemble() const;
    CavityAtomParams params() const;
};

/// Throws std::invalid_argument with the offending line on malformed input.
PhysicalConfig parse_config(std::string_view text);
PhysicalConfig load_config(std::string const& path);

}  // namespace cavsq
