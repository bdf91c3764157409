#pragma once

#include "cavsq/config.hpp"
#include "cavsq/design.hpp"
#include "cavsq/raman.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace cavsq
{

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Comma-separated writer with a fixed header.
class CsvWriter
{
  public:
    CsvWriter(std::ostream& os, std::vector<std::string> const& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::string const& v);
    CsvWriter& cell(bool v);
    void end_row();

  private:
    std::ostream& os_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

nlohmann::json to_json(RegimeReport const& rep);
nlohmann::json to_json(SqueezeReport const& rep);
nlohmann::json to_json(TrajectoryStats const& stats);
nlohmann::json to_json(PhysicalConfig const& cfg);

}  // namespace cavsq
