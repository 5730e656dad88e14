#pragma once

#include <string>

#include "json.hpp"
#include "plancal/config.hpp"

namespace plancal {

// JSON documents for the on-disk artifacts. Every report embeds the
// fully-populated config echo so artifacts are regenerable from the report
// alone; nothing time- or host-dependent goes into these files.
nlohmann::ordered_json report_to_json(const CalibrationReport& report,
                                      const nlohmann::ordered_json& config_echo);

nlohmann::ordered_json comparison_to_json(const CompareResult& result,
                                          const nlohmann::ordered_json& config_echo);

// Fixed-width text table for stdout, one row per method plus a shared
// "before" row.
std::string comparison_table_text(const CompareResult& result);

nlohmann::ordered_json truth_to_json(const SimData& data,
                                     const nlohmann::ordered_json& config_echo);

nlohmann::ordered_json param_delta_to_json(const ParamDelta& delta);
nlohmann::ordered_json dh_table_to_json(const DhTable& table);

}  // namespace plancal
