#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "causalcal/calibrators.hpp"
#include "causalcal/metrics.hpp"
#include "causalcal/oracle.hpp"

namespace causalcal {

/// {"class", "params", "meta": {"merged_buckets", "flags", ...extra}}
nlohmann::ordered_json model_to_json(const CalibratorModel& model);
CalibratorModel model_from_json(const nlohmann::json& j);

nlohmann::ordered_json report_to_json(const BinnedCalReport& report);

/// Doubles printed with 17 significant digits for round-tripping.
std::string dump_json(const nlohmann::ordered_json& j);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);
std::uint64_t file_digest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace causalcal
