#pragma once

// Synthetic per-tier performance tables used to seed the hardware store and
// the simulator. Values are monotone in bit width by construction; they are
// not measurements.

#include <string_view>
#include <vector>

#include "qplan/knowledge_store.hpp"

namespace qplan {

inline constexpr std::string_view kCatalogVersion = "synthetic-v1";

std::vector<HwPerfRecord> default_hardware_catalog();

json catalog_to_json(const std::vector<HwPerfRecord>& records, std::string_view version = kCatalogVersion);
std::vector<HwPerfRecord> catalog_from_json(const json& j);

}  // namespace qplan
