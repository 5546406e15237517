#include "qplan/hardware_catalog.hpp"

namespace qplan {

namespace {

struct Row {
  Level level;
  double accuracy;
  double energy;
  double latency;
};

HwPerfRecord make_tier(std::string processor_class, int ram_mb, PowerState power,
                       std::initializer_list<Row> rows) {
  HwPerfRecord r;
  r.hardware.processor_class = std::move(processor_class);
  r.hardware.ram_mb = ram_mb;
  r.hardware.power_state = power;
  for (const Row& row : rows) {
    r.hardware.available_levels.push_back(row.level);
    r.table[row.level] = PerformanceEstimate{row.accuracy, row.energy, row.latency};
  }
  validate(r);
  return r;
}

}  // namespace

std::vector<HwPerfRecord> default_hardware_catalog() {
  using L = Level;
  std::vector<HwPerfRecord> tiers;
  tiers.push_back(make_tier("mcu-speaker", 1024, PowerState::kMains,
                            {{L::kInt4, 0.62, 0.55, 0.60}, {L::kInt8, 0.85, 1.00, 1.00}}));
  tiers.push_back(make_tier("phone-mid", 2048, PowerState::kBatteryHigh,
                            {{L::kInt4, 0.62, 0.30, 0.40}, {L::kInt8, 0.85, 0.55, 0.65}, {L::kFp16, 0.93, 1.00, 1.00}}));
  tiers.push_back(make_tier("tablet-high", 4096, PowerState::kBatteryHigh,
                            {{L::kInt4, 0.62, 0.20, 0.30},
                             {L::kInt8, 0.85, 0.35, 0.45},
                             {L::kFp16, 0.93, 0.60, 0.70},
                             {L::kFp32, 0.95, 1.00, 1.00}}));
  tiers.push_back(make_tier("hub-desktop", 8192, PowerState::kMains,
                            {{L::kInt4, 0.62, 0.15, 0.25},
                             {L::kInt8, 0.85, 0.30, 0.40},
                             {L::kFp16, 0.93, 0.55, 0.65},
                             {L::kFp32, 0.95, 1.00, 1.00}}));
  for (std::size_t i = 0; i < tiers.size(); ++i) tiers[i].id = i + 1;
  return tiers;
}

json catalog_to_json(const std::vector<HwPerfRecord>& records, std::string_view version) {
  return json{{"version", version}, {"tiers", records}};
}

std::vector<HwPerfRecord> catalog_from_json(const json& j) {
  return get_field<std::vector<HwPerfRecord>>(j, "tiers");
}

}  // namespace qplan
