#pragma once

// The two backend knowledge bases:
//   CaseStore   - context / quantization / feedback history, searched by
//                 cosine similarity over an encoded context vector.
//   HwPerfStore - per-hardware-tier accuracy / energy / latency tables.
// Both persist as append-only newline-delimited JSON with the full record set
// kept in memory.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "qplan/domain.hpp"

namespace qplan {

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kFeatureLength = 13;
using FeatureVector = std::array<double, kFeatureLength>;

// one-hot(location, 5) ++ one-hot(time, 3) ++ frequency ordinal / 2 ++ task mix (4)
FeatureVector encode_context(const ContextualFactors& context);

// Cosine of the angle between two vectors; 0 when either has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct CaseRecord {
  std::uint64_t id = 0;
  ContextualFactors context;
  Level level = Level::kInt8;
  FeedbackRecord feedback;
  SensitivityWeights inferred_weights;
  FeatureVector feature{};

  bool operator==(const CaseRecord&) const = default;
};

struct HwPerfRecord {
  std::uint64_t id = 0;
  HardwareSpec hardware;
  PerfTable table;

  bool operator==(const HwPerfRecord&) const = default;
};

void to_json(json& j, const CaseRecord& r);
void from_json(const json& j, CaseRecord& r);
void to_json(json& j, const HwPerfRecord& r);
void from_json(const json& j, HwPerfRecord& r);

void validate(const HwPerfRecord& r);

struct RetrievedCase {
  CaseRecord record;
  double similarity = 0.0;
};

namespace detail {

// Append-only NDJSON file. A torn trailing line (no terminating newline) left
// behind by an interrupted write is dropped on open.
class NdjsonLog {
 public:
  explicit NdjsonLog(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  std::vector<std::string> read_lines() const;
  void append(const std::string& line);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace detail

class CaseStore {
 public:
  // In-memory only.
  CaseStore() = default;
  // Loads `file` if it exists and appends new records to it.
  explicit CaseStore(const std::filesystem::path& file);

  CaseStore(const CaseStore&) = delete;
  CaseStore& operator=(const CaseStore&) = delete;

  // Assigns the next id and recomputes the feature vector. The record is
  // visible to readers only once it is durably written.
  std::uint64_t insert(CaseRecord record);

  // Top-k by cosine similarity, descending; equal similarities keep insertion
  // order.
  std::vector<RetrievedCase> retrieve_similar(const ContextualFactors& query, int k) const;

  std::size_t size() const;
  std::vector<CaseRecord> records() const;

 private:
  mutable std::shared_mutex mutex_;
  std::optional<detail::NdjsonLog> log_;
  std::vector<CaseRecord> records_;
  std::uint64_t next_id_ = 1;
};

class HwPerfStore {
 public:
  HwPerfStore() = default;
  explicit HwPerfStore(const std::filesystem::path& file);

  HwPerfStore(const HwPerfStore&) = delete;
  HwPerfStore& operator=(const HwPerfStore&) = delete;

  std::uint64_t insert(HwPerfRecord record);

  // Exact processor_class match (latest record wins), otherwise the tier
  // nearest in RAM with ties going to the smaller tier. The table is
  // restricted to the levels the queried hardware supports.
  PerfTable lookup_performance(const HardwareSpec& hw) const;

  std::size_t size() const;
  std::vector<HwPerfRecord> records() const;

 private:
  mutable std::shared_mutex mutex_;
  std::optional<detail::NdjsonLog> log_;
  std::vector<HwPerfRecord> records_;
  std::uint64_t next_id_ = 1;
};

// Similarity-weighted mean of the cases' weights. nullopt means there is no
// usable prior (empty list or no positive similarity).
std::optional<SensitivityWeights> estimate_weights_from_cases(std::span<const RetrievedCase> cases);

inline constexpr const char* kCaseFileName = "cases.ndjson";
inline constexpr const char* kHwPerfFileName = "hwperf.ndjson";

// Both stores rooted at one data directory.
struct KnowledgeBase {
  explicit KnowledgeBase(const std::filesystem::path& data_dir);
  KnowledgeBase();  // in-memory

  CaseStore cases;
  HwPerfStore hwperf;
};

}  // namespace qplan
