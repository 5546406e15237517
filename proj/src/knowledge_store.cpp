#include "qplan/knowledge_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qplan {

FeatureVector encode_context(const ContextualFactors& context) {
  FeatureVector v{};
  v[index_of(context.device_location)] = 1.0;
  v[5 + index_of(context.interaction_time)] = 1.0;
  v[8] = static_cast<double>(index_of(context.interaction_frequency)) / 2.0;
  for (auto c : kAllTasks) v[9 + index_of(c)] = context.task_type_mix[c];
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(na * nb) keeps the self-similarity of any vector at exactly 1.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

void to_json(json& j, const CaseRecord& r) {
  j = json{{"id", r.id},
           {"context", r.context},
           {"level", r.level},
           {"feedback", r.feedback},
           {"inferred_weights", r.inferred_weights},
           {"feature", r.feature}};
}

void from_json(const json& j, CaseRecord& r) {
  r.id = get_field<std::uint64_t>(j, "id");
  r.context = get_field<ContextualFactors>(j, "context");
  r.level = get_field<Level>(j, "level");
  r.feedback = get_field<FeedbackRecord>(j, "feedback");
  r.inferred_weights = get_field<SensitivityWeights>(j, "inferred_weights");
  const auto feature = get_field<std::vector<double>>(j, "feature");
  if (feature.size() != kFeatureLength) throw ValidationError("feature", "must have 13 entries");
  std::copy(feature.begin(), feature.end(), r.feature.begin());
}

void to_json(json& j, const HwPerfRecord& r) {
  j = json{{"id", r.id}, {"hardware", r.hardware}, {"table", perf_table_to_json(r.table)}};
}

void from_json(const json& j, HwPerfRecord& r) {
  r.id = get_field<std::uint64_t>(j, "id");
  r.hardware = get_field<HardwareSpec>(j, "hardware");
  r.table = perf_table_from_json(get_field<json>(j, "table"));
  validate(r);
}

void validate(const HwPerfRecord& r) {
  validate(r.hardware);
  validate(r.table);
  if (r.table.size() != r.hardware.available_levels.size()) {
    throw ValidationError("table", "must cover exactly the hardware's available levels");
  }
  for (Level level : r.hardware.available_levels) {
    if (!r.table.count(level)) throw ValidationError("table", "missing level " + std::string(label(level)));
  }
}

// ---------------------------------------------------------------------------

namespace detail {

NdjsonLog::NdjsonLog(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  if (std::filesystem::exists(path_)) {
    // Drop a torn tail so later appends start on a fresh line.
    std::ifstream in(path_, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!content.empty() && content.back() != '\n') {
      const auto last_newline = content.find_last_of('\n');
      const std::uintmax_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
      std::filesystem::resize_file(path_, keep, ec);
      if (ec) throw StorageError("cannot truncate torn record in " + path_.string() + ": " + ec.message());
    }
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw StorageError("cannot open " + path_.string() + " for appending");
}

std::vector<std::string> NdjsonLog::read_lines() const {
  std::vector<std::string> lines;
  std::ifstream in(path_, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void NdjsonLog::append(const std::string& line) {
  const std::string framed = line + '\n';
  out_.write(framed.data(), static_cast<std::streamsize>(framed.size()));
  out_.flush();
  if (!out_) {
    out_.clear();
    throw StorageError("write to " + path_.string() + " failed");
  }
}

}  // namespace detail

namespace {

template <class Record>
std::vector<Record> load_records(const detail::NdjsonLog& log) {
  std::vector<Record> out;
  std::size_t line_no = 0;
  for (const auto& line : log.read_lines()) {
    ++line_no;
    try {
      out.push_back(json::parse(line).get<Record>());
    } catch (const std::exception& e) {
      throw StorageError(log.path().string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <class Record>
std::uint64_t next_id_after(const std::vector<Record>& records) {
  std::uint64_t max_id = 0;
  for (const auto& r : records) max_id = std::max(max_id, r.id);
  return max_id + 1;
}

}  // namespace

CaseStore::CaseStore(const std::filesystem::path& file) : log_(std::in_place, file) {
  records_ = load_records<CaseRecord>(*log_);
  for (const auto& r : records_) {
    if (r.feature != encode_context(r.context)) {
      throw StorageError(file.string() + ": case " + std::to_string(r.id) + " feature does not match its context");
    }
  }
  next_id_ = next_id_after(records_);
}

std::uint64_t CaseStore::insert(CaseRecord record) {
  validate(record.context);
  validate(record.feedback);
  record.feature = encode_context(record.context);
  std::unique_lock lock(mutex_);
  record.id = next_id_;
  if (log_) log_->append(json(record).dump());
  records_.push_back(std::move(record));
  return next_id_++;
}

std::vector<RetrievedCase> CaseStore::retrieve_similar(const ContextualFactors& query, int k) const {
  if (k < 1) throw ValidationError("k", "must be >= 1");
  const FeatureVector q = encode_context(query);
  std::shared_lock lock(mutex_);
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    ranked.emplace_back(cosine_similarity(q, records_[i].feature), i);
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<RetrievedCase> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({records_[ranked[i].second], ranked[i].first});
  return out;
}

std::size_t CaseStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<CaseRecord> CaseStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

// ---------------------------------------------------------------------------

HwPerfStore::HwPerfStore(const std::filesystem::path& file) : log_(std::in_place, file) {
  records_ = load_records<HwPerfRecord>(*log_);
  next_id_ = next_id_after(records_);
}

std::uint64_t HwPerfStore::insert(HwPerfRecord record) {
  validate(record);
  std::unique_lock lock(mutex_);
  record.id = next_id_;
  if (log_) log_->append(json(record).dump());
  records_.push_back(std::move(record));
  return next_id_++;
}

PerfTable HwPerfStore::lookup_performance(const HardwareSpec& hw) const {
  validate(hw);
  std::shared_lock lock(mutex_);
  if (records_.empty()) throw NotFoundError("hardware performance store is empty");

  auto covers_any = [&](const HwPerfRecord& r) {
    return std::any_of(hw.available_levels.begin(), hw.available_levels.end(),
                       [&](Level l) { return r.table.count(l) != 0; });
  };

  const HwPerfRecord* match = nullptr;
  for (const auto& r : records_) {
    if (r.hardware.processor_class == hw.processor_class && covers_any(r)) match = &r;
  }
  if (match == nullptr) {
    long best_distance = std::numeric_limits<long>::max();
    for (const auto& r : records_) {
      if (!covers_any(r)) continue;
      const long distance = std::labs(static_cast<long>(r.hardware.ram_mb) - hw.ram_mb);
      if (distance < best_distance ||
          (distance == best_distance && r.hardware.ram_mb < match->hardware.ram_mb)) {
        best_distance = distance;
        match = &r;
      }
    }
  }
  if (match == nullptr) {
    throw NotFoundError("no hardware record covers any level of '" + hw.processor_class + "'");
  }
  PerfTable out;
  for (Level level : hw.available_levels) {
    if (auto it = match->table.find(level); it != match->table.end()) out.emplace(level, it->second);
  }
  return out;
}

std::size_t HwPerfStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<HwPerfRecord> HwPerfStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

// ---------------------------------------------------------------------------

std::optional<SensitivityWeights> estimate_weights_from_cases(std::span<const RetrievedCase> cases) {
  FactorValues acc{};
  double total = 0.0;
  for (const auto& c : cases) {
    if (!(c.similarity >= 0.0)) throw ValidationError("similarity", "must be >= 0");
    total += c.similarity;
    for (auto f : kAllFactors) acc[f] += c.similarity * c.record.inferred_weights[f];
  }
  if (cases.empty() || total <= 0.0) return std::nullopt;
  for (auto f : kAllFactors) acc[f] /= total;
  return validate_weights(acc);
}

KnowledgeBase::KnowledgeBase(const std::filesystem::path& data_dir)
    : cases(data_dir / kCaseFileName), hwperf(data_dir / kHwPerfFileName) {}

KnowledgeBase::KnowledgeBase() = default;

}  // namespace qplan
