#pragma once

// Context inference rules and the six-step profile pipeline: hardware, performance
// lookup, interview context and hints, case retrieval, weight blending and
// contribution estimates.

#include <optional>
#include <string>
#include <vector>

#include "qplan/domain.hpp"
#include "qplan/knowledge_store.hpp"
#include "qplan/satisfaction.hpp"

namespace qplan {

InferredFactors infer_factors(const ContextualFactors& context);

struct ProfilingOptions {
  int k = 5;
  // Share of the interview hints in the blended weights.
  double hint_blend = 0.5;
  Strategy strategy = Strategy::kFedAvg;
  double beta = kDefaultBeta;
  TaskDistribution global_dist = default_task_distribution();
};

void validate(const ProfilingOptions& options);

// blend * hints + (1 - blend) * prior, renormalised. Missing inputs fall back
// to whichever one is present, then to uniform weights.
SensitivityWeights blend_weights(const std::optional<FactorValues>& hints,
                                 const std::optional<SensitivityWeights>& prior, double blend);

struct BuiltProfile {
  ClientProfile profile;
  PerfTable performance;
  std::vector<RetrievedCase> neighbours;
};

// Throws NotFoundError when no performance table can be found for `hw`.
BuiltProfile build_profile(const std::string& client_id, const HardwareSpec& hw, const ContextualFactors& context,
                           const std::optional<FactorValues>& weight_hints, const CaseStore& cases,
                           const HwPerfStore& hwperf, const ProfilingOptions& options = {});

}  // namespace qplan
