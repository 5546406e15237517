#include "qplan/profiler.hpp"

namespace qplan {

InferredFactors infer_factors(const ContextualFactors& context) {
  InferredFactors out;
  const bool noisy_room =
      context.device_location == Location::kLivingRoom || context.device_location == Location::kKitchen;
  const bool daytime = context.interaction_time == InteractionTime::kDaytime;
  out.noise_level = noisy_room || daytime ? NoiseLevel::kHigh : NoiseLevel::kLow;
  out.data_quantity =
      context.interaction_frequency == Frequency::kHigh || daytime ? DataQuantity::kHigh : DataQuantity::kLow;
  out.data_distribution = context.task_type_mix;
  return out;
}

void validate(const ProfilingOptions& options) {
  if (options.k < 1) throw ValidationError("k", "must be >= 1");
  if (!(options.hint_blend >= 0.0 && options.hint_blend <= 1.0)) {
    throw ValidationError("hint_blend", "must be in [0, 1]");
  }
  if (!(options.beta >= 0.0)) throw ValidationError("beta", "must be >= 0");
  validate_distribution(options.global_dist);
}

SensitivityWeights blend_weights(const std::optional<FactorValues>& hints,
                                 const std::optional<SensitivityWeights>& prior, double blend) {
  if (hints && prior) {
    const SensitivityWeights h = validate_weights(*hints);
    FactorValues mixed{};
    for (auto f : kAllFactors) mixed[f] = blend * h[f] + (1.0 - blend) * (*prior)[f];
    return validate_weights(mixed);
  }
  if (hints) return validate_weights(*hints);
  if (prior) return *prior;
  return SensitivityWeights{};
}

BuiltProfile build_profile(const std::string& client_id, const HardwareSpec& hw, const ContextualFactors& context,
                           const std::optional<FactorValues>& weight_hints, const CaseStore& cases,
                           const HwPerfStore& hwperf, const ProfilingOptions& options) {
  validate(options);
  if (client_id.empty()) throw ValidationError("client_id", "must not be empty");
  validate(hw);
  validate(context);

  BuiltProfile out;
  out.performance = hwperf.lookup_performance(hw);
  out.neighbours = cases.retrieve_similar(context, options.k);
  const auto prior = estimate_weights_from_cases(out.neighbours);

  ClientProfile& p = out.profile;
  p.client_id = client_id;
  p.hardware = hw;
  p.context = context;
  p.inferred = infer_factors(context);
  p.estimated_weights = blend_weights(weight_hints, prior, options.hint_blend);
  p.contribution_estimate =
      contribution_estimate(options.strategy, p.inferred, options.global_dist, hw.available_levels, options.beta);
  validate(p);
  return out;
}

}  // namespace qplan
