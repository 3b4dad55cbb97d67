#include "pyrtex/reward.hpp"

#include <algorithm>
#include <cmath>

namespace pyrtex {

void RewardWeights::validate() const {
    if (texture < 0.0 || structure < 0.0 || fidelity < 0.0) {
        throw ConfigError("reward weights must be nonnegative");
    }
    if (texture == 0.0 && structure == 0.0 && fidelity == 0.0) {
        throw ConfigError("at least one reward weight must be positive");
    }
}

double reward_texture(const Image& result, const PyramidConfig& pyr,
                      const UpsamplerKind& kind, const SsimConfig& ssim_cfg) {
    const GaussianPyramid pyramid = build_pyramid(result, pyr);
    const Image restored =
        upsample_to(pyramid.coarsest(), result.height(), result.width(), kind);
    return ssim(result, restored, ssim_cfg);
}

double reward_structure(const Image& source, const Image& result, const PyramidConfig& pyr) {
    require_same_shape(source, result, "reward_structure");
    const GaussianPyramid src_pyr = build_pyramid(source, pyr);
    const GaussianPyramid res_pyr = build_pyramid(result, pyr);
    return 1.0 - mean_abs_diff(src_pyr.coarsest(), res_pyr.coarsest());
}

double reward_fidelity(const Image& source, const Image& result) {
    require_same_shape(source, result, "reward_fidelity");
    return 1.0 - rms_diff(source, result);
}

RewardBreakdown reward_total(const Image& source, const Image& result,
                             const RewardWeights& weights, const PyramidConfig& pyr,
                             const UpsamplerKind& kind) {
    weights.validate();
    RewardBreakdown r;
    r.texture = reward_texture(result, pyr, kind);
    r.structure = reward_structure(source, result, pyr);
    r.fidelity = reward_fidelity(source, result);
    r.total = weights.texture * r.texture + weights.structure * r.structure +
              weights.fidelity * r.fidelity;
    return r;
}

PolicyGroup normalize_group(const std::vector<double>& raw_totals) {
    if (raw_totals.size() < 2) {
        throw ConfigError("normalize_group needs at least 2 candidates");
    }
    PolicyGroup group;
    group.raw_totals = raw_totals;

    double mean = 0.0;
    for (double r : raw_totals) mean += r;
    mean /= static_cast<double>(raw_totals.size());

    double var = 0.0;
    for (double r : raw_totals) var += (r - mean) * (r - mean);
    var /= static_cast<double>(raw_totals.size());  // population variance
    group.z_c = std::sqrt(var);

    group.normalized.resize(raw_totals.size());
    if (group.z_c < 1e-12) {
        // degenerate group: no preference either way
        std::fill(group.normalized.begin(), group.normalized.end(), 0.5);
        return group;
    }
    for (size_t i = 0; i < raw_totals.size(); ++i) {
        const double z = std::clamp((raw_totals[i] - mean) / group.z_c, -1.0, 1.0);
        group.normalized[i] = 0.5 + 0.5 * z;
    }
    return group;
}

}  // namespace pyrtex
