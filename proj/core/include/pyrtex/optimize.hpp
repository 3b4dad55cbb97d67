#pragma once

#include <cstdint>

#include "pyrtex/image.hpp"
#include "pyrtex/reward.hpp"

namespace pyrtex {

/// Settings for the direct reward-maximizing filter.
struct OptimizeConfig {
    int steps = 300;
    double step_size = 0.05;
    double moment_decay1 = 0.9;
    double moment_decay2 = 0.999;
    int target_refresh_interval = 10;  // iterations between texture-target rebuilds
    RewardWeights weights;
    PyramidConfig pyramid;
    UpsamplerKind upsampler;
    uint64_t seed = 0;

    void validate() const;
};

/// Per-iteration reward record. The texture component is measured against
/// the frozen target active at that iteration, so the series may reset when
/// the target refreshes.
struct OptimizeTrace {
    std::vector<RewardBreakdown> iterations;
    double wall_seconds = 0.0;
};

struct FilterResult {
    Image image;
    OptimizeTrace trace;
};

/// Texture filtering by projected gradient ascent on the output pixels.
///
/// Starts from the source image and ascends the total reward with adaptive
/// moments, clamping to [0,1] after each step. The texture-reward target
/// (the candidate's upsampled coarsest level) is recomputed every
/// target_refresh_interval iterations and held fixed in between; gradients
/// do not flow through it. The returned image never scores below the source
/// under the true total reward.
FilterResult filter_direct(const Image& source, const OptimizeConfig& cfg = {});

/// Gradient of the total reward with respect to the candidate, with the
/// texture target frozen:
///   w.texture   * d ssim(result, frozen_target) / d result
/// + w.structure * (-1/Mc) * adjoint-chain(sign(Gres_N - Gsrc_N))
/// + w.fidelity  * (source - result) / (M * rms)
/// where the adjoint chain applies reduce_adjoint depth times and Mc is the
/// coarsest-level entry count. The sign subgradient at zero is 0, as is the
/// fidelity term at rms == 0.
Image grad_reward_total(const Image& source, const Image& result,
                        const Image& frozen_texture_target, const RewardWeights& weights,
                        const PyramidConfig& pyr = {});

/// clamp(filtered + strength * (source - filtered)): strength 0 returns the
/// filtered image, 1 recovers the source, above 1 boosts detail.
Image detail_enhance(const Image& source, const Image& filtered, double strength);

}  // namespace pyrtex
