#pragma once

#include <vector>

#include "pyrtex/image.hpp"
#include "pyrtex/metrics.hpp"
#include "pyrtex/pyramid.hpp"
#include "pyrtex/upsample.hpp"

namespace pyrtex {

/// Weights of the three reward components. Defaults are the reference
/// setting (0.2, 0.6, 0.2).
struct RewardWeights {
    double texture = 0.2;
    double structure = 0.6;
    double fidelity = 0.2;

    /// Throws ConfigError if any weight is negative or all are zero.
    void validate() const;
};

/// The three components plus their weighted sum for one candidate output.
struct RewardBreakdown {
    double texture = 0.0;
    double structure = 0.0;
    double fidelity = 0.0;
    double total = 0.0;
};

/// A group of sampled candidates: raw totals, the group's population standard
/// deviation, and the normalized rewards in [0,1].
struct PolicyGroup {
    std::vector<double> raw_totals;
    double z_c = 0.0;
    std::vector<double> normalized;
};

/// Texture removal score: SSIM between the candidate and its own coarsest
/// pyramid level upsampled back to full resolution. High when the image is
/// invariant under blur-downsample, i.e. texture-free.
double reward_texture(const Image& result, const PyramidConfig& pyr = {},
                      const UpsamplerKind& kind = {}, const SsimConfig& ssim_cfg = {});

/// Structure preservation score: 1 - mean absolute difference between the
/// coarsest pyramid levels of source and candidate.
double reward_structure(const Image& source, const Image& result,
                        const PyramidConfig& pyr = {});

/// Fidelity score: 1 - RMS difference between source and candidate.
double reward_fidelity(const Image& source, const Image& result);

/// Weighted sum of the three components.
RewardBreakdown reward_total(const Image& source, const Image& result,
                             const RewardWeights& weights = {},
                             const PyramidConfig& pyr = {},
                             const UpsamplerKind& kind = {});

/// Group-relative normalization: r_i = 1/2 + 1/2 * clip((R_i - mean)/Z_c, -1, 1)
/// with Z_c the population standard deviation. A degenerate group (Z_c below
/// 1e-12) maps every candidate to the neutral 1/2. Needs at least 2 entries.
PolicyGroup normalize_group(const std::vector<double>& raw_totals);

}  // namespace pyrtex
