#pragma once

#include <string>
#include <vector>

#include "pyrtex/dataset.hpp"
#include "pyrtex/optimize.hpp"
#include "pyrtex/reward.hpp"

namespace pyrtex {

/// A named way of producing an output image from an input image.
struct EvalMethod {
    enum class Kind { Identity, Blur, Direct, GroundTruth, External };

    std::string name;
    Kind kind = Kind::Identity;
    std::string command;           // External: {in}/{out} template
    OptimizeConfig direct_config;  // Direct
    int blur_passes = 8;           // Blur: binomial 5-tap passes

    /// "identity" | "blur" | "direct" | "gt" | "<name>=<command template>".
    static EvalMethod parse(const std::string& text, const OptimizeConfig& direct_defaults);
};

/// One pair x method outcome. Failed methods keep the row with ok = false and
/// the error message; other rows are unaffected.
struct EvalRow {
    std::string pair_id;
    std::string method;
    bool ok = false;
    std::string error;
    double psnr_db = 0.0;
    double ssim_score = 0.0;
    RewardBreakdown reward;
    double runtime_seconds = 0.0;
};

struct EvalOptions {
    int jobs = 1;                 // bounded parallelism over pair x method work items
    bool record_timings = false;  // off by default so reports are byte-deterministic
    RewardWeights weights;
    PyramidConfig pyramid;
    UpsamplerKind upsampler;
};

/// Score every manifest pair under every method: PSNR and SSIM against the
/// ground truth, reward breakdown against the input. Inputs and ground truth
/// are never modified.
std::vector<EvalRow> run_eval(const PairManifest& manifest,
                              const std::vector<EvalMethod>& methods,
                              const EvalOptions& options = {});

enum class ReportFormat { Csv, Markdown };

/// Write rows plus one mean row per method. Column order is fixed: pair,
/// method, psnr, ssim, r_texture, r_structure, r_fidelity, r_total, runtime,
/// status. Infinite PSNR renders as the literal token "inf". Byte output is
/// deterministic for fixed rows.
void emit_report(const std::vector<EvalRow>& rows, const std::string& path,
                 ReportFormat format);

}  // namespace pyrtex
