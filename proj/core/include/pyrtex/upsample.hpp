#pragma once

#include <string>

#include "pyrtex/image.hpp"

namespace pyrtex {

/// Which upsampler fills the structure-preserving-upscale slot. Built-ins are
/// classic separable resamplers; External delegates to a user command through
/// the {in}/{out} subprocess protocol so a real super-resolution model can be
/// plugged in.
struct UpsamplerKind {
    enum class Method { Nearest, Bilinear, Bicubic, Lanczos3, External };

    Method method = Method::Bicubic;
    std::string command;  // External only; must contain {in} and {out}

    static UpsamplerKind nearest() { return {Method::Nearest, {}}; }
    static UpsamplerKind bilinear() { return {Method::Bilinear, {}}; }
    static UpsamplerKind bicubic() { return {Method::Bicubic, {}}; }
    static UpsamplerKind lanczos3() { return {Method::Lanczos3, {}}; }

    /// Throws ConfigError unless the template names both placeholders.
    static UpsamplerKind external(std::string command_template);

    /// Accepts "nearest" | "bilinear" | "bicubic" | "lanczos3" |
    /// "external:<command template>".
    static UpsamplerKind parse(const std::string& text);

    std::string name() const;
};

/// Upscale by an integral power-of-two factor in {2, 4, 8, 16}. Built-in
/// kinds use separable resampling with reflect borders; output is clamped to
/// [0,1]. The external hook is run (repeatedly if it upscales by a smaller
/// factor) until dims match input*factor; any other output size is an error.
Image upsample(const Image& img, int factor, const UpsamplerKind& kind = {});

/// Upscale to an exact target size: largest in-range power-of-two factor
/// first, then an exact-size resample to absorb the ceil-halving remainder
/// of odd pyramid levels. Target dims must be >= source dims.
Image upsample_to(const Image& img, int target_height, int target_width,
                  const UpsamplerKind& kind = {});

/// Arbitrary-size separable resample with a built-in kernel (External is not
/// accepted here). Used by upsample/upsample_to and exposed for tests and
/// baselines. Downscales widen the kernel for anti-aliasing.
Image resample(const Image& img, int out_height, int out_width,
               const UpsamplerKind& kind = {});

}  // namespace pyrtex
