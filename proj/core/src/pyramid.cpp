#include "pyrtex/pyramid.hpp"

#include <cmath>
#include <string>

#include "pyrtex/filtering.hpp"

namespace pyrtex {

void PyramidConfig::validate() const {
    if (depth < 1) throw ConfigError("pyramid depth must be >= 1");
    double sum = 0.0;
    for (double w : kernel) sum += w;
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("pyramid kernel must sum to 1");
    for (size_t i = 0; i < kernel.size() / 2; ++i) {
        if (std::abs(kernel[i] - kernel[kernel.size() - 1 - i]) > 1e-12) {
            throw ConfigError("pyramid kernel must be symmetric");
        }
    }
}

Image reduce(const Image& img, const PyramidConfig& cfg) {
    cfg.validate();
    if (img.height() < 2 || img.width() < 2) {
        throw DimensionError("reduce: both axes must be at least 2 pixels, got " +
                             std::to_string(img.height()) + "x" + std::to_string(img.width()));
    }
    return subsample_even(separable_filter(img, cfg.kernel));
}

GaussianPyramid build_pyramid(const Image& img, const PyramidConfig& cfg) {
    cfg.validate();
    const long min_dim = 1L << cfg.depth;
    if (img.height() < min_dim || img.width() < min_dim) {
        throw DimensionError("build_pyramid: image " + std::to_string(img.height()) + "x" +
                             std::to_string(img.width()) + " too small for depth " +
                             std::to_string(cfg.depth) + " (needs >= 2^depth per axis)");
    }
    GaussianPyramid pyr;
    pyr.levels.reserve(cfg.depth + 1);
    pyr.levels.push_back(img);
    for (int k = 0; k < cfg.depth; ++k) {
        pyr.levels.push_back(reduce(pyr.levels.back(), cfg));
    }
    return pyr;
}

Image reduce_adjoint(const Image& grad_coarse, int fine_height, int fine_width,
                     const PyramidConfig& cfg) {
    cfg.validate();
    if (grad_coarse.height() != (fine_height + 1) / 2 ||
        grad_coarse.width() != (fine_width + 1) / 2) {
        throw DimensionError("reduce_adjoint: coarse dims must equal ceil(fine/2)");
    }
    // reduce = subsample_even o separable_filter, so the transpose is
    // filter_adjoint o upsample_zero
    return separable_filter_adjoint(upsample_zero(grad_coarse, fine_height, fine_width),
                                    cfg.kernel);
}

}  // namespace pyrtex
