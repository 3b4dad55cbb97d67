#pragma once

#include <array>
#include <vector>

#include "pyrtex/image.hpp"

namespace pyrtex {

/// Gaussian pyramid settings: number of reduce steps and the 5-tap separable
/// kernel. The default kernel is the binomial [1 4 6 4 1]/16, which preserves
/// constants exactly under reflect-101 borders and annihilates the Nyquist
/// checkerboard in a single reduce.
struct PyramidConfig {
    int depth = 4;
    std::array<double, 5> kernel = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

    /// Throws ConfigError unless depth >= 1 and the kernel is symmetric and
    /// sums to 1 (within 1e-12).
    void validate() const;
};

/// Levels G0..GN, G0 being the source image. Each level is ceil(prev/2) in
/// both axes.
struct GaussianPyramid {
    std::vector<Image> levels;

    const Image& coarsest() const { return levels.back(); }
    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

/// One blur + halve step: separable 5-tap filter with reflect-101 borders,
/// then every second sample starting at index 0. Output dims are ceil(in/2).
/// Throws DimensionError if either input axis is below 2 pixels.
Image reduce(const Image& img, const PyramidConfig& cfg = {});

/// Repeatedly reduce, keeping all intermediate levels. Requires both input
/// dims >= 2^depth so every reduce sees at least a 2x2 image.
GaussianPyramid build_pyramid(const Image& img, const PyramidConfig& cfg = {});

/// Exact transpose of the linear map implemented by reduce, used to carry
/// coarse-level gradients back to the fine lattice:
///   <reduce(x), y> == <x, reduce_adjoint(y, dims(x))> for all x, y.
/// grad_coarse dims must equal ceil(fine/2).
Image reduce_adjoint(const Image& grad_coarse, int fine_height, int fine_width,
                     const PyramidConfig& cfg = {});

}  // namespace pyrtex
