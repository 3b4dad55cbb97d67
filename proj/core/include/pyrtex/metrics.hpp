#pragma once

#include <vector>

#include "pyrtex/image.hpp"

namespace pyrtex {

/// SSIM constants per Wang et al.: 11x11 Gaussian window with sigma 1.5,
/// stabilizers C1 = (k1*L)^2 and C2 = (k2*L)^2 with L = 1 for unit-range
/// intensities.
struct SsimConfig {
    int window_radius = 5;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }

    /// Normalized 1-D window taps (length 2*radius+1).
    std::vector<double> window() const;
};

/// Cached windowed statistics of a fixed comparison image. Lets a caller
/// score many candidates against one target without re-filtering the target.
struct SsimReference {
    Image image;          // the target itself
    Image mu;             // windowed mean
    Image second_moment;  // windowed mean of squares
};

SsimReference make_ssim_reference(Image target, const SsimConfig& cfg = {});

/// Mean SSIM index over all pixels and channels, Gaussian-weighted local
/// statistics, reflect-101 borders. Color images are scored per channel and
/// averaged. Result is in [-1, 1], exactly 1 for identical images.
double ssim(const Image& a, const Image& b, const SsimConfig& cfg = {});

/// Analytic gradient of ssim(a, b) with respect to a. Matches central finite
/// differences because the windowing adjoint is exact, borders included.
Image ssim_grad(const Image& a, const Image& b, const SsimConfig& cfg = {});

/// Fused value + gradient against a precomputed reference; grad may be null
/// when only the score is needed.
double ssim_with_grad(const Image& a, const SsimReference& ref, Image* grad,
                      const SsimConfig& cfg = {});

/// Mean of |a - b| over all entries; in [0,1] for unit-range images.
double mean_abs_diff(const Image& a, const Image& b);

/// Root of the mean squared difference over all entries; in [0,1].
double rms_diff(const Image& a, const Image& b);

/// 10*log10(1/MSE) for unit dynamic range; +infinity for identical images.
double psnr(const Image& a, const Image& b);

}  // namespace pyrtex
