#pragma once

#include <span>

#include "pyrtex/image.hpp"

namespace pyrtex {

/// Thread fan-out is only worth it above this many elements: below it the
/// fork/join cost outweighs the work and images this small are faster serial.
inline bool parallel_worthwhile(size_t elements) { return elements >= (1u << 20); }

/// Reflect-101 index: mirrors about the first/last sample without repeating
/// it (…, 2, 1, | 0, 1, …, n-1, | n-2, n-3, …). For n == 1 everything maps
/// to 0. Constants are preserved exactly under this rule.
inline int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n - 2;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

/// Separable correlation with an odd-length symmetric tap set and reflect-101
/// borders. Output has the same shape as the input. Channels are filtered
/// independently; rows are processed in parallel with deterministic results.
Image separable_filter(const Image& img, std::span<const double> taps);

/// Exact transpose of separable_filter for the same taps: a mirrored scatter
/// instead of a mirrored gather, so <filter(x), y> == <x, filter_adjoint(y)>
/// holds to rounding error for every x, y.
Image separable_filter_adjoint(const Image& img, std::span<const double> taps);

/// Keep every second sample starting at index 0 along both axes.
/// Output dims are ceil(n/2).
Image subsample_even(const Image& img);

/// Transpose of subsample_even: place samples at even indices of a zero image
/// of the given fine dims. Requires img dims == ceil(fine/2).
Image upsample_zero(const Image& img, int fine_height, int fine_width);

}  // namespace pyrtex
