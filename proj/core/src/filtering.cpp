#include "pyrtex/filtering.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace pyrtex {

namespace {

// Row gather: out[x,c] = sum_k taps[k] * in[mirror(x + k - r), c].
// Interior pixels skip the mirror arithmetic; with interleaved channels the
// interior reduces to a strided dot product over the flat row.
void filter_row(const double* in, double* out, int width, int channels,
                std::span<const double> taps) {
    const int t = static_cast<int>(taps.size());
    const int r = t / 2;
    const int ilo = std::min(r, width);
    const int ihi = std::max(ilo, width - r);

    auto edge_pixel = [&](int x) {
        for (int c = 0; c < channels; ++c) {
            double acc = 0.0;
            for (int k = 0; k < t; ++k) {
                const int sx = mirror_index(x + k - r, width);
                acc += taps[k] * in[static_cast<size_t>(sx) * channels + c];
            }
            out[static_cast<size_t>(x) * channels + c] = acc;
        }
    };

    for (int x = 0; x < ilo; ++x) edge_pixel(x);
    for (int x = ihi; x < width; ++x) edge_pixel(x);

    // interior as tap-outer shifted accumulation: contiguous streams vectorize
    const int lo = ilo * channels;
    const int hi = ihi * channels;
    for (int i = lo; i < hi; ++i) out[i] = 0.0;
    for (int k = 0; k < t; ++k) {
        const double w = taps[k];
        const double* src = in + (k - r) * channels;
        for (int i = lo; i < hi; ++i) out[i] += w * src[i];
    }
}

// Row scatter, the exact transpose of filter_row.
void filter_row_adjoint(const double* in, double* out, int width, int channels,
                        std::span<const double> taps) {
    const int t = static_cast<int>(taps.size());
    const int r = t / 2;
    const int ilo = std::min(r, width);
    const int ihi = std::max(ilo, width - r);

    auto edge_pixel = [&](int x) {
        for (int k = 0; k < t; ++k) {
            const int sx = mirror_index(x + k - r, width);
            const double w = taps[k];
            for (int c = 0; c < channels; ++c) {
                out[static_cast<size_t>(sx) * channels + c] +=
                    w * in[static_cast<size_t>(x) * channels + c];
            }
        }
    };

    for (int x = 0; x < ilo; ++x) edge_pixel(x);
    for (int x = ihi; x < width; ++x) edge_pixel(x);

    const int lo = ilo * channels;
    const int hi = ihi * channels;
    for (int k = 0; k < t; ++k) {
        const double w = taps[k];
        double* dst = out + (k - r) * channels;
        for (int i = lo; i < hi; ++i) dst[i] += w * in[i];
    }
}

Image horizontal_pass(const Image& img, std::span<const double> taps, bool adjoint) {
    Image out(img.height(), img.width(), img.channels(), 0.0);
#pragma omp parallel for schedule(static) if (parallel_worthwhile(img.size()))
    for (int y = 0; y < img.height(); ++y) {
        if (adjoint) {
            filter_row_adjoint(img.row(y), out.row(y), img.width(), img.channels(), taps);
        } else {
            filter_row(img.row(y), out.row(y), img.width(), img.channels(), taps);
        }
    }
    return out;
}

// Vertical gather: each output row reads up to |taps| source rows, so the
// parallel loop runs over output rows with contiguous inner loops.
Image vertical_pass(const Image& img, std::span<const double> taps) {
    Image out(img.height(), img.width(), img.channels(), 0.0);
    const int row_len = img.width() * img.channels();
    const int t = static_cast<int>(taps.size());
    const int r = t / 2;
#pragma omp parallel for schedule(static) if (parallel_worthwhile(img.size()))
    for (int y = 0; y < img.height(); ++y) {
        double* dst = out.row(y);
        for (int k = 0; k < t; ++k) {
            const double w = taps[k];
            const double* src = img.row(mirror_index(y + k - r, img.height()));
            for (int i = 0; i < row_len; ++i) dst[i] += w * src[i];
        }
    }
    return out;
}

// Vertical scatter transposed into gather form: output row j accumulates
// w[k] * src[y] over every (y, k) with mirror(y + k - r) == j. Enumerating
// the mirror preimages per output row keeps the loop parallel and
// deterministic without atomics.
Image vertical_pass_adjoint(const Image& img, std::span<const double> taps) {
    const int n = img.height();
    const int t = static_cast<int>(taps.size());
    const int r = t / 2;

    std::vector<std::vector<std::pair<int, double>>> preimages(n);
    for (int y = 0; y < n; ++y) {
        for (int k = 0; k < t; ++k) {
            preimages[mirror_index(y + k - r, n)].emplace_back(y, taps[k]);
        }
    }

    Image out(img.height(), img.width(), img.channels(), 0.0);
    const int row_len = img.width() * img.channels();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(img.size()))
    for (int j = 0; j < n; ++j) {
        double* dst = out.row(j);
        for (const auto& [y, w] : preimages[j]) {
            const double* src = img.row(y);
            for (int i = 0; i < row_len; ++i) dst[i] += w * src[i];
        }
    }
    return out;
}

void check_taps(std::span<const double> taps) {
    if (taps.empty() || taps.size() % 2 == 0) {
        throw ConfigError("separable filter taps must have odd length");
    }
}

}  // namespace

Image separable_filter(const Image& img, std::span<const double> taps) {
    check_taps(taps);
    return vertical_pass(horizontal_pass(img, taps, /*adjoint=*/false), taps);
}

Image separable_filter_adjoint(const Image& img, std::span<const double> taps) {
    check_taps(taps);
    // forward is V(H(x)), so the transpose is H^T(V^T(x))
    return horizontal_pass(vertical_pass_adjoint(img, taps), taps, /*adjoint=*/true);
}

Image subsample_even(const Image& img) {
    const int oh = (img.height() + 1) / 2;
    const int ow = (img.width() + 1) / 2;
    const int channels = img.channels();
    Image out(oh, ow, channels);
    for (int y = 0; y < oh; ++y) {
        const double* src = img.row(2 * y);
        double* dst = out.row(y);
        for (int x = 0; x < ow; ++x) {
            for (int c = 0; c < channels; ++c) {
                dst[static_cast<size_t>(x) * channels + c] =
                    src[static_cast<size_t>(2 * x) * channels + c];
            }
        }
    }
    return out;
}

Image upsample_zero(const Image& img, int fine_height, int fine_width) {
    if (img.height() != (fine_height + 1) / 2 || img.width() != (fine_width + 1) / 2) {
        throw DimensionError("upsample_zero: coarse dims must equal ceil(fine/2)");
    }
    const int channels = img.channels();
    Image out(fine_height, fine_width, channels, 0.0);
    for (int y = 0; y < img.height(); ++y) {
        const double* src = img.row(y);
        double* dst = out.row(2 * y);
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < channels; ++c) {
                dst[static_cast<size_t>(2 * x) * channels + c] =
                    src[static_cast<size_t>(x) * channels + c];
            }
        }
    }
    return out;
}

}  // namespace pyrtex
