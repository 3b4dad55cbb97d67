#include "pyrtex/upsample.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pyrtex/filtering.hpp"
#include "pyrtex/subprocess.hpp"

namespace pyrtex {

UpsamplerKind UpsamplerKind::external(std::string command_template) {
    if (command_template.find("{in}") == std::string::npos ||
        command_template.find("{out}") == std::string::npos) {
        throw ConfigError("external upsampler command must contain {in} and {out}");
    }
    UpsamplerKind k;
    k.method = Method::External;
    k.command = std::move(command_template);
    return k;
}

UpsamplerKind UpsamplerKind::parse(const std::string& text) {
    if (text == "nearest") return nearest();
    if (text == "bilinear") return bilinear();
    if (text == "bicubic") return bicubic();
    if (text == "lanczos3") return lanczos3();
    if (text.rfind("external:", 0) == 0) return external(text.substr(9));
    throw ConfigError("unknown upsampler '" + text +
                      "' (expected nearest|bilinear|bicubic|lanczos3|external:<cmd>)");
}

std::string UpsamplerKind::name() const {
    switch (method) {
        case Method::Nearest: return "nearest";
        case Method::Bilinear: return "bilinear";
        case Method::Bicubic: return "bicubic";
        case Method::Lanczos3: return "lanczos3";
        case Method::External: return "external:" + command;
    }
    return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double kernel_support(UpsamplerKind::Method m) {
    switch (m) {
        case UpsamplerKind::Method::Bilinear: return 1.0;
        case UpsamplerKind::Method::Bicubic: return 2.0;
        case UpsamplerKind::Method::Lanczos3: return 3.0;
        default: return 0.0;
    }
}

// Catmull-Rom spline (Keys, a = -0.5); exact on constants and linears.
double bicubic_weight(double x) {
    x = std::abs(x);
    if (x < 1.0) return 1.0 + x * x * (1.5 * x - 2.5);
    if (x < 2.0) return 2.0 - x * (4.0 - x * (2.5 - 0.5 * x));
    return 0.0;
}

double lanczos3_weight(double x) {
    x = std::abs(x);
    if (x < 1e-12) return 1.0;
    if (x >= 3.0) return 0.0;
    const double px = kPi * x;
    return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

double kernel_weight(UpsamplerKind::Method m, double x) {
    switch (m) {
        case UpsamplerKind::Method::Bilinear: return x > -1 && x < 1 ? 1.0 - std::abs(x) : 0.0;
        case UpsamplerKind::Method::Bicubic: return bicubic_weight(x);
        case UpsamplerKind::Method::Lanczos3: return lanczos3_weight(x);
        default: return 0.0;
    }
}

struct AxisTable {
    int taps = 0;
    std::vector<int> start;        // first source index per output index
    std::vector<double> weights;   // taps weights per output index, normalized
};

// Per-axis resampling table. Output sample i maps to source coordinate
// s = (i + 0.5) / scale - 0.5; a downscale (scale < 1) widens the kernel by
// 1/scale for anti-aliasing. Out-of-range taps are mirrored at apply time,
// so the stored start may be negative.
AxisTable make_axis_table(int in_n, int out_n, UpsamplerKind::Method m) {
    AxisTable tbl;
    const double scale = static_cast<double>(out_n) / in_n;
    const double filter_scale = std::min(1.0, scale);

    if (m == UpsamplerKind::Method::Nearest) {
        tbl.taps = 1;
        tbl.start.resize(out_n);
        tbl.weights.assign(out_n, 1.0);
        for (int i = 0; i < out_n; ++i) {
            const int src = static_cast<int>(std::floor((i + 0.5) / scale));
            tbl.start[i] = std::clamp(src, 0, in_n - 1);
        }
        return tbl;
    }

    const double support = kernel_support(m) / filter_scale;
    tbl.taps = static_cast<int>(std::ceil(support)) * 2;
    tbl.start.resize(out_n);
    tbl.weights.resize(static_cast<size_t>(out_n) * tbl.taps);
    for (int i = 0; i < out_n; ++i) {
        const double center = (i + 0.5) / scale - 0.5;
        const int first = static_cast<int>(std::floor(center - support)) + 1;
        tbl.start[i] = first;
        double sum = 0.0;
        for (int k = 0; k < tbl.taps; ++k) {
            const double w = kernel_weight(m, (center - (first + k)) * filter_scale);
            tbl.weights[static_cast<size_t>(i) * tbl.taps + k] = w;
            sum += w;
        }
        if (sum != 0.0) {
            for (int k = 0; k < tbl.taps; ++k) {
                tbl.weights[static_cast<size_t>(i) * tbl.taps + k] /= sum;
            }
        }
    }
    return tbl;
}

// Horizontal then vertical application of the axis tables.
Image apply_tables(const Image& img, const AxisTable& tx, const AxisTable& ty, int out_h,
                   int out_w) {
    const int channels = img.channels();

    Image mid(img.height(), out_w, channels);
#pragma omp parallel for schedule(static) if (parallel_worthwhile(img.size()))
    for (int y = 0; y < img.height(); ++y) {
        const double* src = img.row(y);
        double* dst = mid.row(y);
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int k = 0; k < tx.taps; ++k) {
                    const int sx = mirror_index(tx.start[x] + k, img.width());
                    acc += tx.weights[static_cast<size_t>(x) * tx.taps + k] *
                           src[static_cast<size_t>(sx) * channels + c];
                }
                dst[static_cast<size_t>(x) * channels + c] = acc;
            }
        }
    }

    Image out(out_h, out_w, channels);
    const int row_len = out_w * channels;
#pragma omp parallel for schedule(static) if (parallel_worthwhile(out.size()))
    for (int y = 0; y < out_h; ++y) {
        double* dst = out.row(y);
        for (int i = 0; i < row_len; ++i) dst[i] = 0.0;
        for (int k = 0; k < ty.taps; ++k) {
            const double w = ty.weights[static_cast<size_t>(y) * ty.taps + k];
            if (w == 0.0) continue;
            const double* src = mid.row(mirror_index(ty.start[y] + k, mid.height()));
            for (int i = 0; i < row_len; ++i) dst[i] += w * src[i];
        }
    }
    return out;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

Image upsample_external(const Image& img, int factor, const std::string& command) {
    const int want_h = img.height() * factor;
    const int want_w = img.width() * factor;
    Image cur = img;
    // A fixed-factor tool (e.g. a x2 or x4 model) is applied repeatedly
    // until the requested size is reached exactly.
    while (cur.height() < want_h || cur.width() < want_w) {
        Image next = run_external_image_command(command, cur);
        if (next.height() <= cur.height() || next.width() <= cur.width()) {
            throw ExternalToolError("external upsampler did not increase dimensions (" +
                                    std::to_string(next.height()) + "x" +
                                    std::to_string(next.width()) + ")");
        }
        if (next.height() > want_h || next.width() > want_w) {
            throw ExternalToolError(
                "external upsampler produced wrong output dims " +
                std::to_string(next.height()) + "x" + std::to_string(next.width()) +
                ", wanted " + std::to_string(want_h) + "x" + std::to_string(want_w));
        }
        if (next.channels() != cur.channels()) {
            throw ExternalToolError("external upsampler changed the channel count");
        }
        cur = std::move(next);
    }
    return clamp_unit(std::move(cur));
}

}  // namespace

Image resample(const Image& img, int out_height, int out_width, const UpsamplerKind& kind) {
    if (kind.method == UpsamplerKind::Method::External) {
        throw ConfigError("resample: external upsamplers only support whole factors");
    }
    if (out_height < 1 || out_width < 1) {
        throw DimensionError("resample: output dims must be positive");
    }
    if (out_height == img.height() && out_width == img.width()) return img;
    const AxisTable tx = make_axis_table(img.width(), out_width, kind.method);
    const AxisTable ty = make_axis_table(img.height(), out_height, kind.method);
    return clamp_unit(apply_tables(img, tx, ty, out_height, out_width));
}

Image upsample(const Image& img, int factor, const UpsamplerKind& kind) {
    if (factor < 2 || factor > 16 || !is_power_of_two(factor)) {
        throw ConfigError("upsample factor must be one of 2, 4, 8, 16");
    }
    if (kind.method == UpsamplerKind::Method::External) {
        return upsample_external(img, factor, kind.command);
    }
    return resample(img, img.height() * factor, img.width() * factor, kind);
}

Image upsample_to(const Image& img, int target_height, int target_width,
                  const UpsamplerKind& kind) {
    if (target_height < img.height() || target_width < img.width()) {
        throw DimensionError("upsample_to: target dims must be >= source dims");
    }

    Image cur = img;
    if (kind.method == UpsamplerKind::Method::External) {
        // Run the tool until it covers the target, then trim to exact size.
        while (cur.height() < target_height || cur.width() < target_width) {
            Image next = run_external_image_command(kind.command, cur);
            if (next.height() <= cur.height() || next.width() <= cur.width()) {
                throw ExternalToolError("external upsampler did not increase dimensions");
            }
            if (next.channels() != cur.channels()) {
                throw ExternalToolError("external upsampler changed the channel count");
            }
            cur = std::move(next);
        }
        return resample(clamp_unit(std::move(cur)), target_height, target_width,
                        UpsamplerKind::bicubic());
    }

    // Largest in-range power-of-two step first, repeated while it fits, then
    // one exact-size resample for the ceil-halving remainder.
    for (;;) {
        int factor = 1;
        for (int f : {16, 8, 4, 2}) {
            if (static_cast<long>(cur.height()) * f <= target_height &&
                static_cast<long>(cur.width()) * f <= target_width) {
                factor = f;
                break;
            }
        }
        if (factor == 1) break;
        cur = upsample(cur, factor, kind);
    }
    return resample(cur, target_height, target_width, kind);
}

}  // namespace pyrtex
