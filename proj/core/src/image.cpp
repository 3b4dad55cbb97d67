#include "pyrtex/image.hpp"

#include <algorithm>
#include <string>

namespace pyrtex {

void require_same_shape(const Image& a, const Image& b, const char* context) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(context) + ": shape mismatch (" +
                             std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                             "x" + std::to_string(a.channels()) + " vs " +
                             std::to_string(b.height()) + "x" + std::to_string(b.width()) +
                             "x" + std::to_string(b.channels()) + ")");
    }
}

Image to_luma(const Image& img) {
    if (img.channels() != 3) {
        throw DimensionError("to_luma: expected a 3-channel image, got " +
                             std::to_string(img.channels()) + " channel(s)");
    }
    Image out(img.height(), img.width(), 1);
    const double* src = img.data().data();
    double* dst = out.data().data();
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        dst[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    }
    return out;
}

Image crop(const Image& img, const PixelRegion& region) {
    if (region.height < 1 || region.width < 1 || region.top < 0 || region.left < 0 ||
        region.top + region.height > img.height() ||
        region.left + region.width > img.width()) {
        throw DimensionError("crop: region outside image bounds");
    }
    Image out(region.height, region.width, img.channels());
    const int row_bytes = region.width * img.channels();
    for (int y = 0; y < region.height; ++y) {
        const double* src = img.row(region.top + y) +
                            static_cast<size_t>(region.left) * img.channels();
        std::copy(src, src + row_bytes, out.row(y));
    }
    return out;
}

Image clamp_unit(Image img) {
    for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
    return img;
}

}  // namespace pyrtex
