#pragma once

#include <cstddef>
#include <vector>

#include "pyrtex/errors.hpp"

namespace pyrtex {

/// Rectangular window into an image, in pixel units.
struct PixelRegion {
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;
};

/// Dense row-major image with 1 or 3 channels and real intensities.
///
/// Intensities are nominally in [0,1]; operations that can leave the range
/// (interpolation overshoot, gradient fields) clamp before returning an
/// intensity image, except where an offset-field convention is documented.
/// Immutable by convention after construction; safe to share across threads
/// read-only.
class Image {
public:
    Image() = default;

    Image(int height, int width, int channels, double fill = 0.0)
        : height_(height), width_(width), channels_(channels) {
        check_shape(height, width, channels);
        data_.assign(static_cast<size_t>(height) * width * channels, fill);
    }

    Image(int height, int width, int channels, std::vector<double> data)
        : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
        check_shape(height, width, channels);
        if (data_.size() != static_cast<size_t>(height) * width * channels) {
            throw DimensionError("image data length does not match height*width*channels");
        }
    }

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    size_t size() const { return data_.size(); }
    size_t pixel_count() const { return static_cast<size_t>(height_) * width_; }

    double& at(int y, int x, int c = 0) {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }
    double at(int y, int x, int c = 0) const {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }

    double* row(int y) { return data_.data() + static_cast<size_t>(y) * width_ * channels_; }
    const double* row(int y) const {
        return data_.data() + static_cast<size_t>(y) * width_ * channels_;
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Image& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }

private:
    static void check_shape(int height, int width, int channels) {
        if (height < 1 || width < 1) {
            throw DimensionError("image dimensions must be at least 1x1");
        }
        if (channels != 1 && channels != 3) {
            throw DimensionError("image must have 1 or 3 channels");
        }
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Throws DimensionError unless a and b have identical shape.
void require_same_shape(const Image& a, const Image& b, const char* context);

/// BT.601 luma of an RGB image. Throws DimensionError for non-3-channel input.
Image to_luma(const Image& img);

/// Copy of the given window. The region must lie fully inside the image.
Image crop(const Image& img, const PixelRegion& region);

/// Clamp all intensities into [0,1] in place and return the image.
Image clamp_unit(Image img);

}  // namespace pyrtex
