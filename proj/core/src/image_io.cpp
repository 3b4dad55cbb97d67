#include "pyrtex/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace pyrtex {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

Image load_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("libpng: out of memory");
    }

    std::vector<png_byte> raw;
    std::vector<png_bytep> row_ptrs;
    int width = 0, height = 0, channels = 0, bit_depth = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptFileError("corrupt PNG stream: " + path);
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptFileError("PNG decoded to unexpected channel count: " + path);
    }

    const size_t row_bytes = png_get_rowbytes(png, info);
    raw.resize(row_bytes * height);
    row_ptrs.resize(height);
    for (int y = 0; y < height; ++y) row_ptrs[y] = raw.data() + row_bytes * y;

    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image out(height, width, channels);
    double* dst = out.data().data();
    const size_t n = out.size();
    if (bit_depth == 16) {
        // PNG stores 16-bit samples big-endian
        for (size_t i = 0; i < n; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            dst[i] = v / 65535.0;
        }
    } else {
        for (size_t i = 0; i < n; ++i) dst[i] = raw[i] / 255.0;
    }
    return out;
}

void save_png(const Image& img, const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot open file for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng: out of memory");
    }

    const int channels = img.channels();
    std::vector<png_byte> raw(img.size());
    const double* src = img.data().data();
    for (size_t i = 0; i < img.size(); ++i) {
        raw[i] = static_cast<png_byte>(
            std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
    }
    std::vector<png_bytep> row_ptrs(img.height());
    for (int y = 0; y < img.height(); ++y) {
        row_ptrs[y] = raw.data() + static_cast<size_t>(y) * img.width() * channels;
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, img.width(), img.height(), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------------------
// PNM (PGM/PPM, ASCII and binary)
// ---------------------------------------------------------------------------

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
        } else if (!std::isspace(ch)) {
            tok.push_back(static_cast<char>(ch));
            while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#') {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

int parse_pnm_int(std::istream& in, const std::string& path, const char* what) {
    const std::string tok = next_pnm_token(in);
    if (tok.empty()) throw CorruptFileError(std::string("PNM header truncated (") + what + "): " + path);
    try {
        size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw CorruptFileError(std::string("bad PNM header value for ") + what + ": " + path);
    }
}

Image load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '3' && magic[1] != '5' && magic[1] != '6')) {
        throw UnsupportedFormatError("not a supported PNM variant: " + path);
    }
    const bool binary = magic[1] == '5' || magic[1] == '6';
    const int channels = (magic[1] == '3' || magic[1] == '6') ? 3 : 1;

    const int width = parse_pnm_int(in, path, "width");
    const int height = parse_pnm_int(in, path, "height");
    const int maxval = parse_pnm_int(in, path, "maxval");
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
        throw CorruptFileError("PNM header out of range: " + path);
    }

    Image out(height, width, channels);
    double* dst = out.data().data();
    const size_t n = out.size();

    if (binary) {
        // exactly one whitespace byte separates the header from the raster
        in.get();
        const int bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n * bytes_per);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<size_t>(in.gcount()) != raw.size()) {
            throw CorruptFileError("PNM raster truncated: " + path);
        }
        if (bytes_per == 2) {
            for (size_t i = 0; i < n; ++i) {
                const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
                dst[i] = std::min(1.0, static_cast<double>(v) / maxval);
            }
        } else {
            for (size_t i = 0; i < n; ++i) {
                dst[i] = std::min(1.0, static_cast<double>(raw[i]) / maxval);
            }
        }
    } else {
        for (size_t i = 0; i < n; ++i) {
            const int v = parse_pnm_int(in, path, "sample");
            dst[i] = std::min(1.0, static_cast<double>(v) / maxval);
        }
    }
    return out;
}

void save_pnm(const Image& img, const std::string& path, bool color) {
    if (color && img.channels() != 3) {
        throw UnsupportedFormatError("PPM requires a 3-channel image: " + path);
    }
    if (!color && img.channels() != 1) {
        throw UnsupportedFormatError("PGM requires a 1-channel image: " + path);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);

    out << (color ? "P6" : "P5") << "\n" << img.width() << " " << img.height() << "\n255\n";
    const double* src = img.data().data();
    std::vector<unsigned char> raw(img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        raw[i] = static_cast<unsigned char>(
            std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

}  // namespace

Image load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("no such file: " + path);
    unsigned char magic[8] = {0};
    probe.read(reinterpret_cast<char*>(magic), 8);
    const std::streamsize got = probe.gcount();
    probe.close();

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) return load_png(path);
    if (got >= 2 && magic[0] == 'P' && magic[1] >= '2' && magic[1] <= '6' && magic[1] != '4') {
        return load_pnm(path);
    }
    throw UnsupportedFormatError("unrecognized image format: " + path);
}

void save_image(const Image& img, const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".png") {
        save_png(img, path);
    } else if (ext == ".ppm") {
        save_pnm(img, path, /*color=*/true);
    } else if (ext == ".pgm") {
        save_pnm(img, path, /*color=*/false);
    } else {
        throw UnsupportedFormatError("unsupported output extension '" + ext + "': " + path);
    }
}

}  // namespace pyrtex
