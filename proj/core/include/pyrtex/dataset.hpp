#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pyrtex/image.hpp"

namespace pyrtex {

enum class TextureKind { Checker, Stripes, ValueNoise, Brick, Dots };

/// Procedural texture parameters. Fields are everything needed to regenerate
/// the exact field: kind, repeat period in pixels, peak amplitude, lattice
/// orientation, and seed.
struct TextureSpec {
    TextureKind kind = TextureKind::Checker;
    int period = 8;
    double amplitude = 0.2;
    double orientation_deg = 0.0;
    uint64_t seed = 0;

    void validate() const;  // period >= 2, 0 < amplitude <= 1
};

enum class StructureKind { VoronoiFlat, PolygonFlat, RadialGradient };

/// Structure-only image parameters.
struct StructureSpec {
    StructureKind kind = StructureKind::VoronoiFlat;
    int region_count = 4;
    uint64_t palette_seed = 0;

    void validate() const;  // region_count >= 2
};

/// Zero-mean offset field in [-amplitude, amplitude], single channel.
/// This is the one Image producer that intentionally leaves [0,1]: values are
/// additive offsets, recentred to an exactly zero spatial mean and rescaled
/// to peak at the requested amplitude. Deterministic per seed.
Image gen_texture(const TextureSpec& spec, int height, int width);

/// Piecewise-constant or smooth-gradient structure image, deterministic per
/// palette seed. If region_labels is non-null it receives one region id per
/// pixel for diagnostics (radial gradients label their palette band).
Image gen_structure(const StructureSpec& spec, int height, int width, int channels = 3,
                    std::vector<int>* region_labels = nullptr);

/// clamp(structure + alpha * texture_field). A 1-channel field broadcasts
/// over a 3-channel structure; spatial dims must match. The pair
/// (blend output, structure) is one (input, ground-truth) training pair.
Image blend(const Image& structure, const Image& texture_field, double alpha);

struct PairEntry {
    std::string input_path;  // relative to the manifest directory
    std::string gt_path;
    int height = 0;
    int width = 0;
    TextureSpec texture;
    StructureSpec structure;
    double alpha = 1.0;
};

/// Line-delimited JSON manifest: a header line with the format version and
/// pair count, then one line per pair.
struct PairManifest {
    static constexpr int kFormatVersion = 1;

    int version = kFormatVersion;
    std::string base_dir;  // directory the paths are relative to
    std::vector<PairEntry> pairs;

    std::string input_file(size_t i) const;
    std::string gt_file(size_t i) const;

    /// Checks every referenced file exists, loads, and matches the recorded
    /// dims. Throws on the first violation.
    void validate() const;

    static PairManifest load(const std::string& path);
    void save(const std::string& path) const;
};

/// Generate `count` (input, ground-truth) pairs of size x size pixels under
/// out_dir plus a manifest.jsonl. Deterministic per seed: the same seed
/// yields byte-identical PNGs and manifest.
PairManifest gen_suite(int count, int size, uint64_t seed, const std::string& out_dir);

}  // namespace pyrtex
