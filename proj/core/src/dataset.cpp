#include "pyrtex/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "pyrtex/image_io.hpp"
#include "pyrtex/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pyrtex {

void TextureSpec::validate() const {
    if (period < 2) throw ConfigError("texture period must be >= 2");
    if (amplitude <= 0.0 || amplitude > 1.0) {
        throw ConfigError("texture amplitude must lie in (0, 1]");
    }
}

void StructureSpec::validate() const {
    if (region_count < 2) throw ConfigError("structure region count must be >= 2");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

// Raw pattern value in [-1, 1] at rotated coordinates (u, v).
double raw_texture_value(const TextureSpec& spec, double u, double v) {
    const double p = spec.period;
    switch (spec.kind) {
        case TextureKind::Checker: {
            const long cu = static_cast<long>(std::floor(2.0 * u / p));
            const long cv = static_cast<long>(std::floor(2.0 * v / p));
            return ((cu + cv) & 1) ? -1.0 : 1.0;
        }
        case TextureKind::Stripes: {
            const long cu = static_cast<long>(std::floor(2.0 * u / p));
            return (cu & 1) ? -1.0 : 1.0;
        }
        case TextureKind::ValueNoise: {
            const double gu = u / p;
            const double gv = v / p;
            const long iu = static_cast<long>(std::floor(gu));
            const long iv = static_cast<long>(std::floor(gv));
            const double fu = smoothstep(gu - iu);
            const double fv = smoothstep(gv - iv);
            const double c00 = hash_to_signed_unit(spec.seed, iu, iv);
            const double c10 = hash_to_signed_unit(spec.seed, iu + 1, iv);
            const double c01 = hash_to_signed_unit(spec.seed, iu, iv + 1);
            const double c11 = hash_to_signed_unit(spec.seed, iu + 1, iv + 1);
            const double top = c00 + (c10 - c00) * fu;
            const double bot = c01 + (c11 - c01) * fu;
            return top + (bot - top) * fv;
        }
        case TextureKind::Brick: {
            const double bh = p / 2.0;   // course height
            const double bw = p;         // brick width
            const double mortar = std::max(1.0, p / 8.0);
            const long row = static_cast<long>(std::floor(v / bh));
            const double offset = (row & 1) ? bw / 2.0 : 0.0;
            const double lu = u + offset;
            const long col = static_cast<long>(std::floor(lu / bw));
            const double in_u = lu - col * bw;
            const double in_v = v - row * bh;
            if (in_u < mortar || in_v < mortar) return -1.0;
            // per-brick shade variation
            return 0.4 + 0.6 * std::abs(hash_to_signed_unit(spec.seed, col, row));
        }
        case TextureKind::Dots: {
            const long cu = static_cast<long>(std::floor(u / p));
            const long cv = static_cast<long>(std::floor(v / p));
            const double jx = 0.2 * hash_to_signed_unit(spec.seed, cu * 2 + 1, cv);
            const double jy = 0.2 * hash_to_signed_unit(spec.seed, cu, cv * 2 + 1);
            const double cx = (cu + 0.5 + jx) * p;
            const double cy = (cv + 0.5 + jy) * p;
            const double radius = 0.3 * p;
            const double du = u - cx;
            const double dv = v - cy;
            return du * du + dv * dv <= radius * radius ? 1.0 : -1.0;
        }
    }
    return 0.0;
}

}  // namespace

Image gen_texture(const TextureSpec& spec, int height, int width) {
    spec.validate();
    if (height < spec.period || width < spec.period) {
        throw ConfigError("gen_texture: dims must be at least one period");
    }

    const double theta = spec.orientation_deg * kPi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);

    Image field(height, width, 1);
    double* f = field.data().data();
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = x * ct - y * st;
            const double v = x * st + y * ct;
            f[static_cast<size_t>(y) * width + x] = raw_texture_value(spec, u, v);
        }
    }

    // Recentre to an exactly zero spatial mean, then scale so the peak
    // magnitude is the requested amplitude.
    const size_t n = field.size();
    double mean = std::accumulate(f, f + n, 0.0) / static_cast<double>(n);
    double max_abs = 0.0;
    for (size_t i = 0; i < n; ++i) {
        f[i] -= mean;
        max_abs = std::max(max_abs, std::abs(f[i]));
    }
    if (max_abs > 0.0) {
        const double scale = spec.amplitude / max_abs;
        for (size_t i = 0; i < n; ++i) f[i] *= scale;
    }
    return field;
}

namespace {

// Evenly spaced distinct levels, shuffled: k regions always get k distinct
// intensities per channel.
std::vector<double> shuffled_palette(int k, Rng& rng) {
    std::vector<double> levels(k);
    for (int i = 0; i < k; ++i) levels[i] = (i + 0.5) / k;
    for (int i = k - 1; i > 0; --i) {
        std::swap(levels[i], levels[rng.uniform_int(0, i)]);
    }
    return levels;
}

Image paint_labels(const std::vector<int>& labels, int height, int width, int channels,
                   const std::vector<std::vector<double>>& palette) {
    Image out(height, width, channels);
    double* dst = out.data().data();
    for (size_t p = 0; p < labels.size(); ++p) {
        for (int c = 0; c < channels; ++c) dst[p * channels + c] = palette[c][labels[p]];
    }
    return out;
}

std::vector<int> voronoi_labels(int k, int height, int width, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<double> sx(k), sy(k);
        for (int i = 0; i < k; ++i) {
            sy[i] = rng.uniform(0.0, height);
            sx[i] = rng.uniform(0.0, width);
        }
        std::vector<int> labels(static_cast<size_t>(height) * width);
        std::vector<long> owned(k, 0);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                int best = 0;
                double best_d = 1e300;
                for (int i = 0; i < k; ++i) {
                    const double dy = y + 0.5 - sy[i];
                    const double dx = x + 0.5 - sx[i];
                    const double d = dy * dy + dx * dx;
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                labels[static_cast<size_t>(y) * width + x] = best;
                ++owned[best];
            }
        }
        if (std::all_of(owned.begin(), owned.end(), [](long c) { return c > 0; })) {
            return labels;
        }
    }
    throw NumericError("voronoi_labels: could not place sites so every region is visible");
}

std::vector<int> polygon_labels(int k, int height, int width, Rng& rng) {
    std::vector<int> labels(static_cast<size_t>(height) * width, 0);
    // overlay k-1 random convex quads on the background region
    for (int region = 1; region < k; ++region) {
        const double cy = rng.uniform(0.15, 0.85) * height;
        const double cx = rng.uniform(0.15, 0.85) * width;
        const double radius = rng.uniform(0.12, 0.35) * std::min(height, width);
        double angles[4];
        for (double& a : angles) a = rng.uniform(0.0, 2.0 * kPi);
        std::sort(std::begin(angles), std::end(angles));
        double px[4], py[4];
        for (int i = 0; i < 4; ++i) {
            px[i] = cx + radius * std::cos(angles[i]);
            py[i] = cy + radius * std::sin(angles[i]);
        }
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double qx = x + 0.5, qy = y + 0.5;
                bool inside = true;
                for (int i = 0; i < 4 && inside; ++i) {
                    const int j = (i + 1) % 4;
                    const double cross = (px[j] - px[i]) * (qy - py[i]) -
                                         (py[j] - py[i]) * (qx - px[i]);
                    inside = cross >= 0.0;
                }
                if (inside) labels[static_cast<size_t>(y) * width + x] = region;
            }
        }
    }
    return labels;
}

}  // namespace

Image gen_structure(const StructureSpec& spec, int height, int width, int channels,
                    std::vector<int>* region_labels) {
    spec.validate();
    if (channels != 1 && channels != 3) {
        throw DimensionError("gen_structure: channels must be 1 or 3");
    }
    Rng rng(splitmix64(spec.palette_seed ^ 0x5eedu));
    const int k = spec.region_count;

    std::vector<std::vector<double>> palette(channels);
    for (int c = 0; c < channels; ++c) palette[c] = shuffled_palette(k, rng);

    if (spec.kind == StructureKind::RadialGradient) {
        const double cy = rng.uniform(0.25, 0.75) * height;
        const double cx = rng.uniform(0.25, 0.75) * width;
        double r_max = 0.0;
        for (int corner = 0; corner < 4; ++corner) {
            const double y = (corner & 1) ? height : 0.0;
            const double x = (corner & 2) ? width : 0.0;
            r_max = std::max(r_max, std::hypot(y - cy, x - cx));
        }
        Image out(height, width, channels);
        if (region_labels) region_labels->assign(static_cast<size_t>(height) * width, 0);
        double* dst = out.data().data();
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double f =
                    std::min(1.0, std::hypot(y + 0.5 - cy, x + 0.5 - cx) / r_max);
                const double pos = f * (k - 1);
                const int seg = std::min(k - 2, static_cast<int>(pos));
                const double frac = pos - seg;
                const size_t p = static_cast<size_t>(y) * width + x;
                if (region_labels) (*region_labels)[p] = seg;
                for (int c = 0; c < channels; ++c) {
                    dst[p * channels + c] =
                        palette[c][seg] + frac * (palette[c][seg + 1] - palette[c][seg]);
                }
            }
        }
        return out;
    }

    std::vector<int> labels = spec.kind == StructureKind::VoronoiFlat
                                  ? voronoi_labels(k, height, width, rng)
                                  : polygon_labels(k, height, width, rng);
    Image out = paint_labels(labels, height, width, channels, palette);
    if (region_labels) *region_labels = std::move(labels);
    return out;
}

Image blend(const Image& structure, const Image& texture_field, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("blend: alpha must lie in (0, 1]");
    if (structure.height() != texture_field.height() ||
        structure.width() != texture_field.width()) {
        throw DimensionError("blend: spatial dims must match");
    }
    if (texture_field.channels() != 1 &&
        texture_field.channels() != structure.channels()) {
        throw DimensionError("blend: texture must be 1-channel or match the structure");
    }
    Image out(structure.height(), structure.width(), structure.channels());
    const int channels = structure.channels();
    const double* ps = structure.data().data();
    const double* pt = texture_field.data().data();
    double* po = out.data().data();
    const size_t pixels = structure.pixel_count();
    const bool broadcast = texture_field.channels() == 1;
    for (size_t p = 0; p < pixels; ++p) {
        for (int c = 0; c < channels; ++c) {
            const double t = broadcast ? pt[p] : pt[p * channels + c];
            const double v = ps[p * channels + c] + alpha * t;
            po[p * channels + c] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// manifest
// ---------------------------------------------------------------------------

namespace {

const char* texture_kind_name(TextureKind k) {
    switch (k) {
        case TextureKind::Checker: return "checker";
        case TextureKind::Stripes: return "stripes";
        case TextureKind::ValueNoise: return "value-noise";
        case TextureKind::Brick: return "brick";
        case TextureKind::Dots: return "dots";
    }
    return "?";
}

TextureKind texture_kind_from(const std::string& s) {
    if (s == "checker") return TextureKind::Checker;
    if (s == "stripes") return TextureKind::Stripes;
    if (s == "value-noise") return TextureKind::ValueNoise;
    if (s == "brick") return TextureKind::Brick;
    if (s == "dots") return TextureKind::Dots;
    throw ConfigError("unknown texture kind: " + s);
}

const char* structure_kind_name(StructureKind k) {
    switch (k) {
        case StructureKind::VoronoiFlat: return "voronoi-flat";
        case StructureKind::PolygonFlat: return "polygon-flat";
        case StructureKind::RadialGradient: return "radial-gradient";
    }
    return "?";
}

StructureKind structure_kind_from(const std::string& s) {
    if (s == "voronoi-flat") return StructureKind::VoronoiFlat;
    if (s == "polygon-flat") return StructureKind::PolygonFlat;
    if (s == "radial-gradient") return StructureKind::RadialGradient;
    throw ConfigError("unknown structure kind: " + s);
}

json entry_to_json(const PairEntry& e) {
    return json{{"input", e.input_path},
                {"gt", e.gt_path},
                {"height", e.height},
                {"width", e.width},
                {"alpha", e.alpha},
                {"texture",
                 {{"kind", texture_kind_name(e.texture.kind)},
                  {"period", e.texture.period},
                  {"amplitude", e.texture.amplitude},
                  {"orientation_deg", e.texture.orientation_deg},
                  {"seed", e.texture.seed}}},
                {"structure",
                 {{"kind", structure_kind_name(e.structure.kind)},
                  {"region_count", e.structure.region_count},
                  {"palette_seed", e.structure.palette_seed}}}};
}

PairEntry entry_from_json(const json& j) {
    PairEntry e;
    e.input_path = j.at("input").get<std::string>();
    e.gt_path = j.at("gt").get<std::string>();
    e.height = j.at("height").get<int>();
    e.width = j.at("width").get<int>();
    e.alpha = j.at("alpha").get<double>();
    const json& t = j.at("texture");
    e.texture.kind = texture_kind_from(t.at("kind").get<std::string>());
    e.texture.period = t.at("period").get<int>();
    e.texture.amplitude = t.at("amplitude").get<double>();
    e.texture.orientation_deg = t.at("orientation_deg").get<double>();
    e.texture.seed = t.at("seed").get<uint64_t>();
    const json& s = j.at("structure");
    e.structure.kind = structure_kind_from(s.at("kind").get<std::string>());
    e.structure.region_count = s.at("region_count").get<int>();
    e.structure.palette_seed = s.at("palette_seed").get<uint64_t>();
    return e;
}

}  // namespace

std::string PairManifest::input_file(size_t i) const {
    return (fs::path(base_dir) / pairs.at(i).input_path).string();
}

std::string PairManifest::gt_file(size_t i) const {
    return (fs::path(base_dir) / pairs.at(i).gt_path).string();
}

void PairManifest::validate() const {
    if (version != kFormatVersion) {
        throw ConfigError("manifest version " + std::to_string(version) +
                          " is not supported");
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
        const Image input = load_image(input_file(i));
        const Image gt = load_image(gt_file(i));
        const PairEntry& e = pairs[i];
        if (input.height() != e.height || input.width() != e.width ||
            gt.height() != e.height || gt.width() != e.width) {
            throw DimensionError("manifest pair " + std::to_string(i) +
                                 ": image dims do not match the recorded size");
        }
        if (input.channels() != gt.channels()) {
            throw DimensionError("manifest pair " + std::to_string(i) +
                                 ": input/gt channel mismatch");
        }
    }
}

void PairManifest::save(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write manifest: " + path);
        out << json{{"type", "pair-manifest"},
                    {"version", version},
                    {"count", pairs.size()}}
                   .dump()
            << "\n";
        for (const PairEntry& e : pairs) out << entry_to_json(e).dump() << "\n";
        if (!out) throw IoError("manifest write failed: " + path);
    }
    fs::rename(tmp, path);
}

PairManifest PairManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("no such manifest: " + path);
    PairManifest m;
    m.base_dir = fs::path(path).parent_path().string();

    std::string line;
    if (!std::getline(in, line)) throw CorruptFileError("empty manifest: " + path);
    try {
        const json header = json::parse(line);
        if (header.value("type", "") != "pair-manifest") {
            throw ConfigError("not a pair manifest: " + path);
        }
        m.version = header.at("version").get<int>();
        if (m.version != kFormatVersion) {
            throw ConfigError("manifest version " + std::to_string(m.version) +
                              " is not supported: " + path);
        }
        const size_t count = header.at("count").get<size_t>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            m.pairs.push_back(entry_from_json(json::parse(line)));
        }
        if (m.pairs.size() != count) {
            throw CorruptFileError("manifest entry count mismatch: " + path);
        }
    } catch (const json::exception& e) {
        throw CorruptFileError("bad manifest JSON in " + path + ": " + e.what());
    }
    return m;
}

PairManifest gen_suite(int count, int size, uint64_t seed, const std::string& out_dir) {
    if (count < 1) throw ConfigError("gen_suite: count must be >= 1");
    if (size < 32) throw ConfigError("gen_suite: size must be >= 32");
    fs::create_directories(out_dir);

    const TextureKind texture_kinds[] = {TextureKind::Checker, TextureKind::Stripes,
                                         TextureKind::ValueNoise, TextureKind::Brick,
                                         TextureKind::Dots};
    const StructureKind structure_kinds[] = {StructureKind::VoronoiFlat,
                                             StructureKind::PolygonFlat,
                                             StructureKind::RadialGradient};
    const int periods[] = {6, 8, 10, 12, 16, 20};

    PairManifest manifest;
    manifest.base_dir = out_dir;
    manifest.pairs.resize(count);

    for (int i = 0; i < count; ++i) {
        Rng rng(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (i + 1)));

        PairEntry e;
        char name[32];
        std::snprintf(name, sizeof(name), "input_%04d.png", i);
        e.input_path = name;
        std::snprintf(name, sizeof(name), "gt_%04d.png", i);
        e.gt_path = name;
        e.height = size;
        e.width = size;

        e.structure.kind = structure_kinds[i % 3];
        e.structure.region_count = rng.uniform_int(2, 6);
        e.structure.palette_seed = rng.next_u64();

        e.texture.kind = texture_kinds[i % 5];
        e.texture.period = periods[rng.uniform_int(0, 5)];
        e.texture.amplitude = rng.uniform(0.15, 0.3);
        e.texture.orientation_deg = rng.uniform(0.0, 180.0);
        e.texture.seed = rng.next_u64();

        e.alpha = rng.uniform(0.6, 1.0);

        const Image structure = gen_structure(e.structure, size, size);
        const Image texture = gen_texture(e.texture, size, size);
        const Image input = blend(structure, texture, e.alpha);

        save_image(input, (fs::path(out_dir) / e.input_path).string());
        save_image(structure, (fs::path(out_dir) / e.gt_path).string());
        manifest.pairs[i] = std::move(e);
    }

    manifest.save((fs::path(out_dir) / "manifest.jsonl").string());
    return manifest;
}

}  // namespace pyrtex
