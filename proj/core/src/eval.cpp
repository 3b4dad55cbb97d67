#include "pyrtex/eval.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "pyrtex/filtering.hpp"
#include "pyrtex/image_io.hpp"
#include "pyrtex/metrics.hpp"
#include "pyrtex/subprocess.hpp"

namespace pyrtex {

EvalMethod EvalMethod::parse(const std::string& text, const OptimizeConfig& direct_defaults) {
    EvalMethod m;
    if (text == "identity") {
        m.name = "identity";
        m.kind = Kind::Identity;
        return m;
    }
    if (text == "blur") {
        m.name = "blur";
        m.kind = Kind::Blur;
        return m;
    }
    if (text == "direct") {
        m.name = "direct";
        m.kind = Kind::Direct;
        m.direct_config = direct_defaults;
        return m;
    }
    if (text == "gt") {
        m.name = "gt";
        m.kind = Kind::GroundTruth;
        return m;
    }
    const size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw ConfigError("bad method spec '" + text +
                          "' (expected identity|blur|direct|gt|<name>=<command>)");
    }
    m.name = text.substr(0, eq);
    m.kind = Kind::External;
    m.command = text.substr(eq + 1);
    if (m.command.find("{in}") == std::string::npos ||
        m.command.find("{out}") == std::string::npos) {
        throw ConfigError("external method command must contain {in} and {out}: " + text);
    }
    return m;
}

namespace {

Image apply_method(const EvalMethod& method, const Image& input, const Image& gt,
                   const EvalOptions& options) {
    switch (method.kind) {
        case EvalMethod::Kind::Identity:
            return input;
        case EvalMethod::Kind::GroundTruth:
            return gt;
        case EvalMethod::Kind::Blur: {
            const PyramidConfig& pyr = options.pyramid;
            Image out = input;
            for (int i = 0; i < method.blur_passes; ++i) {
                out = separable_filter(out, pyr.kernel);
            }
            return out;
        }
        case EvalMethod::Kind::Direct: {
            OptimizeConfig cfg = method.direct_config;
            cfg.weights = options.weights;
            cfg.pyramid = options.pyramid;
            cfg.upsampler = options.upsampler;
            return filter_direct(input, cfg).image;
        }
        case EvalMethod::Kind::External:
            return run_external_image_command(method.command, input);
    }
    throw ConfigError("unknown eval method kind");
}

}  // namespace

std::vector<EvalRow> run_eval(const PairManifest& manifest,
                              const std::vector<EvalMethod>& methods,
                              const EvalOptions& options) {
    manifest.validate();
    if (methods.empty()) throw ConfigError("run_eval: no methods given");

    struct Job {
        size_t pair_index;
        size_t method_index;
    };
    std::vector<Job> jobs;
    jobs.reserve(manifest.pairs.size() * methods.size());
    for (size_t p = 0; p < manifest.pairs.size(); ++p) {
        for (size_t m = 0; m < methods.size(); ++m) jobs.push_back({p, m});
    }

    std::vector<EvalRow> rows(jobs.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const Job& job = jobs[j];
            const EvalMethod& method = methods[job.method_index];

            EvalRow& row = rows[j];
            char id[16];
            std::snprintf(id, sizeof(id), "%04zu", job.pair_index);
            row.pair_id = id;
            row.method = method.name;

            try {
                const Image input = load_image(manifest.input_file(job.pair_index));
                const Image gt = load_image(manifest.gt_file(job.pair_index));

                const auto t0 = std::chrono::steady_clock::now();
                const Image output = apply_method(method, input, gt, options);
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();

                require_same_shape(output, gt, "run_eval output");
                row.psnr_db = psnr(output, gt);
                row.ssim_score = ssim(output, gt);
                row.reward = reward_total(input, output, options.weights, options.pyramid,
                                          options.upsampler);
                row.runtime_seconds = options.record_timings ? elapsed : 0.0;
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };

    const int jobs_n = std::max(1, options.jobs);
    if (jobs_n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs_n);
        for (int i = 0; i < jobs_n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

namespace {

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct MeanAccumulator {
    double sum = 0.0;
    bool has_inf = false;
    size_t n = 0;

    void add(double v) {
        if (std::isinf(v)) {
            has_inf = true;
        } else {
            sum += v;
        }
        ++n;
    }
    double mean() const {
        if (n == 0) return std::numeric_limits<double>::quiet_NaN();
        if (has_inf) return std::numeric_limits<double>::infinity();
        return sum / static_cast<double>(n);
    }
};

struct MethodMeans {
    MeanAccumulator psnr, ssim, texture, structure, fidelity, total, runtime;
    size_t failed = 0;
};

std::vector<std::pair<std::string, MethodMeans>> collect_means(
    const std::vector<EvalRow>& rows) {
    std::vector<std::pair<std::string, MethodMeans>> means;
    auto find = [&](const std::string& name) -> MethodMeans& {
        for (auto& [n, m] : means) {
            if (n == name) return m;
        }
        means.emplace_back(name, MethodMeans{});
        return means.back().second;
    };
    for (const EvalRow& row : rows) {
        MethodMeans& m = find(row.method);
        if (!row.ok) {
            ++m.failed;
            continue;
        }
        m.psnr.add(row.psnr_db);
        m.ssim.add(row.ssim_score);
        m.texture.add(row.reward.texture);
        m.structure.add(row.reward.structure);
        m.fidelity.add(row.reward.fidelity);
        m.total.add(row.reward.total);
        m.runtime.add(row.runtime_seconds);
    }
    return means;
}

}  // namespace

void emit_report(const std::vector<EvalRow>& rows, const std::string& path,
                 ReportFormat format) {
    if (rows.empty()) throw ConfigError("emit_report: no rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path);

    const auto means = collect_means(rows);
    const char* header[] = {"pair",        "method",     "psnr",    "ssim",
                            "r_texture",   "r_structure", "r_fidelity", "r_total",
                            "runtime",     "status"};

    auto row_cells = [](const EvalRow& r) {
        std::vector<std::string> cells;
        cells.push_back(r.pair_id);
        cells.push_back(r.method);
        if (r.ok) {
            cells.push_back(format_value(r.psnr_db));
            cells.push_back(format_value(r.ssim_score));
            cells.push_back(format_value(r.reward.texture));
            cells.push_back(format_value(r.reward.structure));
            cells.push_back(format_value(r.reward.fidelity));
            cells.push_back(format_value(r.reward.total));
            cells.push_back(format_value(r.runtime_seconds));
            cells.push_back("ok");
        } else {
            for (int i = 0; i < 7; ++i) cells.push_back("nan");
            cells.push_back("failed: " + r.error);
        }
        return cells;
    };
    auto mean_cells = [](const std::string& name, const MethodMeans& m) {
        std::vector<std::string> cells;
        cells.push_back("mean");
        cells.push_back(name);
        cells.push_back(format_value(m.psnr.mean()));
        cells.push_back(format_value(m.ssim.mean()));
        cells.push_back(format_value(m.texture.mean()));
        cells.push_back(format_value(m.structure.mean()));
        cells.push_back(format_value(m.fidelity.mean()));
        cells.push_back(format_value(m.total.mean()));
        cells.push_back(format_value(m.runtime.mean()));
        cells.push_back(m.failed == 0 ? "ok" : std::to_string(m.failed) + " failed");
        return cells;
    };

    if (format == ReportFormat::Csv) {
        for (size_t i = 0; i < std::size(header); ++i) {
            out << header[i] << (i + 1 < std::size(header) ? "," : "\n");
        }
        auto write = [&](const std::vector<std::string>& cells) {
            for (size_t i = 0; i < cells.size(); ++i) {
                std::string cell = cells[i];
                if (cell.find(',') != std::string::npos) {
                    for (size_t q = cell.find('"'); q != std::string::npos;
                         q = cell.find('"', q + 2)) {
                        cell.insert(q, 1, '"');
                    }
                    cell = "\"" + cell + "\"";
                }
                out << cell << (i + 1 < cells.size() ? "," : "\n");
            }
        };
        for (const EvalRow& r : rows) write(row_cells(r));
        for (const auto& [name, m] : means) write(mean_cells(name, m));
    } else {
        auto write = [&](const std::vector<std::string>& cells) {
            out << "|";
            for (const std::string& c : cells) out << " " << c << " |";
            out << "\n";
        };
        out << "|";
        for (const char* h : header) out << " " << h << " |";
        out << "\n|";
        for (size_t i = 0; i < std::size(header); ++i) out << " --- |";
        out << "\n";
        for (const EvalRow& r : rows) write(row_cells(r));
        for (const auto& [name, m] : means) write(mean_cells(name, m));
    }
    if (!out) throw IoError("report write failed: " + path);
}

}  // namespace pyrtex
