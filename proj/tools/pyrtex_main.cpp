// pyrtex command-line tool: pyramid construction, image metrics, reward
// scoring, direct-optimization texture filtering, synthetic data generation,
// benchmarking, and the toy flow-matching trainer.
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O error, 4 computation
// error. Diagnostics go to stderr; machine-readable output goes to stdout or
// to files named in the arguments.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pyrtex/app_config.hpp"
#include "pyrtex/dataset.hpp"
#include "pyrtex/eval.hpp"
#include "pyrtex/flow.hpp"
#include "pyrtex/image_io.hpp"
#include "pyrtex/metrics.hpp"
#include "pyrtex/optimize.hpp"
#include "pyrtex/pyramid.hpp"
#include "pyrtex/reward.hpp"
#include "pyrtex/upsample.hpp"
#include "pyrtex/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pyrtex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitCompute = 4;

std::string format_score(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

json breakdown_json(const RewardBreakdown& r) {
    return json{{"texture", r.texture},
                {"structure", r.structure},
                {"fidelity", r.fidelity},
                {"total", r.total}};
}

void write_trace_csv(const OptimizeTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write trace: " + path);
    out << "iteration,r_texture,r_structure,r_fidelity,r_total\n";
    char buf[160];
    for (size_t i = 0; i < trace.iterations.size(); ++i) {
        const RewardBreakdown& r = trace.iterations[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.9f,%.9f,%.9f,%.9f\n", i, r.texture,
                      r.structure, r.fidelity, r.total);
        out << buf;
    }
    if (!out) throw IoError("trace write failed: " + path);
}

struct CommonFlags {
    std::string config_path;
    bool verbose = false;

    std::string upsampler_text;
    double w_texture = -1, w_structure = -1, w_fidelity = -1;
    int depth = -1;
};

// built-ins < config file (flag or PYRTEX_CONFIG) < explicit flags
AppConfig resolve_config(const CommonFlags& flags) {
    AppConfig cfg;
    std::string file = flags.config_path;
    if (file.empty()) {
        if (const char* env = std::getenv("PYRTEX_CONFIG")) file = env;
    }
    if (!file.empty()) cfg.apply_file(file);
    if (flags.depth >= 0) cfg.pyramid.depth = flags.depth;
    if (!flags.upsampler_text.empty()) {
        cfg.upsampler = UpsamplerKind::parse(flags.upsampler_text);
    }
    if (flags.w_texture >= 0) cfg.weights.texture = flags.w_texture;
    if (flags.w_structure >= 0) cfg.weights.structure = flags.w_structure;
    if (flags.w_fidelity >= 0) cfg.weights.fidelity = flags.w_fidelity;
    cfg.validate();
    if (flags.verbose) {
        std::cerr << "pyrtex " << kVersion << "\n" << cfg.to_json_string() << "\n";
    }
    return cfg;
}

void add_common_flags(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "JSON config file (or set PYRTEX_CONFIG)");
    sub->add_flag("--verbose", flags.verbose, "echo version and resolved config to stderr");
    sub->add_option("--depth", flags.depth, "pyramid depth N");
    sub->add_option("--upsampler", flags.upsampler_text,
                    "nearest|bilinear|bicubic|lanczos3|external:<cmd with {in} {out}>");
    sub->add_option("--w-texture", flags.w_texture, "texture reward weight");
    sub->add_option("--w-structure", flags.w_structure, "structure reward weight");
    sub->add_option("--w-fidelity", flags.w_fidelity, "fidelity reward weight");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pyramid-reward texture filtering toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("pyrtex ") + kVersion);

    // --- pyramid ---------------------------------------------------------
    CommonFlags pyr_flags;
    std::string pyr_input, pyr_outdir;
    auto* cmd_pyramid = app.add_subcommand("pyramid", "write every Gaussian pyramid level");
    cmd_pyramid->add_option("input", pyr_input, "input image")->required();
    cmd_pyramid->add_option("--out-dir", pyr_outdir, "output directory")->required();
    add_common_flags(cmd_pyramid, pyr_flags);

    // --- metric ----------------------------------------------------------
    std::string met_a, met_b, met_name = "ssim";
    auto* cmd_metric = app.add_subcommand("metric", "score two images");
    cmd_metric->add_option("a", met_a, "first image")->required();
    cmd_metric->add_option("b", met_b, "second image")->required();
    cmd_metric->add_option("--name", met_name, "ssim|psnr|mad|rms")->required();

    // --- upsample --------------------------------------------------------
    CommonFlags up_flags;
    std::string up_input, up_output;
    int up_factor = 0, up_width = 0, up_height = 0;
    auto* cmd_upsample = app.add_subcommand("upsample", "upscale an image");
    cmd_upsample->add_option("input", up_input)->required();
    cmd_upsample->add_option("output", up_output)->required();
    cmd_upsample->add_option("--factor", up_factor, "power-of-two factor (2,4,8,16)");
    cmd_upsample->add_option("--width", up_width, "target width (with --height)");
    cmd_upsample->add_option("--height", up_height, "target height (with --width)");
    add_common_flags(cmd_upsample, up_flags);

    // --- reward ----------------------------------------------------------
    CommonFlags rew_flags;
    std::string rew_src, rew_res;
    auto* cmd_reward = app.add_subcommand("reward", "print the reward breakdown as JSON");
    cmd_reward->add_option("source", rew_src)->required();
    cmd_reward->add_option("result", rew_res)->required();
    add_common_flags(cmd_reward, rew_flags);

    // --- filter ----------------------------------------------------------
    CommonFlags fil_flags;
    std::string fil_input, fil_output, fil_trace;
    int fil_steps = -1, fil_refresh = -1;
    double fil_step_size = -1, fil_decay1 = -1, fil_decay2 = -1;
    uint64_t fil_seed = 0;
    auto* cmd_filter = app.add_subcommand("filter", "texture filtering by direct reward ascent");
    cmd_filter->add_option("input", fil_input)->required();
    cmd_filter->add_option("output", fil_output)->required();
    cmd_filter->add_option("--steps", fil_steps, "iterations (default 300)");
    cmd_filter->add_option("--step-size", fil_step_size, "ascent step size (default 0.05)");
    cmd_filter->add_option("--decay1", fil_decay1, "first moment decay (default 0.9)");
    cmd_filter->add_option("--decay2", fil_decay2, "second moment decay (default 0.999)");
    cmd_filter->add_option("--refresh", fil_refresh, "texture target refresh interval (default 10)");
    cmd_filter->add_option("--seed", fil_seed, "seed");
    cmd_filter->add_option("--trace", fil_trace, "write per-iteration reward CSV here");
    add_common_flags(cmd_filter, fil_flags);

    // --- enhance ---------------------------------------------------------
    std::string enh_src, enh_filtered, enh_output;
    double enh_strength = 2.0;
    auto* cmd_enhance = app.add_subcommand("enhance", "detail enhancement from a filtered image");
    cmd_enhance->add_option("source", enh_src)->required();
    cmd_enhance->add_option("filtered", enh_filtered)->required();
    cmd_enhance->add_option("output", enh_output)->required();
    cmd_enhance->add_option("--strength", enh_strength, "0 keeps filtered, 1 recovers source, >1 boosts");

    // --- synth -----------------------------------------------------------
    std::string syn_outdir;
    int syn_count = 50, syn_size = 256;
    uint64_t syn_seed = 0;
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic paired dataset");
    cmd_synth->add_option("--count", syn_count, "number of pairs (default 50)");
    cmd_synth->add_option("--size", syn_size, "image size in pixels (default 256)");
    cmd_synth->add_option("--seed", syn_seed, "seed");
    cmd_synth->add_option("--out-dir", syn_outdir, "output directory")->required();

    // --- eval ------------------------------------------------------------
    CommonFlags ev_flags;
    std::string ev_manifest, ev_csv, ev_markdown;
    std::vector<std::string> ev_methods;
    int ev_jobs = 1, ev_steps = -1;
    bool ev_timings = false;
    uint64_t ev_seed = 0;
    auto* cmd_eval = app.add_subcommand("eval", "benchmark methods against a manifest");
    cmd_eval->add_option("--manifest", ev_manifest, "manifest.jsonl path")->required();
    cmd_eval->add_option("--method", ev_methods,
                         "identity|blur|direct|gt|<name>=<cmd {in} {out}> (repeatable)")
        ->required();
    cmd_eval->add_option("--csv", ev_csv, "CSV report path");
    cmd_eval->add_option("--markdown", ev_markdown, "Markdown report path");
    cmd_eval->add_option("--jobs", ev_jobs, "parallel jobs (default 1)");
    cmd_eval->add_flag("--timings", ev_timings,
                       "record wall-clock runtimes (off keeps reports byte-deterministic)");
    cmd_eval->add_option("--steps", ev_steps, "direct method: iterations");
    cmd_eval->add_option("--seed", ev_seed, "seed for the direct method");
    add_common_flags(cmd_eval, ev_flags);

    // --- toy-rft ---------------------------------------------------------
    std::string toy_curve;
    double toy_target = 0.7, toy_beta = -1, toy_lr = -1;
    int toy_epochs = -1, toy_group = -1, toy_solver = -1, toy_hidden = 16;
    uint64_t toy_seed = 0;
    CommonFlags toy_flags;
    auto* cmd_toy = app.add_subcommand(
        "toy-rft", "reinforcement fine-tuning on the 1-D target-seeking toy");
    cmd_toy->add_option("--target", toy_target, "target point (reward = -squared distance)");
    cmd_toy->add_option("--epochs", toy_epochs, "epochs (default 15)");
    cmd_toy->add_option("--group-size", toy_group, "candidates per group (default 12)");
    cmd_toy->add_option("--beta", toy_beta, "implicit-policy mixing (default 1.0)");
    cmd_toy->add_option("--solver-steps", toy_solver, "sampler steps (default 6)");
    cmd_toy->add_option("--lr", toy_lr, "learning rate (default 0.05)");
    cmd_toy->add_option("--hidden", toy_hidden, "hidden layer width (default 16)");
    cmd_toy->add_option("--seed", toy_seed, "seed");
    cmd_toy->add_option("--curve", toy_curve, "reward curve CSV path")->required();
    add_common_flags(cmd_toy, toy_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (cmd_pyramid->parsed()) {
            const AppConfig cfg = resolve_config(pyr_flags);
            const Image img = load_image(pyr_input);
            const GaussianPyramid pyr = build_pyramid(img, cfg.pyramid);
            fs::create_directories(pyr_outdir);
            for (size_t level = 0; level < pyr.levels.size(); ++level) {
                char name[32];
                std::snprintf(name, sizeof(name), "level_%zu.png", level);
                save_image(pyr.levels[level], (fs::path(pyr_outdir) / name).string());
            }
        } else if (cmd_metric->parsed()) {
            const Image a = load_image(met_a);
            const Image b = load_image(met_b);
            double score = 0.0;
            if (met_name == "ssim") {
                score = ssim(a, b);
            } else if (met_name == "psnr") {
                score = psnr(a, b);
            } else if (met_name == "mad") {
                score = mean_abs_diff(a, b);
            } else if (met_name == "rms") {
                score = rms_diff(a, b);
            } else {
                throw ConfigError("unknown metric '" + met_name + "'");
            }
            std::cout << format_score(score) << "\n";
        } else if (cmd_upsample->parsed()) {
            const AppConfig cfg = resolve_config(up_flags);
            const Image img = load_image(up_input);
            Image out;
            if (up_factor > 0) {
                out = upsample(img, up_factor, cfg.upsampler);
            } else if (up_width > 0 && up_height > 0) {
                out = upsample_to(img, up_height, up_width, cfg.upsampler);
            } else {
                throw ConfigError("give either --factor or both --width and --height");
            }
            save_image(out, up_output);
        } else if (cmd_reward->parsed()) {
            const AppConfig cfg = resolve_config(rew_flags);
            const Image src = load_image(rew_src);
            const Image res = load_image(rew_res);
            const RewardBreakdown r =
                reward_total(src, res, cfg.weights, cfg.pyramid, cfg.upsampler);
            std::cout << breakdown_json(r).dump() << "\n";
        } else if (cmd_filter->parsed()) {
            const AppConfig cfg = resolve_config(fil_flags);
            OptimizeConfig ocfg = cfg.make_optimize_config(fil_seed);
            if (fil_steps > 0) ocfg.steps = fil_steps;
            if (fil_step_size > 0) ocfg.step_size = fil_step_size;
            if (fil_decay1 >= 0) ocfg.moment_decay1 = fil_decay1;
            if (fil_decay2 >= 0) ocfg.moment_decay2 = fil_decay2;
            if (fil_refresh > 0) ocfg.target_refresh_interval = fil_refresh;
            const Image img = load_image(fil_input);
            const FilterResult result = filter_direct(img, ocfg);
            save_image(result.image, fil_output);
            if (!fil_trace.empty()) write_trace_csv(result.trace, fil_trace);
        } else if (cmd_enhance->parsed()) {
            const Image src = load_image(enh_src);
            const Image filtered = load_image(enh_filtered);
            save_image(detail_enhance(src, filtered, enh_strength), enh_output);
        } else if (cmd_synth->parsed()) {
            gen_suite(syn_count, syn_size, syn_seed, syn_outdir);
        } else if (cmd_eval->parsed()) {
            const AppConfig cfg = resolve_config(ev_flags);
            OptimizeConfig direct_cfg = cfg.make_optimize_config(ev_seed);
            if (ev_steps > 0) direct_cfg.steps = ev_steps;
            std::vector<EvalMethod> methods;
            for (const std::string& text : ev_methods) {
                methods.push_back(EvalMethod::parse(text, direct_cfg));
            }
            EvalOptions options;
            options.jobs = ev_jobs;
            options.record_timings = ev_timings;
            options.weights = cfg.weights;
            options.pyramid = cfg.pyramid;
            options.upsampler = cfg.upsampler;
            const PairManifest manifest = PairManifest::load(ev_manifest);
            const std::vector<EvalRow> rows = run_eval(manifest, methods, options);
            if (ev_csv.empty() && ev_markdown.empty()) {
                throw ConfigError("give --csv and/or --markdown");
            }
            if (!ev_csv.empty()) emit_report(rows, ev_csv, ReportFormat::Csv);
            if (!ev_markdown.empty()) emit_report(rows, ev_markdown, ReportFormat::Markdown);
        } else if (cmd_toy->parsed()) {
            const AppConfig cfg = resolve_config(toy_flags);
            PolicyConfig pcfg = cfg.policy;
            if (toy_epochs > 0) pcfg.epochs = toy_epochs;
            if (toy_group > 0) pcfg.group_size = toy_group;
            if (toy_beta > 0) pcfg.beta = toy_beta;
            if (toy_solver > 0) pcfg.solver_steps = toy_solver;
            if (toy_lr > 0) pcfg.learning_rate = toy_lr;

            ToyModel model(1, 1, toy_hidden, splitmix64(toy_seed ^ 0x10de1));
            const std::vector<ToyExample> dataset = {{{toy_target}, {toy_target}}};
            const double target = toy_target;
            const RftResult result = train_toy_rft(
                std::move(model), dataset,
                [target](const std::vector<double>& x) {
                    const double d = x[0] - target;
                    return -d * d;
                },
                pcfg, toy_seed);

            std::ofstream out(toy_curve, std::ios::binary);
            if (!out) throw IoError("cannot write curve: " + toy_curve);
            out << "epoch,mean_reward\n";
            char buf[64];
            for (size_t e = 0; e < result.epoch_mean_reward.size(); ++e) {
                std::snprintf(buf, sizeof(buf), "%zu,%.9f\n", e + 1,
                              result.epoch_mean_reward[e]);
                out << buf;
            }
            if (!out) throw IoError("curve write failed: " + toy_curve);
        }
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const UnsupportedFormatError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const CorruptFileError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
    return kExitOk;
}
