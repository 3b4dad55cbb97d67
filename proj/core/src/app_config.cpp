#include "pyrtex/app_config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "pyrtex/errors.hpp"

using nlohmann::json;

namespace pyrtex {

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown config key '" + where + key + "'");
    }
}

}  // namespace

void AppConfig::apply_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad JSON in config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object: " + path);

    try {
        reject_unknown_keys(j, {"weights", "pyramid", "upsampler", "optimize", "policy"}, "");
        if (j.contains("weights")) {
            const json& w = j["weights"];
            reject_unknown_keys(w, {"texture", "structure", "fidelity"}, "weights.");
            weights.texture = w.value("texture", weights.texture);
            weights.structure = w.value("structure", weights.structure);
            weights.fidelity = w.value("fidelity", weights.fidelity);
        }
        if (j.contains("pyramid")) {
            const json& p = j["pyramid"];
            reject_unknown_keys(p, {"depth"}, "pyramid.");
            pyramid.depth = p.value("depth", pyramid.depth);
        }
        if (j.contains("upsampler")) {
            upsampler = UpsamplerKind::parse(j["upsampler"].get<std::string>());
        }
        if (j.contains("optimize")) {
            const json& o = j["optimize"];
            reject_unknown_keys(
                o, {"steps", "step_size", "moment_decay1", "moment_decay2", "refresh_interval"},
                "optimize.");
            optimize.steps = o.value("steps", optimize.steps);
            optimize.step_size = o.value("step_size", optimize.step_size);
            optimize.moment_decay1 = o.value("moment_decay1", optimize.moment_decay1);
            optimize.moment_decay2 = o.value("moment_decay2", optimize.moment_decay2);
            optimize.refresh_interval = o.value("refresh_interval", optimize.refresh_interval);
        }
        if (j.contains("policy")) {
            const json& p = j["policy"];
            reject_unknown_keys(
                p, {"beta", "group_size", "epochs", "solver_steps", "learning_rate"},
                "policy.");
            policy.beta = p.value("beta", policy.beta);
            policy.group_size = p.value("group_size", policy.group_size);
            policy.epochs = p.value("epochs", policy.epochs);
            policy.solver_steps = p.value("solver_steps", policy.solver_steps);
            policy.learning_rate = p.value("learning_rate", policy.learning_rate);
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad config value in " + path + ": " + e.what());
    }
    validate();
}

OptimizeConfig AppConfig::make_optimize_config(uint64_t seed) const {
    OptimizeConfig cfg;
    cfg.steps = optimize.steps;
    cfg.step_size = optimize.step_size;
    cfg.moment_decay1 = optimize.moment_decay1;
    cfg.moment_decay2 = optimize.moment_decay2;
    cfg.target_refresh_interval = optimize.refresh_interval;
    cfg.weights = weights;
    cfg.pyramid = pyramid;
    cfg.upsampler = upsampler;
    cfg.seed = seed;
    return cfg;
}

std::string AppConfig::to_json_string() const {
    const json j{
        {"weights",
         {{"texture", weights.texture},
          {"structure", weights.structure},
          {"fidelity", weights.fidelity}}},
        {"pyramid", {{"depth", pyramid.depth}}},
        {"upsampler", upsampler.name()},
        {"optimize",
         {{"steps", optimize.steps},
          {"step_size", optimize.step_size},
          {"moment_decay1", optimize.moment_decay1},
          {"moment_decay2", optimize.moment_decay2},
          {"refresh_interval", optimize.refresh_interval}}},
        {"policy",
         {{"beta", policy.beta},
          {"group_size", policy.group_size},
          {"epochs", policy.epochs},
          {"solver_steps", policy.solver_steps},
          {"learning_rate", policy.learning_rate}}}};
    return j.dump(2);
}

void AppConfig::validate() const {
    weights.validate();
    pyramid.validate();
    policy.validate();
    make_optimize_config().validate();
}

}  // namespace pyrtex
