#include "pyrtex/flow.hpp"

#include <cmath>
#include <string>

#include "pyrtex/reward.hpp"
#include "pyrtex/rng.hpp"

namespace pyrtex {

namespace {

void require_same_length(const std::vector<double>& a, const std::vector<double>& b,
                         const char* context) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(context) + ": vector length mismatch (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                             ")");
    }
}

double mean_sq_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

}  // namespace

FlowSample interpolate(const std::vector<double>& x0, const std::vector<double>& x1,
                       double t) {
    require_same_length(x0, x1, "interpolate");
    if (x0.empty()) throw DimensionError("interpolate: empty vectors");
    if (t < 0.0 || t > 1.0) throw ConfigError("interpolate: t must lie in [0,1]");
    FlowSample s;
    s.x0 = x0;
    s.x1 = x1;
    s.t = t;
    s.xt.resize(x0.size());
    s.v.resize(x0.size());
    for (size_t i = 0; i < x0.size(); ++i) {
        s.xt[i] = (1.0 - t) * x0[i] + t * x1[i];
        s.v[i] = x1[i] - x0[i];
    }
    return s;
}

double fm_loss(const std::vector<double>& v_pred, const std::vector<double>& v_target) {
    require_same_length(v_pred, v_target, "fm_loss");
    if (v_pred.empty()) throw DimensionError("fm_loss: empty vectors");
    return mean_sq_diff(v_pred, v_target);
}

ImplicitPolicies implicit_policies(const std::vector<double>& v_old,
                                   const std::vector<double>& v_theta, double beta) {
    require_same_length(v_old, v_theta, "implicit_policies");
    ImplicitPolicies p;
    p.positive.resize(v_old.size());
    p.negative.resize(v_old.size());
    for (size_t i = 0; i < v_old.size(); ++i) {
        p.positive[i] = (1.0 - beta) * v_old[i] + beta * v_theta[i];
        p.negative[i] = (1.0 + beta) * v_old[i] - beta * v_theta[i];
    }
    return p;
}

double nft_loss(const std::vector<double>& v_plus, const std::vector<double>& v_minus,
                const std::vector<double>& v_target, double r) {
    require_same_length(v_plus, v_target, "nft_loss");
    require_same_length(v_minus, v_target, "nft_loss");
    if (r < 0.0 || r > 1.0) throw ConfigError("nft_loss: r must lie in [0,1]");
    return r * mean_sq_diff(v_plus, v_target) + (1.0 - r) * mean_sq_diff(v_minus, v_target);
}

void PolicyConfig::validate() const {
    if (beta <= 0.0) throw ConfigError("policy: beta must be positive");
    if (group_size < 2) throw ConfigError("policy: group size must be >= 2");
    if (epochs < 1) throw ConfigError("policy: epochs must be >= 1");
    if (solver_steps < 1) throw ConfigError("policy: solver steps must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("policy: learning rate must be positive");
}

ToyModel::ToyModel(int data_dim, int cond_dim, int hidden_dim, uint64_t seed)
    : data_dim_(data_dim),
      cond_dim_(cond_dim),
      hidden_dim_(hidden_dim),
      input_dim_(data_dim + 1 + cond_dim) {
    if (data_dim < 1 || cond_dim < 0 || hidden_dim < 1) {
        throw ConfigError("ToyModel: dims must be positive (cond may be 0)");
    }
    params_.resize(static_cast<size_t>(hidden_dim_) * input_dim_ + hidden_dim_ +
                   static_cast<size_t>(data_dim_) * hidden_dim_ + data_dim_);
    Rng rng(seed);
    const double w1_scale = 1.0 / std::sqrt(static_cast<double>(input_dim_));
    const double w2_scale = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
    size_t i = 0;
    for (; i < static_cast<size_t>(hidden_dim_) * input_dim_; ++i) {
        params_[i] = w1_scale * rng.normal();
    }
    for (size_t k = 0; k < static_cast<size_t>(hidden_dim_); ++k) params_[i++] = 0.0;
    for (size_t k = 0; k < static_cast<size_t>(data_dim_) * hidden_dim_; ++k) {
        params_[i++] = w2_scale * rng.normal();
    }
    for (size_t k = 0; k < static_cast<size_t>(data_dim_); ++k) params_[i++] = 0.0;
}

std::vector<double> ToyModel::forward(const std::vector<double>& x, double t,
                                      const std::vector<double>& c) const {
    if (static_cast<int>(x.size()) != data_dim_ || static_cast<int>(c.size()) != cond_dim_) {
        throw DimensionError("ToyModel::forward: input dims do not match the model");
    }
    std::vector<double> in(input_dim_);
    for (int i = 0; i < data_dim_; ++i) in[i] = x[i];
    in[data_dim_] = t;
    for (int i = 0; i < cond_dim_; ++i) in[data_dim_ + 1 + i] = c[i];

    std::vector<double> v(data_dim_, 0.0);
    std::vector<double> h(hidden_dim_);
    for (int j = 0; j < hidden_dim_; ++j) {
        double acc = b1()[j];
        const double* row = w1() + static_cast<size_t>(j) * input_dim_;
        for (int i = 0; i < input_dim_; ++i) acc += row[i] * in[i];
        h[j] = std::tanh(acc);
    }
    for (int o = 0; o < data_dim_; ++o) {
        double acc = b2()[o];
        const double* row = w2() + static_cast<size_t>(o) * hidden_dim_;
        for (int j = 0; j < hidden_dim_; ++j) acc += row[j] * h[j];
        v[o] = acc;
    }
    return v;
}

std::vector<double> ToyModel::backward(const std::vector<double>& x, double t,
                                       const std::vector<double>& c,
                                       const std::vector<double>& dloss_dv) const {
    if (static_cast<int>(dloss_dv.size()) != data_dim_) {
        throw DimensionError("ToyModel::backward: upstream gradient has wrong length");
    }
    std::vector<double> in(input_dim_);
    for (int i = 0; i < data_dim_; ++i) in[i] = x[i];
    in[data_dim_] = t;
    for (int i = 0; i < cond_dim_; ++i) in[data_dim_ + 1 + i] = c[i];

    // forward pass, keeping hidden activations
    std::vector<double> h(hidden_dim_);
    for (int j = 0; j < hidden_dim_; ++j) {
        double acc = b1()[j];
        const double* row = w1() + static_cast<size_t>(j) * input_dim_;
        for (int i = 0; i < input_dim_; ++i) acc += row[i] * in[i];
        h[j] = std::tanh(acc);
    }

    std::vector<double> grad(params_.size(), 0.0);
    double* gw1 = grad.data();
    double* gb1 = grad.data() + static_cast<size_t>(hidden_dim_) * input_dim_;
    double* gw2 = gb1 + hidden_dim_;
    double* gb2 = gw2 + static_cast<size_t>(data_dim_) * hidden_dim_;

    std::vector<double> dh(hidden_dim_, 0.0);
    for (int o = 0; o < data_dim_; ++o) {
        const double g = dloss_dv[o];
        gb2[o] = g;
        const double* row = w2() + static_cast<size_t>(o) * hidden_dim_;
        double* grow = gw2 + static_cast<size_t>(o) * hidden_dim_;
        for (int j = 0; j < hidden_dim_; ++j) {
            grow[j] = g * h[j];
            dh[j] += g * row[j];
        }
    }
    for (int j = 0; j < hidden_dim_; ++j) {
        const double dpre = dh[j] * (1.0 - h[j] * h[j]);
        gb1[j] = dpre;
        double* grow = gw1 + static_cast<size_t>(j) * input_dim_;
        for (int i = 0; i < input_dim_; ++i) grow[i] = dpre * in[i];
    }
    return grad;
}

void ToyModel::apply_update(const std::vector<double>& grad, double scale) {
    if (grad.size() != params_.size()) {
        throw DimensionError("ToyModel::apply_update: gradient has wrong length");
    }
    for (size_t i = 0; i < params_.size(); ++i) params_[i] -= scale * grad[i];
}

std::vector<double> sample_euler(const ToyModel& model, const std::vector<double>& x1,
                                 const std::vector<double>& c, int steps, uint64_t) {
    if (steps < 1) throw ConfigError("sample_euler: steps must be >= 1");
    std::vector<double> x = x1;
    const double dt = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = 1.0 - k * dt;
        const std::vector<double> v = model.forward(x, t, c);
        for (size_t i = 0; i < x.size(); ++i) {
            x[i] -= dt * v[i];
            if (!std::isfinite(x[i])) {
                throw NumericError("sample_euler: non-finite state at step " +
                                   std::to_string(k));
            }
        }
    }
    return x;
}

RftResult train_toy_rft(ToyModel model, const std::vector<ToyExample>& dataset,
                        const std::function<double(const std::vector<double>&)>& reward_fn,
                        const PolicyConfig& cfg, uint64_t seed) {
    cfg.validate();
    if (dataset.empty()) throw ConfigError("train_toy_rft: dataset is empty");
    for (const auto& ex : dataset) {
        if (static_cast<int>(ex.data.size()) != model.data_dim() ||
            static_cast<int>(ex.conditioning.size()) != model.cond_dim()) {
            throw DimensionError("train_toy_rft: example dims do not match the model");
        }
    }

    Rng rng(seed);
    const int dim = model.data_dim();

    RftResult out{std::move(model), {}};
    out.epoch_mean_reward.reserve(cfg.epochs);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const ToyModel old_policy = out.model;  // frozen for this epoch
        double reward_sum = 0.0;
        size_t reward_count = 0;

        for (const auto& example : dataset) {
            const std::vector<double>& cond = example.conditioning;

            // sample a group of candidates from the frozen policy
            std::vector<std::vector<double>> candidates(cfg.group_size);
            std::vector<double> raw_rewards(cfg.group_size);
            for (int g = 0; g < cfg.group_size; ++g) {
                std::vector<double> noise(dim);
                for (double& z : noise) z = rng.normal();
                candidates[g] = sample_euler(old_policy, noise, cond, cfg.solver_steps);
                raw_rewards[g] = reward_fn(candidates[g]);
                reward_sum += raw_rewards[g];
                ++reward_count;
            }
            const PolicyGroup group = normalize_group(raw_rewards);

            // one SGD step per candidate through the implicit policies
            for (int g = 0; g < cfg.group_size; ++g) {
                const double r = group.normalized[g];
                const double t = rng.uniform();
                std::vector<double> noise(dim);
                for (double& z : noise) z = rng.normal();
                const FlowSample fs = interpolate(candidates[g], noise, t);

                const std::vector<double> v_old = old_policy.forward(fs.xt, t, cond);
                const std::vector<double> v_theta = out.model.forward(fs.xt, t, cond);
                const ImplicitPolicies pol = implicit_policies(v_old, v_theta, cfg.beta);

                const double loss = nft_loss(pol.positive, pol.negative, fs.v, r);
                if (!std::isfinite(loss)) {
                    throw NumericError("train_toy_rft: loss diverged at epoch " +
                                       std::to_string(epoch + 1));
                }

                // dL/dv_theta = (2 beta / dim) * (r (v+ - v) - (1-r) (v- - v))
                std::vector<double> dloss_dv(dim);
                for (int i = 0; i < dim; ++i) {
                    dloss_dv[i] = (2.0 * cfg.beta / dim) *
                                  (r * (pol.positive[i] - fs.v[i]) -
                                   (1.0 - r) * (pol.negative[i] - fs.v[i]));
                }
                const std::vector<double> grad =
                    out.model.backward(fs.xt, t, cond, dloss_dv);
                out.model.apply_update(grad, cfg.learning_rate);
            }
        }
        out.epoch_mean_reward.push_back(reward_sum / static_cast<double>(reward_count));
    }
    return out;
}

}  // namespace pyrtex
