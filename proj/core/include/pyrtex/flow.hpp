#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pyrtex/errors.hpp"

namespace pyrtex {

/// One draw of the straight-line interpolation between data x0 and noise x1:
/// xt = (1-t) x0 + t x1, with target velocity v = x1 - x0.
struct FlowSample {
    std::vector<double> x0;
    std::vector<double> x1;
    double t = 0.0;
    std::vector<double> xt;
    std::vector<double> v;
};

FlowSample interpolate(const std::vector<double>& x0, const std::vector<double>& x1,
                       double t);

/// Mean squared difference between predicted and target velocity.
double fm_loss(const std::vector<double>& v_pred, const std::vector<double>& v_target);

/// Positive and negative implicit policies, beta-mixes of old and trainable
/// velocity fields:
///   v_plus  = (1-beta) v_old + beta v_theta
///   v_minus = (1+beta) v_old - beta v_theta
/// so v_plus + v_minus == 2 v_old identically.
struct ImplicitPolicies {
    std::vector<double> positive;
    std::vector<double> negative;
};

ImplicitPolicies implicit_policies(const std::vector<double>& v_old,
                                   const std::vector<double>& v_theta, double beta);

/// Reward-gated policy loss: r |v_plus - v_target|^2 + (1-r) |v_minus - v_target|^2
/// with per-entry-mean norms (same scaling as fm_loss). r must be in [0,1].
double nft_loss(const std::vector<double>& v_plus, const std::vector<double>& v_minus,
                const std::vector<double>& v_target, double r);

/// Toy trainer settings. Defaults mirror the reference recipe: groups of 12
/// candidates, 15 epochs, 6 solver steps. The learning rate is plain-SGD
/// scale for the two-layer toy model.
struct PolicyConfig {
    double beta = 1.0;
    int group_size = 12;
    int epochs = 15;
    int solver_steps = 6;
    double learning_rate = 0.05;

    void validate() const;
};

/// Two-layer tanh perceptron mapping (x, t, conditioning) -> velocity.
/// Parameters live in one flat vector so finite-difference checks and SGD
/// updates stay trivial.
class ToyModel {
public:
    ToyModel(int data_dim, int cond_dim, int hidden_dim, uint64_t seed);

    int data_dim() const { return data_dim_; }
    int cond_dim() const { return cond_dim_; }
    int hidden_dim() const { return hidden_dim_; }

    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

    /// Deterministic forward pass. Throws DimensionError on bad input sizes.
    std::vector<double> forward(const std::vector<double>& x, double t,
                                const std::vector<double>& c) const;

    /// Gradient of a scalar loss w.r.t. all parameters, given dLoss/dv.
    /// Same layout as parameters().
    std::vector<double> backward(const std::vector<double>& x, double t,
                                 const std::vector<double>& c,
                                 const std::vector<double>& dloss_dv) const;

    void apply_update(const std::vector<double>& grad, double scale);

private:
    int data_dim_;
    int cond_dim_;
    int hidden_dim_;
    int input_dim_;           // data_dim + 1 (t) + cond_dim
    std::vector<double> params_;  // [W1 | b1 | W2 | b2]

    const double* w1() const { return params_.data(); }
    const double* b1() const { return params_.data() + hidden_dim_ * input_dim_; }
    const double* w2() const { return b1() + hidden_dim_; }
    const double* b2() const { return w2() + data_dim_ * hidden_dim_; }
};

/// Integrate dx/dt = v(x, t, c) from t=1 down to t=0 with uniform explicit
/// Euler steps: x <- x - dt * v(x, t, c). Deterministic; the seed parameter
/// is reserved for stochastic solvers and unused here. Throws NumericError
/// if the model emits non-finite velocities.
std::vector<double> sample_euler(const ToyModel& model, const std::vector<double>& x1,
                                 const std::vector<double>& c, int steps,
                                 uint64_t seed = 0);

/// One conditioning/data pair of the toy corpus. Training only consumes the
/// conditioning; data fixes the sample dimension and is kept for reward
/// functions that want a reference.
struct ToyExample {
    std::vector<double> conditioning;
    std::vector<double> data;
};

struct RftResult {
    ToyModel model;
    std::vector<double> epoch_mean_reward;  // mean raw reward of each epoch's samples
};

/// Group-based reinforcement fine-tuning on the toy model.
///
/// Per epoch the current model is snapshotted as the frozen old policy. For
/// every conditioning, group_size candidates are sampled from the snapshot,
/// scored with reward_fn and normalized group-relative; each candidate then
/// contributes one SGD step on the policy loss through the implicit
/// positive/negative policies. Returns the trained model plus the per-epoch
/// mean raw reward. Throws NumericError naming the epoch if the loss
/// diverges.
RftResult train_toy_rft(ToyModel model, const std::vector<ToyExample>& dataset,
                        const std::function<double(const std::vector<double>&)>& reward_fn,
                        const PolicyConfig& cfg, uint64_t seed);

}  // namespace pyrtex
