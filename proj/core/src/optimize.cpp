#include "pyrtex/optimize.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "pyrtex/filtering.hpp"
#include "pyrtex/metrics.hpp"
#include "pyrtex/pyramid.hpp"
#include "pyrtex/upsample.hpp"

namespace pyrtex {

void OptimizeConfig::validate() const {
    if (steps < 1) throw ConfigError("optimize: steps must be >= 1");
    if (step_size <= 0.0) throw ConfigError("optimize: step size must be positive");
    if (target_refresh_interval < 1) {
        throw ConfigError("optimize: target refresh interval must be >= 1");
    }
    if (moment_decay1 < 0.0 || moment_decay1 >= 1.0 || moment_decay2 < 0.0 ||
        moment_decay2 >= 1.0) {
        throw ConfigError("optimize: moment decays must lie in [0, 1)");
    }
    weights.validate();
    pyramid.validate();
}

namespace {

struct GradParts {
    Image grad;                // d total / d result with frozen texture target
    RewardBreakdown breakdown; // components measured against the frozen target
};

// Shared by grad_reward_total and the optimizer loop. The texture component
// is SSIM against the frozen target (cached windowed stats), the structure
// component backpropagates through the candidate's own pyramid via the
// reduce adjoint chain, and fidelity is the RMS derivative.
GradParts grad_with_breakdown(const Image& source, const Image& result,
                              const SsimReference& frozen_target,
                              const GaussianPyramid& source_pyramid,
                              const RewardWeights& weights, const PyramidConfig& pyr) {
    GradParts out;
    out.grad = Image(result.height(), result.width(), result.channels(), 0.0);
    double* g = out.grad.data().data();
    const size_t n = result.size();

    // texture: w1 * d ssim(result, target) / d result
    Image texture_grad;
    out.breakdown.texture =
        ssim_with_grad(result, frozen_target, weights.texture != 0.0 ? &texture_grad : nullptr);
    if (weights.texture != 0.0) {
        const double* tg = texture_grad.data().data();
        const double w = weights.texture;
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
        for (long i = 0; i < static_cast<long>(n); ++i) g[i] += w * tg[i];
    }

    // structure: w2 * (-1/Mc) * adjoint-chain(sign(Gres_N - Gsrc_N))
    const GaussianPyramid res_pyramid = build_pyramid(result, pyr);
    const Image& coarse_res = res_pyramid.coarsest();
    const Image& coarse_src = source_pyramid.coarsest();
    {
        double abs_sum = 0.0;
        Image sign_field(coarse_res.height(), coarse_res.width(), coarse_res.channels());
        double* sf = sign_field.data().data();
        const double* cr = coarse_res.data().data();
        const double* cs = coarse_src.data().data();
        const size_t mc = coarse_res.size();
        for (size_t i = 0; i < mc; ++i) {
            const double d = cr[i] - cs[i];
            abs_sum += std::abs(d);
            // subgradient of |.| at 0 chosen as 0
            sf[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        }
        out.breakdown.structure = 1.0 - abs_sum / static_cast<double>(mc);

        if (weights.structure != 0.0) {
            Image chain = std::move(sign_field);
            for (int level = res_pyramid.depth(); level >= 1; --level) {
                const Image& fine = res_pyramid.levels[level - 1];
                chain = reduce_adjoint(chain, fine.height(), fine.width(), pyr);
            }
            const double w = -weights.structure / static_cast<double>(mc);
            const double* ch = chain.data().data();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
            for (long i = 0; i < static_cast<long>(n); ++i) g[i] += w * ch[i];
        }
    }

    // fidelity: w3 * (source - result) / (M * rms)
    {
        const double rms = rms_diff(source, result);
        out.breakdown.fidelity = 1.0 - rms;
        if (weights.fidelity != 0.0 && rms > 0.0) {
            const double w = weights.fidelity / (rms * static_cast<double>(n));
            const double* ps = source.data().data();
            const double* pr = result.data().data();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
            for (long i = 0; i < static_cast<long>(n); ++i) g[i] += w * (ps[i] - pr[i]);
        }
    }

    out.breakdown.total = weights.texture * out.breakdown.texture +
                          weights.structure * out.breakdown.structure +
                          weights.fidelity * out.breakdown.fidelity;
    return out;
}

SsimReference refresh_texture_target(const Image& result, const PyramidConfig& pyr,
                                     const UpsamplerKind& kind) {
    const GaussianPyramid pyramid = build_pyramid(result, pyr);
    return make_ssim_reference(
        upsample_to(pyramid.coarsest(), result.height(), result.width(), kind));
}

bool all_finite(const Image& img) {
    for (double v : img.data()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

Image grad_reward_total(const Image& source, const Image& result,
                        const Image& frozen_texture_target, const RewardWeights& weights,
                        const PyramidConfig& pyr) {
    require_same_shape(source, result, "grad_reward_total");
    require_same_shape(result, frozen_texture_target, "grad_reward_total(target)");
    weights.validate();
    const SsimReference ref = make_ssim_reference(frozen_texture_target);
    const GaussianPyramid source_pyramid = build_pyramid(source, pyr);
    return grad_with_breakdown(source, result, ref, source_pyramid, weights, pyr).grad;
}

FilterResult filter_direct(const Image& source, const OptimizeConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const GaussianPyramid source_pyramid = build_pyramid(source, cfg.pyramid);
    const size_t n = source.size();

    Image result = source;
    Image best = source;
    RewardBreakdown best_score =
        reward_total(source, source, cfg.weights, cfg.pyramid, cfg.upsampler);

    // Candidates are checkpointed on the true reward at every target refresh,
    // so the returned image can never score below the source.
    auto consider = [&](const Image& candidate, const RewardBreakdown& score) {
        if (score.total > best_score.total) {
            best_score = score;
            best = candidate;
        }
    };

    std::vector<double> m(n, 0.0), v(n, 0.0);
    const double b1 = cfg.moment_decay1;
    const double b2 = cfg.moment_decay2;
    const double eps = 1e-8;

    SsimReference target;
    FilterResult out;
    out.trace.iterations.reserve(cfg.steps);

    for (int step = 0; step < cfg.steps; ++step) {
        const bool refreshed = step % cfg.target_refresh_interval == 0;
        if (refreshed) {
            target = refresh_texture_target(result, cfg.pyramid, cfg.upsampler);
        }

        GradParts parts = grad_with_breakdown(source, result, target, source_pyramid,
                                              cfg.weights, cfg.pyramid);
        if (!all_finite(parts.grad)) {
            throw NumericError("filter_direct: non-finite gradient at iteration " +
                               std::to_string(step));
        }
        // right after a refresh the frozen target is the candidate's own
        // upsampled coarsest level, so the breakdown is the true reward
        if (refreshed) consider(result, parts.breakdown);

        const double bc1 = 1.0 - std::pow(b1, step + 1);
        const double bc2 = 1.0 - std::pow(b2, step + 1);
        const double* g = parts.grad.data().data();
        double* r = result.data().data();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
        for (long i = 0; i < static_cast<long>(n); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            // ascent with projection back into [0,1]
            const double next = r[i] + cfg.step_size * mhat / (std::sqrt(vhat) + eps);
            r[i] = next < 0.0 ? 0.0 : (next > 1.0 ? 1.0 : next);
        }

        out.trace.iterations.push_back(parts.breakdown);
    }
    consider(result, reward_total(source, result, cfg.weights, cfg.pyramid, cfg.upsampler));

    out.image = std::move(best);
    out.trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

Image detail_enhance(const Image& source, const Image& filtered, double strength) {
    require_same_shape(source, filtered, "detail_enhance");
    if (strength < 0.0) throw ConfigError("detail_enhance: strength must be >= 0");
    Image out(source.height(), source.width(), source.channels());
    const double* ps = source.data().data();
    const double* pf = filtered.data().data();
    double* po = out.data().data();
    const size_t n = source.size();
    // (1-s)*filtered + s*source is exact at the strength 0 and 1 endpoints
    for (size_t i = 0; i < n; ++i) {
        const double v = (1.0 - strength) * pf[i] + strength * ps[i];
        po[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
    return out;
}

}  // namespace pyrtex
