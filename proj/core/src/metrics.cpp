#include "pyrtex/metrics.hpp"

#include <cmath>
#include <limits>

#include "pyrtex/filtering.hpp"

namespace pyrtex {

std::vector<double> SsimConfig::window() const {
    const int n = 2 * window_radius + 1;
    std::vector<double> taps(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = i - window_radius;
        taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += taps[i];
    }
    for (double& w : taps) w /= sum;
    return taps;
}

namespace {

Image elementwise_square(const Image& a) {
    Image out(a.height(), a.width(), a.channels());
    const double* pa = a.data().data();
    double* po = out.data().data();
    const size_t n = a.size();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
    for (long i = 0; i < static_cast<long>(n); ++i) po[i] = pa[i] * pa[i];
    return out;
}

Image elementwise_product(const Image& a, const Image& b) {
    Image out(a.height(), a.width(), a.channels());
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* po = out.data().data();
    const size_t n = a.size();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
    for (long i = 0; i < static_cast<long>(n); ++i) po[i] = pa[i] * pb[i];
    return out;
}

struct SsimFields {
    double value = 0.0;   // mean SSIM index
    Image d_mu;           // ds/dmu_x per pixel
    Image d_second;       // ds/dE[x^2] per pixel
    Image d_cross;        // ds/dE[xy] per pixel
};

// Local index with raw-moment parameterization:
//   A1 = 2 mu_x mu_y + C1     B1 = mu_x^2 + mu_y^2 + C1
//   A2 = 2 sigma_xy + C2      B2 = sigma_x^2 + sigma_y^2 + C2
//   s  = (A1 A2) / (B1 B2)
// with sigma_x^2 = E[x^2] - mu_x^2 and sigma_xy = E[xy] - mu_x mu_y. The
// partials below treat (mu_x, E[x^2], E[xy]) as the independent fields:
//   ds/dmu_x   = 2 (mu_y (A2 - A1) - s mu_x (B2 - B1)) / (B1 B2)
//   ds/dE[x^2] = -s / B2
//   ds/dE[xy]  = 2 A1 / (B1 B2)
SsimFields ssim_fields(const Image& a, const Image& b, const Image& mu_b,
                       const Image& second_b, const SsimConfig& cfg, bool want_grad) {
    const std::vector<double> win = cfg.window();
    const Image mu_a = separable_filter(a, win);
    const Image second_a = separable_filter(elementwise_square(a), win);
    const Image cross = separable_filter(elementwise_product(a, b), win);

    const double c1 = cfg.c1();
    const double c2 = cfg.c2();

    SsimFields f;
    if (want_grad) {
        f.d_mu = Image(a.height(), a.width(), a.channels());
        f.d_second = Image(a.height(), a.width(), a.channels());
        f.d_cross = Image(a.height(), a.width(), a.channels());
    }

    std::vector<double> row_sums(a.height(), 0.0);
    const int row_len = a.width() * a.channels();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(a.size()))
    for (int y = 0; y < a.height(); ++y) {
        const double* pmx = mu_a.row(y);
        const double* pmy = mu_b.row(y);
        const double* psx = second_a.row(y);
        const double* psy = second_b.row(y);
        const double* pxy = cross.row(y);
        double* gm = want_grad ? f.d_mu.row(y) : nullptr;
        double* gs = want_grad ? f.d_second.row(y) : nullptr;
        double* gc = want_grad ? f.d_cross.row(y) : nullptr;
        double acc = 0.0;
        for (int i = 0; i < row_len; ++i) {
            const double mx = pmx[i], my = pmy[i];
            const double var_x = psx[i] - mx * mx;
            const double var_y = psy[i] - my * my;
            const double cov = pxy[i] - mx * my;
            const double a1 = 2.0 * mx * my + c1;
            const double a2 = 2.0 * cov + c2;
            const double b1 = mx * mx + my * my + c1;
            const double b2 = var_x + var_y + c2;
            const double denom = b1 * b2;
            const double s = (a1 * a2) / denom;
            acc += s;
            if (want_grad) {
                gm[i] = 2.0 * (my * (a2 - a1) - s * mx * (b2 - b1)) / denom;
                gs[i] = -s / b2;
                gc[i] = 2.0 * a1 / denom;
            }
        }
        row_sums[y] = acc;
    }
    double total = 0.0;
    for (double s : row_sums) total += s;
    f.value = total / static_cast<double>(a.size());
    return f;
}

// Chain rule through the window blur G (exact adjoint, borders included):
//   dS/da = (1/M) (G^T(d_mu) + 2 a . G^T(d_second) + b . G^T(d_cross))
Image assemble_grad(const Image& a, const Image& b, SsimFields& f, const SsimConfig& cfg) {
    const std::vector<double> win = cfg.window();
    const Image t_mu = separable_filter_adjoint(f.d_mu, win);
    const Image t_second = separable_filter_adjoint(f.d_second, win);
    const Image t_cross = separable_filter_adjoint(f.d_cross, win);

    Image grad(a.height(), a.width(), a.channels());
    const double inv_m = 1.0 / static_cast<double>(a.size());
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    const double* pm = t_mu.data().data();
    const double* ps = t_second.data().data();
    const double* pc = t_cross.data().data();
    double* pg = grad.data().data();
    const size_t n = a.size();
#pragma omp parallel for schedule(static) if (parallel_worthwhile(n))
    for (long i = 0; i < static_cast<long>(n); ++i) {
        pg[i] = inv_m * (pm[i] + 2.0 * pa[i] * ps[i] + pb[i] * pc[i]);
    }
    return grad;
}

}  // namespace

SsimReference make_ssim_reference(Image target, const SsimConfig& cfg) {
    const std::vector<double> win = cfg.window();
    SsimReference ref;
    ref.mu = separable_filter(target, win);
    ref.second_moment = separable_filter(elementwise_square(target), win);
    ref.image = std::move(target);
    return ref;
}

double ssim(const Image& a, const Image& b, const SsimConfig& cfg) {
    require_same_shape(a, b, "ssim");
    const std::vector<double> win = cfg.window();
    const Image mu_b = separable_filter(b, win);
    const Image second_b = separable_filter(elementwise_square(b), win);
    return ssim_fields(a, b, mu_b, second_b, cfg, /*want_grad=*/false).value;
}

Image ssim_grad(const Image& a, const Image& b, const SsimConfig& cfg) {
    require_same_shape(a, b, "ssim_grad");
    const std::vector<double> win = cfg.window();
    const Image mu_b = separable_filter(b, win);
    const Image second_b = separable_filter(elementwise_square(b), win);
    SsimFields f = ssim_fields(a, b, mu_b, second_b, cfg, /*want_grad=*/true);
    return assemble_grad(a, b, f, cfg);
}

double ssim_with_grad(const Image& a, const SsimReference& ref, Image* grad,
                      const SsimConfig& cfg) {
    require_same_shape(a, ref.image, "ssim_with_grad");
    SsimFields f = ssim_fields(a, ref.image, ref.mu, ref.second_moment, cfg, grad != nullptr);
    if (grad) *grad = assemble_grad(a, ref.image, f, cfg);
    return f.value;
}

double mean_abs_diff(const Image& a, const Image& b) {
    require_same_shape(a, b, "mean_abs_diff");
    std::vector<double> row_sums(a.height(), 0.0);
    const int row_len = a.width() * a.channels();
    for (int y = 0; y < a.height(); ++y) {
        const double* pa = a.row(y);
        const double* pb = b.row(y);
        double s = 0.0;
        for (int i = 0; i < row_len; ++i) s += std::abs(pa[i] - pb[i]);
        row_sums[y] = s;
    }
    double total = 0.0;
    for (double s : row_sums) total += s;
    return total / static_cast<double>(a.size());
}

double rms_diff(const Image& a, const Image& b) {
    require_same_shape(a, b, "rms_diff");
    std::vector<double> row_sums(a.height(), 0.0);
    const int row_len = a.width() * a.channels();
    for (int y = 0; y < a.height(); ++y) {
        const double* pa = a.row(y);
        const double* pb = b.row(y);
        double s = 0.0;
        for (int i = 0; i < row_len; ++i) {
            const double d = pa[i] - pb[i];
            s += d * d;
        }
        row_sums[y] = s;
    }
    double total = 0.0;
    for (double s : row_sums) total += s;
    return std::sqrt(total / static_cast<double>(a.size()));
}

double psnr(const Image& a, const Image& b) {
    const double rms = rms_diff(a, b);
    if (rms == 0.0) return std::numeric_limits<double>::infinity();
    return -20.0 * std::log10(rms);
}

}  // namespace pyrtex
