#include "coagstat/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coag {

double cutoff_ramp(double M, double r) {
    if (!(M > 0)) throw std::invalid_argument("cutoff scale M must be positive");
    if (std::isinf(M)) return 1.0;
    return std::clamp((2.0 * M - r) / M, 0.0, 1.0);
}

double omega_weight(double M, double ra, double rb) {
    return cutoff_ramp(M, ra) * cutoff_ramp(M, rb);
}

double zeta_weight(double M, double r) {
    if (!(M > 0)) throw std::invalid_argument("cutoff scale M must be positive");
    if (std::isinf(M)) return 1.0;
    return std::clamp(2.0 * (M - r) / M, 0.0, 1.0);
}

TruncatedKernel::TruncatedKernel(KernelSpec base, TruncationParams params, unsigned seed)
    : base_(std::move(base)), params_(params), env_(classify(base_, seed)),
      radial_(is_radial(base_)) {
    if (params_.epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
    if (!(params_.M > 0)) throw std::invalid_argument("cutoff scale M must be positive");
}

double TruncatedKernel::regularize(double raw, double norm_sum) const {
    double eps = params_.epsilon;
    if (eps == 0.0) return raw;
    double growth = std::pow(norm_sum, env_.gamma);
    double phi = raw / growth;
    return std::min(growth, 1.0 / eps) * phi + eps;
}

double TruncatedKernel::k_eps(const Composition& a, const Composition& b) const {
    return regularize(eval(base_, a, b), static_cast<double>(a.norm() + b.norm()));
}

double TruncatedKernel::k_eps_norms(double ra, double rb) const {
    return regularize(coag::eval_norms(base_, ra, rb), ra + rb);
}

double TruncatedKernel::operator()(const Composition& a, const Composition& b) const {
    double ra = static_cast<double>(a.norm()), rb = static_cast<double>(b.norm());
    double w = omega_weight(params_.M, ra, rb);
    if (w == 0.0) return 0.0;
    return k_eps(a, b) * w;
}

double TruncatedKernel::eval_parts(std::span<const int> a, std::span<const int> b) const {
    double ra = 0, rb = 0;
    for (int v : a) ra += v;
    for (int v : b) rb += v;
    double w = omega_weight(params_.M, ra, rb);
    if (w == 0.0) return 0.0;
    if (radial_) return regularize(coag::eval_norms(base_, ra, rb), ra + rb) * w;
    std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
    return regularize(eval_sizes(base_, xa, xb), ra + rb) * w;
}

double TruncatedKernel::eval_norms(double ra, double rb) const {
    double w = omega_weight(params_.M, ra, rb);
    if (w == 0.0) return 0.0;
    return k_eps_norms(ra, rb) * w;
}

std::pair<double, double> TruncatedKernel::bounds() const {
    double top = std::isinf(params_.M) ? 4096.0 : params_.M;
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    if (radial_) {
        // omega == 1 on [1, M]^2, so scan the regularized kernel over integer
        // norm pairs (the only values the lattice realizes)
        int m = static_cast<int>(std::floor(top));
        for (int r = 1; r <= m; ++r)
            for (int s = r; s <= m; ++s) {
                double k = k_eps_norms(r, s);
                lo = std::min(lo, k);
                hi = std::max(hi, k);
            }
        return {lo, hi};
    }
    // composition-dependent kernel: use the classified envelope over a norm
    // grid, which already carries its own safety margin
    int m = static_cast<int>(std::floor(top));
    for (int r = 1; r <= m; ++r)
        for (int s = r; s <= m; ++s) {
            double sum = r + s;
            double frac = r / sum;
            double growth = std::pow(sum, env_.gamma);
            double phi = phi_singularity(frac, env_.p);
            double klo = regularize(env_.c1 * growth * phi, sum);
            double khi = regularize(env_.c2 * growth * phi, sum);
            lo = std::min(lo, klo);
            hi = std::max(hi, khi);
        }
    return {lo, hi};
}

}  // namespace coag
