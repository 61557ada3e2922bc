#pragma once

#include <utility>

#include "coagstat/kernels.hpp"

namespace coag {

/// Truncation parameters: epsilon bounds the kernel away from 0 and infinity,
/// M sets the support cutoff.  A nontrivial source with reach L requires
/// M > 2L.  epsilon = 0 is allowed because every built-in kernel is bounded
/// above and below on the compact box [1, 2M]^2.
struct TruncationParams {
    double epsilon = 0.0;
    double M = 0.0;
    double L = 1.0;
};

/// min(1, max(0, (2M - r) / M)): 1 on [0, M], linear ramp to 0 at 2M.
double cutoff_ramp(double M, double r);

/// Support cutoff weight on norms: 1 on [1, M]^2, 0 when either norm
/// reaches 2M, product of linear ramps in between.
double omega_weight(double M, double ra, double rb);

/// Gain deactivation weight: 1 for r <= M/2, linear ramp to 0 at r = M.
double zeta_weight(double M, double r);

/// A kernel made bounded and compactly supported:
///   K_eps(a,b)  = min{(|a|+|b|)^gamma, 1/eps} * K(a,b)/(|a|+|b|)^gamma + eps
///   K_epsM(a,b) = K_eps(a,b) * omega_M(|a|, |b|)
/// where gamma is the classified homogeneity of the base kernel.  M may be
/// +infinity, in which case the kernel is only regularized, not cut off.
class TruncatedKernel {
public:
    TruncatedKernel(KernelSpec base, TruncationParams params, unsigned classify_seed = 0);

    double k_eps(const Composition& a, const Composition& b) const;
    double operator()(const Composition& a, const Composition& b) const;
    double eval_parts(std::span<const int> a, std::span<const int> b) const;

    /// Radial path (see is_radial); used to build norm-pair lookup tables.
    double eval_norms(double ra, double rb) const;
    double k_eps_norms(double ra, double rb) const;

    double zeta(const Composition& a) const { return zeta_weight(params_.M, a.norm()); }
    double zeta_norm(double r) const { return zeta_weight(params_.M, r); }

    /// Bounds a1 <= K_epsM <= a2 valid on [1, M]^2.  Exact over integer norm
    /// pairs for radial kernels; for composition-dependent kernels sampled over
    /// per-monomer volume extremes and widened by 5%.
    std::pair<double, double> bounds() const;

    bool radial() const { return radial_; }
    const KernelSpec& base() const { return base_; }
    const TruncationParams& params() const { return params_; }
    const Envelope& envelope() const { return env_; }

private:
    KernelSpec base_;
    TruncationParams params_;
    Envelope env_;
    bool radial_;

    double regularize(double raw, double norm_sum) const;
};

}  // namespace coag
