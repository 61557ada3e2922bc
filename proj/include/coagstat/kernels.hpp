#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coagstat/composition.hpp"

namespace coag {

enum class KernelFamily {
    Constant,       // K = c
    FreeMolecular,  // K = (1/V(a) + 1/V(b))^(1/2) (V(a)^(1/3) + V(b)^(1/3))^2
    Brownian,       // K = (V(a)^(-1/3) + V(b)^(-1/3)) (V(a)^(1/3) + V(b)^(1/3))
    ProductPower,   // K = |a|^(g+l) |b|^(-l) + |b|^(g+l) |a|^(-l)
    EnvelopePower,  // K = c (|a|+|b|)^g Phi_p(|a| / (|a|+|b|))
    Tabulated,      // log-log interpolated table over norm pairs
};

/// Symbolic description of a coagulation kernel.  Cluster volumes scale
/// linearly with monomer counts: V(a) = sum_j a_j v_j.
struct KernelSpec {
    KernelFamily family = KernelFamily::Constant;
    double c = 1.0;                 // Constant / EnvelopePower prefactor
    double gamma = 0.0;             // ProductPower / EnvelopePower
    double lambda = 0.0;            // ProductPower
    double p = 0.0;                 // EnvelopePower
    std::vector<double> volumes;    // FreeMolecular / Brownian, one entry per species
    // Tabulated: values[i*norms.size()+j] = K at norm pair (norms[i], norms[j])
    std::vector<double> table_norms;
    std::vector<double> table_values;

    // Extra |a|^q |b|^q factor; produced by rescale(), zero for plain kernels.
    double rescale_exponent = 0.0;

    static KernelSpec constant(double c);
    static KernelSpec free_molecular(std::vector<double> volumes);
    static KernelSpec brownian(std::vector<double> volumes);
    static KernelSpec product_power(double gamma, double lambda);
    static KernelSpec envelope_power(double gamma, double p, double c = 1.0);
    static KernelSpec tabulated(std::vector<double> norms, std::vector<double> values);

    /// Violated hard invariants (empty if none).
    std::vector<std::string> validate(int dim) const;
    /// Soft warnings, e.g. the non-gelling guard max{gamma+lambda, -lambda} <= 1.
    std::vector<std::string> warnings() const;
};

/// Power-law envelope of a kernel:
///   c1 (|a|+|b|)^gamma Phi(s) <= K(a,b) <= c2 (|a|+|b|)^gamma Phi(s)
/// with Phi(s) = s^-p (1-s)^-p and s = |a| / (|a|+|b|).
struct Envelope {
    double gamma = 0.0;
    double p = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
};

struct UnclassifiableKernel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double phi_singularity(double s, double p);  // s^-p (1-s)^-p

/// Kernel rate for real-valued cluster coordinates (the lattice evaluation is
/// the restriction of this to integer points).
double eval_sizes(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Kernel rate for two compositions.  Symmetric, finite and positive.
double eval(const KernelSpec& spec, const Composition& a, const Composition& b);

/// True if the rate depends on the arguments only through their norms.
bool is_radial(const KernelSpec& spec);

/// Rate as a function of the two norms; valid only for radial kernels.
double eval_norms(const KernelSpec& spec, double ra, double rb);

/// Envelope of a kernel.  Constant, ProductPower and EnvelopePower are
/// classified analytically; FreeMolecular, Brownian and Tabulated by sampling
/// the ratio K / ((|a|+|b|)^gamma Phi) and widening the observed range by 5%.
/// Throws UnclassifiableKernel when sampling fails to produce a sane bracket.
Envelope classify(const KernelSpec& spec, unsigned seed = 0);

/// Existence criterion for stationary injection solutions: gamma + 2p < 1.
bool existence_predicate(const Envelope& env);

/// Kernel with rates multiplied by |a|^p |b|^p.  Classifying the result shifts
/// the envelope from (gamma, p0) to (gamma + 2p, p0 - p) with the same
/// constants.
KernelSpec rescale(const KernelSpec& spec, double p);

}  // namespace coag
