#include "coagstat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace coag {

KernelSpec KernelSpec::constant(double c) {
    KernelSpec s;
    s.family = KernelFamily::Constant;
    s.c = c;
    return s;
}

KernelSpec KernelSpec::free_molecular(std::vector<double> volumes) {
    KernelSpec s;
    s.family = KernelFamily::FreeMolecular;
    s.volumes = std::move(volumes);
    return s;
}

KernelSpec KernelSpec::brownian(std::vector<double> volumes) {
    KernelSpec s;
    s.family = KernelFamily::Brownian;
    s.volumes = std::move(volumes);
    return s;
}

KernelSpec KernelSpec::product_power(double gamma, double lambda) {
    KernelSpec s;
    s.family = KernelFamily::ProductPower;
    s.gamma = gamma;
    s.lambda = lambda;
    return s;
}

KernelSpec KernelSpec::envelope_power(double gamma, double p, double c) {
    KernelSpec s;
    s.family = KernelFamily::EnvelopePower;
    s.gamma = gamma;
    s.p = p;
    s.c = c;
    return s;
}

KernelSpec KernelSpec::tabulated(std::vector<double> norms, std::vector<double> values) {
    KernelSpec s;
    s.family = KernelFamily::Tabulated;
    s.table_norms = std::move(norms);
    s.table_values = std::move(values);
    return s;
}

std::vector<std::string> KernelSpec::validate(int dim) const {
    std::vector<std::string> errs;
    switch (family) {
        case KernelFamily::Constant:
            if (!(c > 0)) errs.push_back("constant kernel rate must be positive");
            break;
        case KernelFamily::FreeMolecular:
        case KernelFamily::Brownian:
            if (static_cast<int>(volumes.size()) != dim)
                errs.push_back("kernel needs one monomer volume per species");
            for (double v : volumes)
                if (!(v > 0)) errs.push_back("monomer volumes must be positive");
            break;
        case KernelFamily::ProductPower:
            if (!std::isfinite(gamma) || !std::isfinite(lambda))
                errs.push_back("product power exponents must be finite");
            break;
        case KernelFamily::EnvelopePower:
            if (!(c > 0)) errs.push_back("envelope power prefactor must be positive");
            if (!std::isfinite(gamma) || !std::isfinite(p))
                errs.push_back("envelope power exponents must be finite");
            break;
        case KernelFamily::Tabulated: {
            if (table_norms.size() < 2) errs.push_back("tabulated kernel needs >= 2 norms");
            if (table_values.size() != table_norms.size() * table_norms.size())
                errs.push_back("tabulated kernel needs a full norms x norms value matrix");
            if (!std::is_sorted(table_norms.begin(), table_norms.end()))
                errs.push_back("tabulated kernel norms must be sorted ascending");
            if (!table_norms.empty() && table_norms.front() > 1.0)
                errs.push_back("tabulated kernel must cover norms down to 1");
            for (double v : table_values)
                if (!(v > 0)) errs.push_back("tabulated kernel values must be positive");
            break;
        }
    }
    if (!std::isfinite(rescale_exponent)) errs.push_back("rescale exponent must be finite");
    return errs;
}

std::vector<std::string> KernelSpec::warnings() const {
    std::vector<std::string> w;
    if (family == KernelFamily::ProductPower &&
        std::max(gamma + lambda, -lambda) > 1.0)
        w.push_back("product power kernel violates the non-gelling guard "
                    "max{gamma+lambda, -lambda} <= 1");
    return w;
}

double phi_singularity(double s, double p) {
    return std::pow(s, -p) * std::pow(1.0 - s, -p);
}

namespace {

double table_lookup(const KernelSpec& spec, double ra, double rb) {
    const auto& g = spec.table_norms;
    const auto& v = spec.table_values;
    const std::size_t n = g.size();
    auto locate = [&](double r) -> std::pair<std::size_t, double> {
        r = std::clamp(r, g.front(), g.back());
        auto it = std::upper_bound(g.begin(), g.end(), r);
        std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - g.begin(), 1), n - 1);
        std::size_t lo = hi - 1;
        double w = (std::log(r) - std::log(g[lo])) / (std::log(g[hi]) - std::log(g[lo]));
        return {lo, w};
    };
    auto [ia, wa] = locate(ra);
    auto [ib, wb] = locate(rb);
    auto lv = [&](std::size_t i, std::size_t j) { return std::log(v[i * n + j]); };
    double l = (1 - wa) * (1 - wb) * lv(ia, ib) + (1 - wa) * wb * lv(ia, ib + 1) +
               wa * (1 - wb) * lv(ia + 1, ib) + wa * wb * lv(ia + 1, ib + 1);
    return std::exp(l);
}

double volume_of(std::span<const double> x, std::span<const double> vols) {
    double v = 0;
    for (std::size_t j = 0; j < x.size(); ++j) v += x[j] * vols[j];
    return v;
}

/// Rate from the two norms and (where needed) the two cluster volumes.
double eval_core(const KernelSpec& spec, double ra, double rb, double Va, double Vb) {
    double k;
    switch (spec.family) {
        case KernelFamily::Constant:
            k = spec.c;
            break;
        case KernelFamily::FreeMolecular: {
            double ca = std::cbrt(Va), cb = std::cbrt(Vb);
            double sum13 = ca + cb;
            k = std::sqrt(1.0 / Va + 1.0 / Vb) * sum13 * sum13;
            break;
        }
        case KernelFamily::Brownian: {
            double ca = std::cbrt(Va), cb = std::cbrt(Vb);
            k = (1.0 / ca + 1.0 / cb) * (ca + cb);
            break;
        }
        case KernelFamily::ProductPower:
            k = std::pow(ra, spec.gamma + spec.lambda) * std::pow(rb, -spec.lambda) +
                std::pow(rb, spec.gamma + spec.lambda) * std::pow(ra, -spec.lambda);
            break;
        case KernelFamily::EnvelopePower:
            // fixed evaluation order keeps the rate exactly symmetric
            k = spec.c * std::pow(ra + rb, spec.gamma) *
                phi_singularity(std::min(ra, rb) / (ra + rb), spec.p);
            break;
        case KernelFamily::Tabulated:
            k = table_lookup(spec, std::min(ra, rb), std::max(ra, rb));
            break;
        default:
            throw std::logic_error("unknown kernel family");
    }
    if (spec.rescale_exponent != 0.0) k *= std::pow(ra * rb, spec.rescale_exponent);
    return k;
}

}  // namespace

double eval_sizes(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel argument dimension mismatch");
    double ra = 0, rb = 0;
    for (double v : x) ra += v;
    for (double v : y) rb += v;
    if (!(ra > 0) || !(rb > 0))
        throw std::invalid_argument("kernel arguments must have positive norm");
    double Va = 0, Vb = 0;
    if (spec.family == KernelFamily::FreeMolecular || spec.family == KernelFamily::Brownian) {
        if (spec.volumes.size() != x.size())
            throw std::invalid_argument("kernel volumes do not match argument dimension");
        Va = volume_of(x, spec.volumes);
        Vb = volume_of(y, spec.volumes);
    }
    return eval_core(spec, ra, rb, Va, Vb);
}

double eval(const KernelSpec& spec, const Composition& a, const Composition& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("kernel argument dimension mismatch");
    if (!a.valid() || !b.valid())
        throw std::invalid_argument("kernel arguments must be valid compositions");
    double ra = static_cast<double>(a.norm()), rb = static_cast<double>(b.norm());
    double Va = 0, Vb = 0;
    if (spec.family == KernelFamily::FreeMolecular || spec.family == KernelFamily::Brownian) {
        if (spec.volumes.size() != static_cast<std::size_t>(a.dim()))
            throw std::invalid_argument("kernel volumes do not match argument dimension");
        for (int j = 0; j < a.dim(); ++j) {
            Va += a.parts[j] * spec.volumes[j];
            Vb += b.parts[j] * spec.volumes[j];
        }
    }
    return eval_core(spec, ra, rb, Va, Vb);
}

bool is_radial(const KernelSpec& spec) {
    if (spec.family == KernelFamily::FreeMolecular || spec.family == KernelFamily::Brownian) {
        for (double v : spec.volumes)
            if (v != spec.volumes.front()) return false;
    }
    return true;
}

double eval_norms(const KernelSpec& spec, double ra, double rb) {
    if (!is_radial(spec)) throw std::logic_error("eval_norms requires a radial kernel");
    double v = spec.volumes.empty() ? 1.0 : spec.volumes.front();
    return eval_core(spec, ra, rb, v * ra, v * rb);
}

namespace {

/// K / ((|a|+|b|)^gamma Phi(s)) for free-molecular / Brownian kernels, as a
/// function of the size fraction s and the per-monomer volumes of the two
/// clusters.  Scale-invariant, so the total size can be fixed.
double envelope_ratio(KernelFamily family, double gamma, double p, double s, double ua,
                      double ub) {
    const double total = 2.0;
    double a = s * total, b = (1.0 - s) * total;
    double Va = ua * a, Vb = ub * b;
    KernelSpec probe;
    probe.family = family;
    double k = eval_core(probe, a, b, Va, Vb);
    return k / (std::pow(total, gamma) * phi_singularity(s, p));
}

Envelope classify_sampled(const KernelSpec& spec, double gamma, double p, unsigned seed) {
    double vmin = *std::min_element(spec.volumes.begin(), spec.volumes.end());
    double vmax = *std::max_element(spec.volumes.begin(), spec.volumes.end());
    std::vector<double> us;
    const int nu = vmin == vmax ? 1 : 7;
    for (int i = 0; i < nu; ++i)
        us.push_back(nu == 1 ? vmin : vmin + (vmax - vmin) * i / (nu - 1));

    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    auto probe = [&](double s, double ua, double ub) {
        double r = envelope_ratio(spec.family, gamma, p, s, ua, ub);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    };
    const int ns = 400;
    for (int i = 0; i < ns; ++i) {
        // log-spaced size fractions from 1e-8 up to 1/2
        double s = std::exp(std::log(1e-8) + (std::log(0.5) - std::log(1e-8)) * i / (ns - 1));
        for (double ua : us)
            for (double ub : us) probe(s, ua, ub);
    }
    if (seed != 0) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> uls(std::log(1e-8), std::log(0.5));
        std::uniform_real_distribution<double> uu(vmin, vmax);
        for (int i = 0; i < 512; ++i) probe(std::exp(uls(rng)), uu(rng), uu(rng));
    }
    if (!(lo > 0) || !std::isfinite(hi))
        throw UnclassifiableKernel("kernel envelope sampling failed to bracket the ratio");
    return {gamma, p, lo / 1.05, hi * 1.05};  // 5% safety margin
}

double fit_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
    double n = lx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Envelope classify_tabulated(const KernelSpec& spec) {
    const auto& g = spec.table_norms;
    const std::size_t n = g.size();
    if (n < 4) throw UnclassifiableKernel("tabulated kernel has too few norms to classify");

    // homogeneity exponent from the diagonal of the upper half of the table
    std::vector<double> lx, ly;
    for (std::size_t i = n / 2; i < n; ++i) {
        lx.push_back(std::log(2.0 * g[i]));
        ly.push_back(std::log(spec.table_values[i * n + i]));
    }
    double gamma = fit_slope(lx, ly);

    // singularity exponent from the first row, where the size ratio diverges
    lx.clear();
    ly.clear();
    for (std::size_t j = n / 2; j < n; ++j) {
        lx.push_back(std::log(g[j]));
        ly.push_back(std::log(spec.table_values[j]));
    }
    double p = fit_slope(lx, ly) - gamma;

    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = g[i] / (g[i] + g[j]);
            double r = spec.table_values[i * n + j] /
                       (std::pow(g[i] + g[j], gamma) * phi_singularity(s, p));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    if (!(lo > 0) || !std::isfinite(hi) || hi / lo > 1e3)
        throw UnclassifiableKernel("tabulated kernel does not fit a power-law envelope");
    return {gamma, p, lo / 1.05, hi * 1.05};
}

}  // namespace

Envelope classify(const KernelSpec& spec, unsigned seed) {
    Envelope env;
    switch (spec.family) {
        case KernelFamily::Constant:
            env = {0.0, 0.0, spec.c, spec.c};
            break;
        case KernelFamily::EnvelopePower:
            env = {spec.gamma, spec.p, spec.c, spec.c};
            break;
        case KernelFamily::ProductPower: {
            // K = (a+b)^gamma [ s^(g+l) (1-s)^(-l) + (1-s)^(g+l) s^(-l) ]; with
            // p = max{lambda, -(gamma+lambda)} the ratio to the envelope reduces
            // to s^q + (1-s)^q with q = |gamma + 2 lambda|.
            double p = std::max(spec.lambda, -(spec.gamma + spec.lambda));
            double q = std::abs(spec.gamma + 2.0 * spec.lambda);
            double ratio_mid = std::pow(2.0, 1.0 - q);
            env = {spec.gamma, p, std::min(1.0, ratio_mid), std::max(1.0, ratio_mid)};
            break;
        }
        case KernelFamily::FreeMolecular:
            env = classify_sampled(spec, 1.0 / 6.0, 0.5, seed);
            break;
        case KernelFamily::Brownian:
            env = classify_sampled(spec, 0.0, 1.0 / 3.0, seed);
            break;
        case KernelFamily::Tabulated:
            env = classify_tabulated(spec);
            break;
        default:
            throw std::logic_error("unknown kernel family");
    }
    if (spec.rescale_exponent != 0.0) {
        env.gamma += 2.0 * spec.rescale_exponent;
        env.p -= spec.rescale_exponent;
    }
    return env;
}

bool existence_predicate(const Envelope& env) { return env.gamma + 2.0 * env.p < 1.0; }

KernelSpec rescale(const KernelSpec& spec, double p) {
    KernelSpec out = spec;
    out.rescale_exponent += p;
    return out;
}

}  // namespace coag
