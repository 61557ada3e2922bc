#include "coagstat/flux_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coag {

QuadResult tanh_sinh(const std::function<double(double, double)>& f, double a, double b,
                     double atol, double rtol, int max_level) {
    const double width = b - a;
    const double pi2 = 1.5707963267948966;
    const double tmax = 6.1;  // weights underflow beyond this abscissa

    auto eval_node = [&](double t) -> double {
        double s = pi2 * std::sinh(t);
        // x - a = width / (1 + e^-2s),  b - x = width / (1 + e^2s)
        double da = width / (1.0 + std::exp(-2.0 * s));
        double db = width / (1.0 + std::exp(2.0 * s));
        if (da <= 0.0 || db <= 0.0) return 0.0;
        double c = std::cosh(s);
        double w = width * 0.5 * pi2 * std::cosh(t) / (c * c);
        double v = f(da, db);
        return std::isfinite(v) ? v * w : 0.0;
    };

    double h = 1.0;
    double sum = eval_node(0.0);
    for (double t = h; t <= tmax; t += h) sum += eval_node(t) + eval_node(-t);
    double integral = h * sum;
    double err = std::numeric_limits<double>::infinity();

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0;
        for (double t = h; t <= tmax; t += 2.0 * h) add += eval_node(t) + eval_node(-t);
        double next = 0.5 * integral + h * add;
        err = std::abs(next - integral);
        integral = next;
        double target = std::max({atol, rtol * std::abs(integral), 4e-16 * std::abs(integral)});
        if (level >= 4 && err <= target) break;
    }
    return {integral, err};
}

QuadResult flux_integral(const RayAnsatz& ansatz, const RayKernel& G, double t,
                         double quad_tol) {
    if (!(t > 0)) throw std::invalid_argument("flux surface scale t must be positive");
    if (!(ansatz.C0 > 0)) throw std::invalid_argument("ansatz amplitude C0 must be positive");
    if (ansatz.gamma >= 1.0)
        throw NonIntegrableFlux(
            "flux integral diverges: the large-cluster integral is not integrable for "
            "gamma >= 1 (no non-trivial constant flux solutions)");

    const double q = 0.5 * (ansatz.gamma + 1.0);
    // r = t u, rho = t (1-u) w / (1-w) maps the domain onto (0,1) x (1/2,1):
    //   J = C0^2 t^(1-2q) Int du Int dw u^-q (1-u)^-q w^(-q-1) (1-w)^(q-1) G(r, rho)
    const double inner_rtol = std::min(1e-11, quad_tol * 1e-3);
    double inner_rel_max = 0;

    auto inner = [&](double u, double one_minus_u) {
        double r = t * u;
        QuadResult iw = tanh_sinh(
            [&](double w_minus_half, double one_minus_w) {
                double w = 0.5 + w_minus_half;
                double rho = t * one_minus_u * w / one_minus_w;
                return std::pow(w, -q - 1.0) * std::pow(one_minus_w, q - 1.0) * G(r, rho);
            },
            0.5, 1.0, 0.0, inner_rtol);
        if (iw.value != 0.0)
            inner_rel_max = std::max(inner_rel_max, iw.error / std::abs(iw.value));
        return std::pow(u, -q) * std::pow(one_minus_u, -q) * iw.value;
    };

    QuadResult outer = tanh_sinh(inner, 0.0, 1.0, quad_tol / 4.0, 1e-13);
    double scale = ansatz.C0 * ansatz.C0 * std::pow(t, 1.0 - 2.0 * q);
    QuadResult res;
    res.value = scale * outer.value;
    res.error = scale * (outer.error + 2.0 * inner_rel_max * std::abs(outer.value));
    if (!std::isfinite(res.value) || res.error > std::max(quad_tol, 1e-9 * std::abs(res.value)))
        throw std::runtime_error("flux integral quadrature failed to converge within budget");
    return res;
}

double homogeneity_check(const RayKernel& G, double gamma, const std::vector<double>& lambdas,
                         const std::vector<std::pair<double, double>>& samples) {
    double dev = 0;
    for (auto [r, rho] : samples) {
        double base = G(r, rho);
        if (!(base > 0)) throw std::invalid_argument("ray kernel must be positive on samples");
        for (double l : lambdas) {
            double lhs = G(l * r, l * rho);
            dev = std::max(dev, std::abs(lhs - std::pow(l, gamma) * base) / base);
        }
    }
    return dev;
}

}  // namespace coag
