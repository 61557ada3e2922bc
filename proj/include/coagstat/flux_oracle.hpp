#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace coag {

/// Power-law ray measure C0 r^(-(gamma+1)/2 - d) concentrated along one
/// simplex direction.  Integrability of its pair flux requires gamma < 1 (with
/// the ray kernel bounded at extreme size ratios).
struct RayAnsatz {
    double gamma = 0;
    double C0 = 1.0;
    int d = 1;
};

/// Kernel restricted to the ray: G(r, rho) = K(r theta0, rho theta0).
using RayKernel = std::function<double(double, double)>;

struct NonIntegrableFlux : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadResult {
    double value = 0;
    double error = 0;  // estimated quadrature error
};

/// The pair flux of the ray ansatz across |x| = t:
///   J(t) = C0^2 * Int_0^t r^d dr Int_{t-r}^inf rho^(d-1) drho
///          G(r, rho) / (r^((gamma+1)/2+d) rho^((gamma+1)/2+d)).
/// The singular endpoints are mapped onto a finite box by r = t u,
/// rho = t (1-u) w / (1-w) before adaptive (tanh-sinh) quadrature.
/// For gamma >= 1 the inner integral diverges and NonIntegrableFlux is thrown;
/// quadrature failure to reach quad_tol raises a plain runtime_error.
QuadResult flux_integral(const RayAnsatz& ansatz, const RayKernel& G, double t,
                         double quad_tol);

/// Max over sample pairs and scale factors of
/// |G(l r, l rho) - l^gamma G(r, rho)| / G(r, rho).
double homogeneity_check(const RayKernel& G, double gamma,
                         const std::vector<double>& lambdas,
                         const std::vector<std::pair<double, double>>& samples);

/// One-dimensional tanh-sinh rule on (a, b).  The integrand receives the
/// node's distances from the two endpoints (x - a, b - x), computed without
/// cancellation, so integrable endpoint singularities keep full precision.
/// Refinement stops once the level-to-level change drops below
/// max(atol, rtol * |I|).
QuadResult tanh_sinh(const std::function<double(double, double)>& f, double a, double b,
                     double atol, double rtol = 1e-13, int max_level = 12);

}  // namespace coag
