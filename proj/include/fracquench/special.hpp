#pragma once

// Scalar special functions: gamma, the convolution kernel g_alpha,
// Mittag-Leffler functions E_{alpha,beta}, the Wright function, and the
// discrete Caputo / Riemann-Liouville operators on uniform grids.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>

namespace fq {

/// Euler gamma function. Throws std::domain_error at non-positive integers.
double gamma_fn(double x);

/// 1/Gamma(x), continued by 0 at the poles (and for x large enough that
/// Gamma overflows).
double reciprocal_gamma(double x);

/// g_alpha(t) = t^{alpha-1}/Gamma(alpha) for t > 0, 0 for t <= 0,
/// identically 0 when alpha = 0.
double g_kernel(double alpha, double t);

/// Regime-selection parameters for Mittag-Leffler evaluation.
struct MLRegimeConfig {
    double series_radius = 1.0;      // power series for |z| <= r0
    double asymptotic_radius = 10.0; // algebraic expansion candidate for |z| >= r1
    int asymptotic_terms = 10;       // terms kept in the remainder series
    int quad_nodes = 64;             // trapezoid nodes on the Hankel parabola

    void validate() const;
};

/// Evaluates E_{alpha,beta}(z) for real z with precomputed contour data,
/// amortizing the per-(alpha,beta) setup over many z values. Immutable
/// after construction; safe to share across threads.
class MittagLefflerEvaluator {
public:
    MittagLefflerEvaluator(double alpha, double beta, MLRegimeConfig cfg = {});

    double operator()(double z) const;

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    double series(double z) const;
    double contour(double z) const;
    // Returns the truncated remainder expansion and its relative error
    // estimate (first neglected / last kept term over the partial sum).
    double asymptotic(double z, double& rel_est) const;

    double alpha_ = 0.5;
    double beta_ = 1.0;
    MLRegimeConfig cfg_;
    // Per-node contour data: weight_k = h*(mu/pi)*e^{lam_k} lam_k^{a-b} (1+i u_k),
    // pole_k = lam_k^alpha. E = Re sum weight_k / (pole_k - z).
    Eigen::ArrayXcd contour_weight_;
    Eigen::ArrayXcd contour_pow_;
};

/// One-shot E_{alpha,beta}(z). Preconditions: 0 < alpha <= 1, beta > 0.
double mittag_leffler(double alpha, double beta, double z, const MLRegimeConfig& cfg = {});

/// Exact kernel moment  int_{t_lo}^{t_hi} tau^{alpha-1} E_{alpha,alpha}(-mu tau^alpha) dtau,
/// evaluated as (E_{alpha,1}(-mu t_lo^alpha) - E_{alpha,1}(-mu t_hi^alpha))/mu,
/// with a series limit for mu t_hi^alpha below the cancellation threshold.
double ml_derivative_weight(double alpha, double mu, double t_lo, double t_hi,
                            const MLRegimeConfig& cfg = {});

/// Same weight from already-evaluated E_{alpha,1}(-mu t^alpha) values (used by
/// the solver's cached stamp tables); falls back to the small-mu series.
double ml_weight_from_values(double alpha, double mu, double t_lo, double t_hi,
                             double e_lo, double e_hi);

/// Wright function Psi_alpha(t) = sum_n (-t)^n / (n! Gamma(1-(n+1)alpha)),
/// t >= 0, 0 < alpha < 1. Series summation with adaptive truncation; a
/// saddle-point Hankel integral takes over where the series cancels.
double wright(double alpha, double t);

/// A real sequence sampled on the uniform grid t_k = origin + k*step.
struct ScalarSeries {
    Eigen::ArrayXd values;
    double step = 0.0;
    double origin = 0.0;

    int size() const { return static_cast<int>(values.size()); }
    double time_at(int k) const { return origin + k * step; }
    void validate() const;
};

/// Discrete Caputo derivative of order alpha in (0,1) via the L1
/// product-integration scheme. The first output sample is undefined and
/// reported as NaN.
ScalarSeries caputo_scalar(const ScalarSeries& series, double alpha);

/// Discrete Riemann-Liouville integral J^alpha via piecewise-linear
/// product integration with exact kernel moments. J^0 is the identity.
/// A non-finite leading sample signals an integrable power singularity
/// t^p, p in (-1,0): the exponent is fitted from the first two finite
/// samples and the head region is integrated against that local model.
ScalarSeries rl_integral_scalar(const ScalarSeries& series, double alpha);

/// Adaptive Simpson quadrature. Throws std::runtime_error if the requested
/// tolerance is not reached within the depth limit.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

} // namespace fq
