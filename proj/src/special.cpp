#include "fracquench/special.hpp"

#include <cmath>
#include <limits>

namespace fq {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGammaOverflowArg = 171.62; // tgamma overflows beyond this

bool is_nonpositive_integer(double x)
{
    return x <= 0.0 && x == std::floor(x);
}

// log|1/Gamma(x)| and its sign; sign 0 at (near-)poles.
double log_abs_rgamma(double x, double& sign)
{
    if (x > 0.0) {
        sign = 1.0;
        return -std::lgamma(x);
    }
    const double sp = std::sin(kPi * x);
    if (std::abs(sp) < 1e-12) {
        sign = 0.0;
        return -std::numeric_limits<double>::infinity();
    }
    sign = sp > 0.0 ? 1.0 : -1.0;
    return std::log(std::abs(sp) / kPi) + std::lgamma(1.0 - x);
}

} // namespace

double gamma_fn(double x)
{
    if (is_nonpositive_integer(x))
        throw std::domain_error("gamma_fn: pole at non-positive integer argument");
    return std::tgamma(x);
}

double reciprocal_gamma(double x)
{
    if (is_nonpositive_integer(x))
        return 0.0;
    if (x > kGammaOverflowArg)
        return 0.0;
    if (x > 0.0)
        return 1.0 / std::tgamma(x);
    const double sp = std::sin(kPi * x);
    if (std::abs(sp) < 1e-12)
        return 0.0;
    return sp * std::tgamma(1.0 - x) / kPi;
}

double g_kernel(double alpha, double t)
{
    if (alpha < 0.0)
        throw std::domain_error("g_kernel: alpha must be >= 0");
    if (alpha == 0.0 || t <= 0.0)
        return 0.0;
    return std::pow(t, alpha - 1.0) * reciprocal_gamma(alpha);
}

void MLRegimeConfig::validate() const
{
    if (!(series_radius > 0.0) || !(series_radius <= asymptotic_radius))
        throw std::invalid_argument("MLRegimeConfig: need 0 < series_radius <= asymptotic_radius");
    if (asymptotic_terms < 2)
        throw std::invalid_argument("MLRegimeConfig: asymptotic_terms >= 2 required");
    if (quad_nodes < 16)
        throw std::invalid_argument("MLRegimeConfig: quad_nodes >= 16 required");
}

MittagLefflerEvaluator::MittagLefflerEvaluator(double alpha, double beta, MLRegimeConfig cfg)
    : alpha_(alpha), beta_(beta), cfg_(cfg)
{
    cfg_.validate();
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("mittag_leffler: alpha must lie in (0, 1]");
    if (!(beta > 0.0))
        throw std::domain_error("mittag_leffler: beta must be positive");

    // Hankel parabola lam(u) = mu(1+iu)^2; the integrand decays like
    // exp(mu(1-u^2)), so truncate where the decay reaches ~e^{-42}.
    const int n = cfg_.quad_nodes;
    const double mu = 4.0;
    const double umax = std::sqrt(1.0 + 42.0 / mu);
    const double h = 2.0 * umax / (n - 1);
    contour_weight_.resize(n);
    contour_pow_.resize(n);
    for (int k = 0; k < n; ++k) {
        const double u = -umax + k * h;
        const std::complex<double> iu1(1.0, u);
        const std::complex<double> lam = mu * iu1 * iu1;
        contour_weight_(k) = h * (mu / kPi) * std::exp(lam) * std::pow(lam, alpha_ - beta_) * iu1;
        contour_pow_(k) = std::pow(lam, alpha_);
    }
}

double MittagLefflerEvaluator::series(double z) const
{
    double sum = 0.0;
    double lzpow = 0.0; // log |z^n|, kept in log space so large z cannot overflow
    const double lz = z == 0.0 ? -std::numeric_limits<double>::infinity()
                               : std::log(std::abs(z));
    const double sgn = z < 0.0 ? -1.0 : 1.0;
    double term_sign = 1.0;
    for (int n = 0; n < 2500; ++n) {
        const double arg = beta_ + alpha_ * n;
        const double rg = reciprocal_gamma(arg);
        if (rg != 0.0) {
            const double lterm = lzpow + std::log(std::abs(rg));
            if (lterm > -745.0)
                sum += term_sign * (rg < 0.0 ? -1.0 : 1.0) * std::exp(lterm);
        }
        lzpow += lz;
        term_sign *= sgn;
        // Gamma(beta + alpha n) eventually dominates any power: once the
        // term magnitude bound drops below round-off the tail is gone.
        const double next_bound =
            lzpow - std::lgamma(std::min(arg + alpha_, 170.0));
        if (n > 3 && next_bound < std::log(1e-18 * std::max(1.0, std::abs(sum))))
            break;
    }
    return sum;
}

double MittagLefflerEvaluator::contour(double z) const
{
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < contour_weight_.size(); ++k)
        acc += contour_weight_(k) / (contour_pow_(k) - z);
    return acc.real();
}

double MittagLefflerEvaluator::asymptotic(double z, double& rel_est) const
{
    // E_{a,b}(z) ~ -sum_{n>=1} z^{-n}/Gamma(b - a n) on the negative axis.
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double last = std::numeric_limits<double>::infinity();
    const double zi = 1.0 / z;
    double p = zi;
    for (int n = 1; n <= cfg_.asymptotic_terms; ++n) {
        const double rg = reciprocal_gamma(beta_ - alpha_ * n);
        const double t = p * rg;
        p *= zi;
        if (t == 0.0)
            continue; // pole of Gamma, genuine zero term
        if (std::abs(t) >= prev)
            break; // past optimal truncation
        sum -= t;
        prev = std::abs(t);
        last = prev;
    }
    rel_est = last / std::max(std::abs(sum), 1e-300);
    return sum;
}

double MittagLefflerEvaluator::operator()(double z) const
{
    if (alpha_ == 1.0 && beta_ == 1.0)
        return std::exp(z);
    if (z >= 0.0)
        return series(z); // all terms positive: no cancellation at any z
    const double az = std::abs(z);
    if (az <= cfg_.series_radius)
        return series(z);
    if (az >= cfg_.asymptotic_radius) {
        double rel_est = 0.0;
        const double v = asymptotic(z, rel_est);
        if (rel_est < 1e-13)
            return v;
    }
    return contour(z);
}

double mittag_leffler(double alpha, double beta, double z, const MLRegimeConfig& cfg)
{
    return MittagLefflerEvaluator(alpha, beta, cfg)(z);
}

namespace {

// Series limit of the kernel moment for small mu:
//   sum_k (-mu)^k (t_hi^{a(k+1)} - t_lo^{a(k+1)}) / Gamma(a(k+1)+1).
double ml_weight_series(double alpha, double mu, double t_lo, double t_hi)
{
    double sum = 0.0;
    double mupow = 1.0;
    for (int k = 0; k < 30; ++k) {
        const double e = alpha * (k + 1);
        const double term = mupow * (std::pow(t_hi, e) - std::pow(t_lo, e)) * reciprocal_gamma(e + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) && k > 1)
            break;
        mupow *= -mu;
    }
    return sum;
}

} // namespace

double ml_weight_from_values(double alpha, double mu, double t_lo, double t_hi,
                             double e_lo, double e_hi)
{
    if (mu * std::pow(t_hi, alpha) < 1e-6)
        return ml_weight_series(alpha, mu, t_lo, t_hi);
    return std::max((e_lo - e_hi) / mu, 0.0);
}

double ml_derivative_weight(double alpha, double mu, double t_lo, double t_hi,
                            const MLRegimeConfig& cfg)
{
    if (!(t_lo >= 0.0) || !(t_hi > t_lo))
        throw std::domain_error("ml_derivative_weight: need 0 <= t_lo < t_hi");
    if (mu < 0.0)
        throw std::domain_error("ml_derivative_weight: mu must be >= 0");
    if (mu * std::pow(t_hi, alpha) < 1e-6)
        return ml_weight_series(alpha, mu, t_lo, t_hi);
    const MittagLefflerEvaluator ml(alpha, 1.0, cfg);
    const double e_lo = ml(-mu * std::pow(t_lo, alpha));
    const double e_hi = ml(-mu * std::pow(t_hi, alpha));
    return ml_weight_from_values(alpha, mu, t_lo, t_hi, e_lo, e_hi);
}

namespace {

// Wright series in log space; returns the sum and an absolute error
// estimate driven by the largest term's magnitude.
double wright_series(double alpha, double t, double& abs_est)
{
    if (t == 0.0) {
        abs_est = 1e-16;
        return reciprocal_gamma(1.0 - alpha);
    }
    const double lt = std::log(t);
    double sum = 0.0;
    double lmax = 0.0;
    int n = 0;
    int terms = 0;
    while (n < 4000) {
        double sr = 0.0;
        const double lr = log_abs_rgamma(1.0 - (n + 1) * alpha, sr);
        if (sr != 0.0) {
            const double lterm = n * lt - std::lgamma(n + 1.0) + lr;
            const double sgn = (n % 2 == 0) ? sr : -sr;
            if (lterm > -745.0)
                sum += sgn * std::exp(lterm);
            lmax = std::max(lmax, lterm);
            if (lmax > 42.0) { // cancellation beyond double precision
                abs_est = std::numeric_limits<double>::infinity();
                return sum;
            }
            if (n > t && lterm < lmax - 45.0)
                break;
            ++terms;
        }
        ++n;
    }
    abs_est = std::exp(lmax) * 2e-16 * std::sqrt(terms + 1.0);
    return sum;
}

// Leading-order saddle asymptotic of the Wright (M-Wright) function.
double wright_asymptotic(double alpha, double t)
{
    const double nu = alpha;
    const double q = 1.0 / (1.0 - nu);
    const double b = (1.0 - nu) * std::pow(nu, nu * q);
    const double a = std::pow(nu, (2.0 * nu - 1.0) * 0.5 * q) / std::sqrt(2.0 * kPi * (1.0 - nu));
    const double ex = -b * std::pow(t, q);
    if (ex < -745.0)
        return 0.0;
    return a * std::pow(t, (nu - 0.5) * q) * std::exp(ex);
}

// Hankel integral through the saddle sigma* = (alpha t)^{1/(1-alpha)} on a
// parabolic contour; covers the band where the series cancels but the
// value is still above the absolute tolerance.
double wright_contour(double alpha, double t)
{
    const double mu = std::pow(alpha * t, 1.0 / (1.0 - alpha));
    const int n = 96;
    const double umax = 3.5;
    const double h = 2.0 * umax / (n - 1);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
        const double u = -umax + k * h;
        const std::complex<double> iu1(1.0, u);
        const std::complex<double> sig = mu * iu1 * iu1;
        acc += std::exp(sig - t * std::pow(sig, alpha)) * std::pow(sig, alpha - 1.0) * iu1;
    }
    return (mu / kPi) * (h * acc).real();
}

} // namespace

double wright(double alpha, double t)
{
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("wright: alpha must lie in (0, 1)");
    if (t < 0.0)
        throw std::domain_error("wright: t must be >= 0");
    double abs_est = 0.0;
    const double v = wright_series(alpha, t, abs_est);
    if (abs_est < 1e-13)
        return std::max(v, 0.0);
    // Saddle exponent mu - t mu^alpha = -(1-a) a^{a/(1-a)} t^{1/(1-a)};
    // below the exp underflow threshold only the (tiny) leading-order
    // asymptotic value remains representable.
    const double mu = std::pow(alpha * t, 1.0 / (1.0 - alpha));
    if (mu - t * std::pow(mu, alpha) < -700.0)
        return wright_asymptotic(alpha, t);
    return std::max(wright_contour(alpha, t), 0.0);
}

void ScalarSeries::validate() const
{
    if (values.size() < 2)
        throw std::invalid_argument("ScalarSeries: at least 2 samples required");
    if (!(step > 0.0))
        throw std::invalid_argument("ScalarSeries: step must be positive");
    if (origin < 0.0)
        throw std::invalid_argument("ScalarSeries: origin must be >= 0");
}

ScalarSeries caputo_scalar(const ScalarSeries& series, double alpha)
{
    series.validate();
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("caputo_scalar: alpha must lie in (0, 1)");
    if (series.size() < 3)
        throw std::invalid_argument("caputo_scalar: at least 3 samples required");

    const int n = series.size();
    const double h = series.step;
    const double rg = reciprocal_gamma(2.0 - alpha);
    ScalarSeries out;
    out.step = h;
    out.origin = series.origin;
    out.values.resize(n);
    out.values(0) = std::numeric_limits<double>::quiet_NaN();

    // L1 scheme: piecewise-linear interpolant differentiated under the
    // kernel, with exact moments (t_n-t_k)^{1-alpha} - (t_n-t_{k+1})^{1-alpha}.
    for (int i = 1; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < i; ++k) {
            const double m = std::pow(double(i - k) * h, 1.0 - alpha)
                           - std::pow(double(i - k - 1) * h, 1.0 - alpha);
            acc += (series.values(k + 1) - series.values(k)) * m;
        }
        out.values(i) = acc * rg / h;
    }
    return out;
}

ScalarSeries rl_integral_scalar(const ScalarSeries& series, double alpha)
{
    series.validate();
    if (alpha < 0.0)
        throw std::domain_error("rl_integral_scalar: alpha must be >= 0");
    if (alpha == 0.0)
        return series;

    const int n = series.size();
    const double h = series.step;
    const double rg = reciprocal_gamma(alpha);
    ScalarSeries out;
    out.step = h;
    out.origin = series.origin;
    out.values = Eigen::ArrayXd::Zero(n);

    // Gauss-Legendre nodes and weights on [0, 1].
    static constexpr double gx[8] = {
        0.01985507175123186, 0.10166676129318664, 0.2372337950418355,
        0.40828267875217505, 0.5917173212478249, 0.7627662049581645,
        0.8983332387068134, 0.9801449282487681
    };
    static constexpr double gw[8] = {
        0.05061426814518813, 0.11119051722668723, 0.15685332293894363,
        0.18134189168918100, 0.18134189168918100, 0.15685332293894363,
        0.11119051722668723, 0.05061426814518813
    };

    // A non-finite origin sample flags data with an integrable power
    // singularity v ~ C tau^p; fit p and C from the first two interior
    // samples and integrate the model through the early cells.
    bool head_model = false;
    double head_p = 0.0;
    double head_c = 0.0;
    if (n > 2 && !std::isfinite(series.values(0)) && std::isfinite(series.values(1))
        && std::isfinite(series.values(2)) && series.values(1) > 0.0
        && series.values(2) > 0.0) {
        head_p = std::log(series.values(2) / series.values(1)) / std::log(2.0);
        if (head_p > -1.0 && head_p < 0.0) {
            head_model = true;
            head_c = series.values(1) * std::pow(h, -head_p);
        }
    }
    constexpr int kHeadCells = 64;

    for (int i = 1; i < n; ++i) {
        const double t = double(i) * h;
        double acc = 0.0;
        for (int k = 0; k < i; ++k) {
            if (head_model && k == 0) {
                if (i == 1) {
                    // Exact: int_0^h (h-s)^{alpha-1} s^p ds = h^{alpha+p} B(p+1, alpha).
                    acc += head_c * std::pow(h, alpha + head_p)
                           * std::exp(std::lgamma(head_p + 1.0) + std::lgamma(alpha)
                                      - std::lgamma(head_p + 1.0 + alpha));
                } else {
                    // Substitute s = h u^{1/(p+1)} to remove the singularity.
                    double q = 0.0;
                    for (int g = 0; g < 8; ++g) {
                        const double s = h * std::pow(gx[g], 1.0 / (head_p + 1.0));
                        q += gw[g] * std::pow(t - s, alpha - 1.0);
                    }
                    acc += head_c * std::pow(h, head_p + 1.0) / (head_p + 1.0) * q;
                }
                continue;
            }
            double vk = series.values(k);
            const double vk1 = series.values(k + 1);
            if (!std::isfinite(vk))
                vk = vk1;
            if (head_model && k >= 1 && k <= kHeadCells && k < i - 1 && vk > 0.0
                && vk1 > 0.0) {
                // Power-law interpolant through the cell endpoints resolves
                // the strong curvature inherited from the singular head.
                const double pk =
                    std::log(vk1 / vk) / std::log(double(k + 1) / double(k));
                double q = 0.0;
                for (int g = 0; g < 8; ++g) {
                    const double s = (double(k) + gx[g]) * h;
                    q += gw[g] * std::pow(t - s, alpha - 1.0)
                         * std::pow(s / (double(k) * h), pk);
                }
                acc += vk * h * q;
                continue;
            }
            // Piecewise-linear product rule with exact kernel moments.
            const double a = double(i - k) * h;
            const double b = double(i - k - 1) * h;
            const double pa = std::pow(a, alpha);
            const double pb = std::pow(b, alpha);
            const double m0 = (pa - pb) / alpha;
            const double m1 = a * m0 - (pa * a - pb * b) / (alpha + 1.0);
            acc += vk * m0 + (vk1 - vk) / h * m1;
        }
        out.values(i) = acc * rg;
    }
    return out;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol)
        return left + right + err / 15.0;
    if (depth <= 0)
        throw std::runtime_error("adaptive_simpson: tolerance not reached");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth)
{
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace fq
