#include "fracquench/operators.hpp"

#include <cmath>
#include <vector>

namespace fq {

OperatorStamp make_heat_stamp(double t, const SpectralBasis& basis)
{
    if (t < 0.0)
        throw std::domain_error("heat_semigroup: t must be >= 0");
    OperatorStamp st;
    st.t = t;
    st.params = basis.params();
    st.multipliers = (-basis.frac_eigenvalues() * t).exp();
    return st;
}

OperatorStamp make_S_stamp(double t, const SpectralBasis& basis, const MLRegimeConfig& cfg)
{
    if (t < 0.0)
        throw std::domain_error("apply_S: t must be >= 0");
    OperatorStamp st;
    st.t = t;
    st.params = basis.params();
    const double alpha = basis.params().alpha;
    const int n = basis.size();
    st.multipliers.resize(n);
    if (t == 0.0) {
        st.multipliers.setOnes();
        return st;
    }
    const MittagLefflerEvaluator ml(alpha, 1.0, cfg);
    const double ta = std::pow(t, alpha);
    for (int k = 0; k < n; ++k)
        st.multipliers(k) = ml(-basis.frac_eigenvalues()(k) * ta);
    return st;
}

OperatorStamp make_P_stamp(double t, const SpectralBasis& basis, const MLRegimeConfig& cfg)
{
    if (t < 0.0)
        throw std::domain_error("apply_P: t must be >= 0");
    OperatorStamp st;
    st.t = t;
    st.params = basis.params();
    const double alpha = basis.params().alpha;
    const int n = basis.size();
    st.multipliers.resize(n);
    const MittagLefflerEvaluator ml(alpha, alpha, cfg);
    const double ta = std::pow(t, alpha);
    for (int k = 0; k < n; ++k)
        st.multipliers(k) = ml(t == 0.0 ? 0.0 : -basis.frac_eigenvalues()(k) * ta);
    return st;
}

SpectralField heat_semigroup(double t, const SpectralField& field)
{
    return make_heat_stamp(t, *field.basis()).apply(field);
}

SpectralField apply_S(double t, const SpectralField& field)
{
    return make_S_stamp(t, *field.basis()).apply(field);
}

SpectralField apply_P(double t, const SpectralField& field)
{
    return make_P_stamp(t, *field.basis()).apply(field);
}

double subordination_check(double alpha, double mu, double t, int quad_nodes)
{
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("subordination_check: alpha must lie in (0, 1)");
    if (!(mu > 0.0) || !(t > 0.0))
        throw std::domain_error("subordination_check: mu and t must be positive");

    const double ta = std::pow(t, alpha);
    const auto integrand = [&](double sigma) {
        return wright(alpha, sigma) * std::exp(-mu * sigma * ta);
    };
    // Psi_alpha decays superexponentially; find a cutoff where the tail
    // is below the quadrature tolerance.
    double cut = 2.0;
    while (cut < 400.0 && wright(alpha, cut) > 1e-14)
        cut *= 1.5;
    const double tol = 1e-9 * std::max(1, quad_nodes / 256);
    const double integral = adaptive_simpson(integrand, 0.0, cut, tol);
    return std::abs(integral - mittag_leffler(alpha, 1.0, -mu * ta));
}

double rl_reconstruction_check(double alpha, double mu, double h, int n, double t_lo)
{
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::domain_error("rl_reconstruction_check: alpha must lie in (0, 1)");
    if (!(mu > 0.0) || !(h > 0.0))
        throw std::domain_error("rl_reconstruction_check: mu and h must be positive");
    if (n < 2)
        throw std::invalid_argument("rl_reconstruction_check: n must be >= 2");

    // 16-point Gauss-Legendre rule mapped to [0, 1].
    static constexpr double gp[8] = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499
    };
    static constexpr double gwp[8] = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541
    };
    double gx[16];
    double gw[16];
    for (int g = 0; g < 8; ++g) {
        gx[g] = 0.5 * (1.0 - gp[7 - g]);
        gx[8 + g] = 0.5 * (1.0 + gp[g]);
        gw[g] = 0.5 * gwp[7 - g];
        gw[8 + g] = 0.5 * gwp[g];
    }

    const MittagLefflerEvaluator eaa(alpha, alpha);
    const MittagLefflerEvaluator ea1(alpha, 1.0);
    const double ap = 1.0 - alpha;
    const double rg = reciprocal_gamma(ap);
    const double ha = std::pow(h, alpha);

    // Integrand samples at the Gauss nodes of each interior cell, and the
    // head-cell values under the substitution sigma = h u^{1/alpha} which
    // absorbs the sigma^{alpha-1} singularity.
    std::vector<double> vg(16 * std::size_t(n));
    for (int k = 1; k < n; ++k)
        for (int g = 0; g < 16; ++g) {
            const double s = (double(k) + gx[g]) * h;
            vg[16 * std::size_t(k) + g] =
                std::pow(s, alpha - 1.0) * eaa(-mu * std::pow(s, alpha));
        }
    double head_e[16];
    double head_s[16];
    for (int g = 0; g < 16; ++g) {
        head_s[g] = h * std::pow(gx[g], 1.0 / alpha);
        head_e[g] = eaa(-mu * ha * gx[g]);
    }

    double worst = 0.0;
    const int i0 = std::max(2, int(std::ceil(t_lo / h - 1e-9)));
    for (int i = i0; i <= n; ++i) {
        const double t = double(i) * h;
        double acc = 0.0;
        for (int g = 0; g < 16; ++g)
            acc += gw[g] * std::pow(t - head_s[g], -alpha) * head_e[g];
        acc *= ha / alpha;
        for (int k = 1; k <= i - 2; ++k) {
            double q = 0.0;
            for (int g = 0; g < 16; ++g)
                q += gw[g] * std::pow(t - (double(k) + gx[g]) * h, -alpha)
                     * vg[16 * std::size_t(k) + g];
            acc += h * q;
        }
        // Last cell: substitute t - sigma = h w^{1/(1-alpha)} to absorb the
        // kernel singularity at sigma = t.
        double q = 0.0;
        for (int g = 0; g < 16; ++g) {
            const double s = t - h * std::pow(gx[g], 1.0 / ap);
            q += gw[g] * std::pow(s, alpha - 1.0) * eaa(-mu * std::pow(s, alpha));
        }
        acc += std::pow(h, ap) / ap * q;
        worst = std::max(worst, std::abs(acc * rg - ea1(-mu * std::pow(t, alpha))));
    }
    return worst;
}

} // namespace fq
