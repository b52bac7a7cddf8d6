#pragma once

// Solution-operator families realized as diagonal spectral multipliers:
// the heat semigroup e^{-mu t}, S_alpha(t) with per-mode E_{alpha,1}
// values, and P_alpha(t) with E_{alpha,alpha} values.

#include "fracquench/special.hpp"
#include "fracquench/spectral.hpp"

namespace fq {

/// Per-mode multiplier values for a fixed time; immutable once built.
struct OperatorStamp {
    double t = 0.0;
    FractionalParams params;
    Eigen::ArrayXd multipliers;

    SpectralField apply(const SpectralField& field) const
    {
        return SpectralField(field.basis(), field.coeffs() * multipliers);
    }
};

OperatorStamp make_heat_stamp(double t, const SpectralBasis& basis);
OperatorStamp make_S_stamp(double t, const SpectralBasis& basis, const MLRegimeConfig& cfg = {});
OperatorStamp make_P_stamp(double t, const SpectralBasis& basis, const MLRegimeConfig& cfg = {});

/// w_n -> e^{-mu_n t} w_n.
SpectralField heat_semigroup(double t, const SpectralField& field);

/// w_n -> E_{alpha,1}(-mu_n t^alpha) w_n; identity at t=0, heat semigroup at alpha=1.
SpectralField apply_S(double t, const SpectralField& field);

/// w_n -> E_{alpha,alpha}(-mu_n t^alpha) w_n.
SpectralField apply_P(double t, const SpectralField& field);

/// |int_0^inf Psi_alpha(sigma) e^{-mu sigma t^alpha} dsigma - E_{alpha,1}(-mu t^alpha)|
/// by adaptive quadrature; verification hook for the subordination identity.
double subordination_check(double alpha, double mu, double t, int quad_nodes);

/// Worst |J^{1-alpha}(tau^{alpha-1} E_{alpha,alpha}(-mu tau^alpha))(t)
/// - E_{alpha,1}(-mu t^alpha)| over the lattice t = i h, i h >= t_lo, i <= n.
/// Product quadrature with the singular head cell handled by substitution.
double rl_reconstruction_check(double alpha, double mu, double h, int n, double t_lo);

} // namespace fq
