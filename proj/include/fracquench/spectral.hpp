#pragma once

// Dirichlet sine-basis representation of functions on intervals and
// axis-aligned boxes, with the spectral fractional Laplacian acting
// diagonally on the coefficients.

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <stdexcept>

namespace fq {

struct FractionalParams {
    double alpha = 1.0; // time order, (0, 1]
    double s = 1.0;     // space order, (0, 1]

    void validate() const;
};

struct DomainSpec {
    int dim = 1;
    std::array<double, 2> lengths { 1.0, 1.0 };
    int modes_per_dim = 128;
    double scale = 1.0; // shape-preserving dilation factor

    double effective_length(int d) const { return scale * lengths[static_cast<size_t>(d)]; }
    int total_modes() const;
    void validate() const;
};

/// Precomputed Dirichlet eigenbasis on (0,L1)x...x(0,Ld): eigenvalues,
/// their fractional powers, and the sine matrices for the square
/// collocation transform. Immutable after construction.
class SpectralBasis {
public:
    SpectralBasis(const DomainSpec& domain, const FractionalParams& params);

    const DomainSpec& domain() const { return domain_; }
    const FractionalParams& params() const { return params_; }
    int dim() const { return domain_.dim; }
    int modes_per_dim() const { return domain_.modes_per_dim; }
    int size() const { return static_cast<int>(eigenvalues_.size()); }

    /// Laplacian eigenvalues, flattened row-major with n1 fastest in 2D.
    const Eigen::ArrayXd& eigenvalues() const { return eigenvalues_; }
    /// mu_n = lambda_n^s.
    const Eigen::ArrayXd& frac_eigenvalues() const { return frac_eigenvalues_; }

    /// e_n(x_i) along dimension d, (i, n) layout, both 0-based.
    const Eigen::MatrixXd& sine_matrix(int d) const { return sine_[static_cast<size_t>(d)]; }
    /// e_n evaluated at the N+1 cell midpoints along dimension d.
    const Eigen::MatrixXd& midpoint_matrix(int d) const { return midpoint_[static_cast<size_t>(d)]; }

    /// Collocation abscissae x_i = i L/(N+1), i = 1..N, along dimension d.
    const Eigen::VectorXd& collocation(int d) const { return colloc_[static_cast<size_t>(d)]; }
    /// Quadrature weight L/(N+1) along dimension d.
    double cell_width(int d) const { return cell_[static_cast<size_t>(d)]; }

    /// e_n(x) for a single point; n is the flattened mode index.
    double basis_value(int n, const Eigen::VectorXd& x) const;

private:
    DomainSpec domain_;
    FractionalParams params_;
    Eigen::ArrayXd eigenvalues_;
    Eigen::ArrayXd frac_eigenvalues_;
    std::array<Eigen::MatrixXd, 2> sine_;
    std::array<Eigen::MatrixXd, 2> midpoint_;
    std::array<Eigen::VectorXd, 2> colloc_;
    std::array<double, 2> cell_ { 0.0, 0.0 };
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

BasisPtr build_basis(const DomainSpec& domain, const FractionalParams& params);

/// A function on the domain stored as coefficients against the
/// orthonormal eigenbasis. Value-semantic snapshot.
class SpectralField {
public:
    SpectralField() = default; // empty placeholder; not usable until assigned
    SpectralField(BasisPtr basis, Eigen::ArrayXd coeffs);

    static SpectralField zero(BasisPtr basis);

    const Eigen::ArrayXd& coeffs() const { return coeffs_; }
    Eigen::ArrayXd& coeffs() { return coeffs_; }
    const BasisPtr& basis() const { return basis_; }
    int size() const { return static_cast<int>(coeffs_.size()); }

private:
    BasisPtr basis_;
    Eigen::ArrayXd coeffs_;
};

/// u(x_i) = sum_n w_n e_n(x_i) on the collocation grid (x1 fastest in 2D).
Eigen::ArrayXd to_grid(const SpectralField& field);

/// Coefficients from grid values; exact inverse of to_grid.
SpectralField from_grid(const Eigen::ArrayXd& values, BasisPtr basis);

/// (-Laplace)^s: w_n -> lambda_n^s w_n.
SpectralField apply_fractional_laplacian(const SpectralField& field);

/// (sum_n lambda_n^s w_n^2)^{1/2}.
double hs_norm(const SpectralField& field);

/// (sum_n w_n^2)^{1/2} = L2 norm of the function.
double l2_norm(const SpectralField& field);

/// max |u| over collocation points and cell midpoints.
double sup_norm(const SpectralField& field);

/// Direct summation at arbitrary interior points (rows of `points`).
/// Throws std::domain_error for points outside the closed domain.
Eigen::ArrayXd eval_at(const SpectralField& field, const Eigen::MatrixXd& points);

} // namespace fq
