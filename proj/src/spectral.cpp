#include "fracquench/spectral.hpp"

#include <cmath>

namespace fq {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

void FractionalParams::validate() const
{
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("FractionalParams: alpha must lie in (0, 1]");
    if (!(s > 0.0) || s > 1.0)
        throw std::invalid_argument("FractionalParams: s must lie in (0, 1]");
}

int DomainSpec::total_modes() const
{
    int n = modes_per_dim;
    for (int d = 1; d < dim; ++d)
        n *= modes_per_dim;
    return n;
}

void DomainSpec::validate() const
{
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("DomainSpec: dim must be 1 or 2");
    if (modes_per_dim < 4)
        throw std::invalid_argument("DomainSpec: modes_per_dim must be >= 4");
    if (!(scale > 0.0))
        throw std::invalid_argument("DomainSpec: scale must be positive");
    for (int d = 0; d < dim; ++d)
        if (!(effective_length(d) > 0.0))
            throw std::invalid_argument("DomainSpec: lengths must be positive");
}

SpectralBasis::SpectralBasis(const DomainSpec& domain, const FractionalParams& params)
    : domain_(domain), params_(params)
{
    domain_.validate();
    params_.validate();

    const int n = domain_.modes_per_dim;
    std::array<Eigen::ArrayXd, 2> lam1d;
    for (int d = 0; d < domain_.dim; ++d) {
        const double len = domain_.effective_length(d);
        const double dx = len / (n + 1);
        cell_[static_cast<size_t>(d)] = dx;

        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
            x(i) = (i + 1) * dx;
        colloc_[static_cast<size_t>(d)] = x;

        lam1d[static_cast<size_t>(d)].resize(n);
        const double norm = std::sqrt(2.0 / len);
        Eigen::MatrixXd sine(n, n), mid(n + 1, n);
        for (int m = 0; m < n; ++m) {
            const double k = (m + 1) * kPi / len;
            lam1d[static_cast<size_t>(d)](m) = k * k;
            for (int i = 0; i < n; ++i)
                sine(i, m) = norm * std::sin(k * x(i));
            for (int i = 0; i <= n; ++i)
                mid(i, m) = norm * std::sin(k * (i + 0.5) * dx);
        }
        sine_[static_cast<size_t>(d)] = sine;
        midpoint_[static_cast<size_t>(d)] = mid;
    }

    if (domain_.dim == 1) {
        eigenvalues_ = lam1d[0];
    } else {
        eigenvalues_.resize(static_cast<Eigen::Index>(n) * n);
        for (int n2 = 0; n2 < n; ++n2)
            for (int n1 = 0; n1 < n; ++n1)
                eigenvalues_(static_cast<Eigen::Index>(n2) * n + n1) = lam1d[0](n1) + lam1d[1](n2);
    }
    frac_eigenvalues_ = eigenvalues_.pow(params_.s);
}

double SpectralBasis::basis_value(int n, const Eigen::VectorXd& x) const
{
    const int nn = domain_.modes_per_dim;
    double v = 1.0;
    int rem = n;
    for (int d = 0; d < domain_.dim; ++d) {
        const int m = rem % nn;
        rem /= nn;
        const double len = domain_.effective_length(d);
        v *= std::sqrt(2.0 / len) * std::sin((m + 1) * kPi * x(d) / len);
    }
    return v;
}

BasisPtr build_basis(const DomainSpec& domain, const FractionalParams& params)
{
    return std::make_shared<SpectralBasis>(domain, params);
}

SpectralField::SpectralField(BasisPtr basis, Eigen::ArrayXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != basis_->size())
        throw std::invalid_argument("SpectralField: coefficient count does not match basis");
}

SpectralField SpectralField::zero(BasisPtr basis)
{
    const int n = basis->size();
    return SpectralField(std::move(basis), Eigen::ArrayXd::Zero(n));
}

Eigen::ArrayXd to_grid(const SpectralField& field)
{
    const SpectralBasis& b = *field.basis();
    const int n = b.modes_per_dim();
    if (b.dim() == 1)
        return (b.sine_matrix(0) * field.coeffs().matrix()).array();
    Eigen::Map<const Eigen::MatrixXd> w(field.coeffs().data(), n, n); // (n1, n2)
    Eigen::MatrixXd u = b.sine_matrix(0) * w * b.sine_matrix(1).transpose();
    return Eigen::Map<const Eigen::ArrayXd>(u.data(), u.size());
}

SpectralField from_grid(const Eigen::ArrayXd& values, BasisPtr basis)
{
    const SpectralBasis& b = *basis;
    const int n = b.modes_per_dim();
    if (values.size() != b.size())
        throw std::invalid_argument("from_grid: grid size does not match basis");
    if (b.dim() == 1) {
        Eigen::ArrayXd w = (b.sine_matrix(0).transpose() * values.matrix()).array() * b.cell_width(0);
        return SpectralField(std::move(basis), std::move(w));
    }
    Eigen::Map<const Eigen::MatrixXd> u(values.data(), n, n); // (i1, i2)
    Eigen::MatrixXd w = b.sine_matrix(0).transpose() * u * b.sine_matrix(1)
                      * (b.cell_width(0) * b.cell_width(1));
    return SpectralField(std::move(basis), Eigen::Map<const Eigen::ArrayXd>(w.data(), w.size()));
}

SpectralField apply_fractional_laplacian(const SpectralField& field)
{
    return SpectralField(field.basis(), field.coeffs() * field.basis()->frac_eigenvalues());
}

double hs_norm(const SpectralField& field)
{
    return std::sqrt((field.basis()->frac_eigenvalues() * field.coeffs().square()).sum());
}

double l2_norm(const SpectralField& field)
{
    return std::sqrt(field.coeffs().square().sum());
}

double sup_norm(const SpectralField& field)
{
    const SpectralBasis& b = *field.basis();
    const int n = b.modes_per_dim();
    double m = to_grid(field).abs().maxCoeff();
    if (b.dim() == 1) {
        Eigen::ArrayXd um = (b.midpoint_matrix(0) * field.coeffs().matrix()).array();
        m = std::max(m, um.abs().maxCoeff());
    } else {
        Eigen::Map<const Eigen::MatrixXd> w(field.coeffs().data(), n, n);
        Eigen::MatrixXd um = b.midpoint_matrix(0) * w * b.midpoint_matrix(1).transpose();
        m = std::max(m, um.array().abs().maxCoeff());
    }
    return m;
}

Eigen::ArrayXd eval_at(const SpectralField& field, const Eigen::MatrixXd& points)
{
    const SpectralBasis& b = *field.basis();
    if (points.cols() != b.dim())
        throw std::invalid_argument("eval_at: point dimension does not match domain");
    for (Eigen::Index p = 0; p < points.rows(); ++p)
        for (int d = 0; d < b.dim(); ++d)
            if (points(p, d) < 0.0 || points(p, d) > b.domain().effective_length(d))
                throw std::domain_error("eval_at: point outside domain");

    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(points.rows());
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
        const Eigen::VectorXd x = points.row(p).transpose();
        double acc = 0.0;
        for (int n = 0; n < b.size(); ++n)
            acc += field.coeffs()(n) * b.basis_value(n, x);
        out(p) = acc;
    }
    return out;
}

} // namespace fq
