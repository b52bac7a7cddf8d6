#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracquench/spectral.hpp"

#include <cmath>
#include <random>

using namespace fq;

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::ArrayXd random_array(std::mt19937& rng, int n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::ArrayXd a(n);
    for (int i = 0; i < n; ++i)
        a(i) = u(rng);
    return a;
}
} // namespace

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS((FractionalParams { 0.0, 0.5 }).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FractionalParams { 1.5, 0.5 }).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FractionalParams { 0.5, 0.0 }).validate(), std::invalid_argument);
    CHECK_THROWS_AS((FractionalParams { 0.5, 1.1 }).validate(), std::invalid_argument);
    CHECK_NOTHROW((FractionalParams { 1.0, 1.0 }).validate());

    DomainSpec d;
    d.dim = 3;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = {};
    d.modes_per_dim = 2;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = {};
    d.scale = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = {};
    d.lengths = { 0.0, 1.0 };
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("1d eigenvalues and fractional powers")
{
    DomainSpec d;
    d.lengths = { 2.5, 1.0 };
    d.modes_per_dim = 16;
    const FractionalParams p { 0.7, 0.6 };
    BasisPtr b = build_basis(d, p);
    REQUIRE(b->size() == 16);
    for (int n = 0; n < 16; ++n) {
        const double lam = std::pow((n + 1) * kPi / 2.5, 2.0);
        CHECK(b->eigenvalues()(n) == doctest::Approx(lam).epsilon(1e-14));
        CHECK(b->frac_eigenvalues()(n) == doctest::Approx(std::pow(lam, 0.6)).epsilon(1e-14));
    }
}

TEST_CASE("scale dilates the domain")
{
    DomainSpec d;
    d.lengths = { 1.0, 1.0 };
    d.scale = 3.0;
    d.modes_per_dim = 8;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    CHECK(d.effective_length(0) == doctest::Approx(3.0));
    CHECK(b->eigenvalues()(0) == doctest::Approx(std::pow(kPi / 3.0, 2.0)).epsilon(1e-14));
    CHECK(b->collocation(0)(0) == doctest::Approx(3.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("2d eigenvalue flattening, first index fastest")
{
    DomainSpec d;
    d.dim = 2;
    d.lengths = { 1.0, 2.0 };
    d.modes_per_dim = 6;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    REQUIRE(b->size() == 36);
    for (int n2 = 0; n2 < 6; ++n2)
        for (int n1 = 0; n1 < 6; ++n1) {
            const double lam = std::pow((n1 + 1) * kPi / 1.0, 2.0)
                               + std::pow((n2 + 1) * kPi / 2.0, 2.0);
            CHECK(b->eigenvalues()(n2 * 6 + n1) == doctest::Approx(lam).epsilon(1e-13));
        }
}

TEST_CASE("transform round trip in 1d")
{
    std::mt19937 rng(7);
    DomainSpec d;
    d.lengths = { 1.7, 1.0 };
    d.modes_per_dim = 33;
    BasisPtr b = build_basis(d, { 0.5, 0.5 });
    const Eigen::ArrayXd w = random_array(rng, b->size());
    const SpectralField f(b, w);
    const SpectralField back = from_grid(to_grid(f), b);
    CHECK((back.coeffs() - w).abs().maxCoeff() <= 1e-12);

    const Eigen::ArrayXd g = random_array(rng, b->size());
    const Eigen::ArrayXd g2 = to_grid(from_grid(g, b));
    CHECK((g2 - g).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("transform round trip in 2d")
{
    std::mt19937 rng(8);
    DomainSpec d;
    d.dim = 2;
    d.lengths = { 1.0, 0.8 };
    d.modes_per_dim = 12;
    BasisPtr b = build_basis(d, { 0.5, 0.5 });
    const Eigen::ArrayXd w = random_array(rng, b->size());
    const SpectralField f(b, w);
    CHECK((from_grid(to_grid(f), b).coeffs() - w).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("grid ordering in 2d matches eval_at")
{
    DomainSpec d;
    d.dim = 2;
    d.lengths = { 1.0, 2.0 };
    d.modes_per_dim = 5;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(25);
    w(2 * 5 + 1) = 1.0; // mode (n1=1, n2=2)
    const SpectralField f(b, w);
    const Eigen::ArrayXd grid = to_grid(f);
    for (int i2 = 0; i2 < 5; ++i2)
        for (int i1 = 0; i1 < 5; ++i1) {
            Eigen::MatrixXd pt(1, 2);
            pt(0, 0) = b->collocation(0)(i1);
            pt(0, 1) = b->collocation(1)(i2);
            CHECK(grid(i2 * 5 + i1) == doctest::Approx(eval_at(f, pt)(0)).epsilon(1e-12));
        }
}

TEST_CASE("fractional laplacian acts diagonally")
{
    DomainSpec d;
    d.lengths = { 1.0, 1.0 };
    d.modes_per_dim = 8;
    BasisPtr b = build_basis(d, { 1.0, 0.5 });
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(8);
    w(3) = 2.0;
    const SpectralField lap = apply_fractional_laplacian(SpectralField(b, w));
    CHECK(lap.coeffs()(3) == doctest::Approx(2.0 * std::pow(16.0 * kPi * kPi, 0.5)).epsilon(1e-13));
    for (int n = 0; n < 8; ++n)
        if (n != 3)
            CHECK(lap.coeffs()(n) == 0.0);
}

TEST_CASE("norms")
{
    DomainSpec d;
    d.lengths = { 1.0, 1.0 };
    d.modes_per_dim = 16;
    BasisPtr b = build_basis(d, { 1.0, 0.5 });
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(16);
    w(0) = 1.0;
    const SpectralField f(b, w);
    CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hs_norm(f) == doctest::Approx(std::sqrt(std::pow(kPi * kPi, 0.5))).epsilon(1e-13));
    // First eigenfunction peaks at the midpoint with value sqrt(2/L).
    CHECK(sup_norm(f) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    Eigen::ArrayXd w2 = Eigen::ArrayXd::Zero(16);
    w2(0) = 3.0;
    w2(5) = -4.0;
    CHECK(l2_norm(SpectralField(b, w2)) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("sup_norm catches inter-node peaks")
{
    DomainSpec d;
    d.lengths = { 1.0, 1.0 };
    d.modes_per_dim = 8;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    // With 9 cells the ground mode peaks exactly at the middle midpoint,
    // strictly between collocation nodes.
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(8);
    w(0) = 1.0;
    const double grid_max = to_grid(SpectralField(b, w)).abs().maxCoeff();
    CHECK(sup_norm(SpectralField(b, w)) > grid_max);
    CHECK(sup_norm(SpectralField(b, w)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("eval_at bounds checking")
{
    DomainSpec d;
    d.lengths = { 1.0, 1.0 };
    d.modes_per_dim = 8;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    const SpectralField f = SpectralField::zero(b);
    Eigen::MatrixXd pt(1, 1);
    pt(0, 0) = 1.5;
    CHECK_THROWS_AS(eval_at(f, pt), std::domain_error);
    pt(0, 0) = -0.1;
    CHECK_THROWS_AS(eval_at(f, pt), std::domain_error);
    pt(0, 0) = 0.5;
    CHECK(eval_at(f, pt)(0) == 0.0);
    Eigen::MatrixXd wrong(1, 2);
    wrong.setConstant(0.5);
    CHECK_THROWS_AS(eval_at(f, wrong), std::invalid_argument);
}

TEST_CASE("coefficient count must match basis")
{
    DomainSpec d;
    d.modes_per_dim = 8;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    CHECK_THROWS_AS(SpectralField(b, Eigen::ArrayXd::Zero(7)), std::invalid_argument);
    CHECK_THROWS_AS(from_grid(Eigen::ArrayXd::Zero(9), b), std::invalid_argument);
}

TEST_CASE("band limited functions are represented exactly")
{
    DomainSpec d;
    d.lengths = { 2.0, 1.0 };
    d.modes_per_dim = 24;
    BasisPtr b = build_basis(d, { 1.0, 1.0 });
    // u(x) = sin(pi x / 2) + 0.25 sin(3 pi x / 2)
    Eigen::ArrayXd grid(b->size());
    for (int i = 0; i < b->size(); ++i) {
        const double x = b->collocation(0)(i);
        grid(i) = std::sin(kPi * x / 2.0) + 0.25 * std::sin(3.0 * kPi * x / 2.0);
    }
    const SpectralField f = from_grid(grid, b);
    CHECK(f.coeffs()(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.coeffs()(2) == doctest::Approx(0.25).epsilon(1e-12));
    for (int n = 0; n < 24; ++n)
        if (n != 0 && n != 2)
            CHECK(std::abs(f.coeffs()(n)) <= 1e-13);
}
