#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracquench/operators.hpp"

#include <cmath>
#include <random>

using namespace fq;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Unit interval scaled to length pi so the first eigenvalue is exactly 1
// when s = 1.
BasisPtr pi_basis(double alpha, double s, int modes = 8)
{
    DomainSpec d;
    d.lengths = { kPi, 1.0 };
    d.modes_per_dim = modes;
    return build_basis(d, { alpha, s });
}

SpectralField single_mode(BasisPtr b, int n, double w0 = 1.0)
{
    Eigen::ArrayXd w = Eigen::ArrayXd::Zero(b->size());
    w(n) = w0;
    return SpectralField(std::move(b), w);
}
} // namespace

TEST_CASE("heat semigroup basics")
{
    BasisPtr b = pi_basis(1.0, 1.0);
    const SpectralField u = single_mode(b, 0, 1.0); // mu = 1
    CHECK(heat_semigroup(0.0, u).coeffs()(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(heat_semigroup(std::log(2.0), u).coeffs()(0)
          == doctest::Approx(0.5).epsilon(1e-13));
    CHECK_THROWS_AS(heat_semigroup(-1.0, u), std::domain_error);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::ArrayXd w(b->size());
        for (int n = 0; n < b->size(); ++n)
            w(n) = dist(rng);
        const SpectralField f(b, w);
        CHECK(hs_norm(heat_semigroup(0.3, f)) <= hs_norm(f) * (1.0 + 1e-12));
    }
}

TEST_CASE("apply_S values")
{
    BasisPtr b = pi_basis(0.5, 1.0);
    const SpectralField u = single_mode(b, 0);
    CHECK(apply_S(0.0, u).coeffs()(0) == doctest::Approx(1.0).epsilon(1e-15));
    // mu = 1, t = 1: E_{1/2,1}(-1) = e erfc(1)
    CHECK(apply_S(1.0, u).coeffs()(0)
          == doctest::Approx(0.427583576155807004).epsilon(1e-11));

    BasisPtr b1 = pi_basis(1.0, 1.0);
    const SpectralField v = single_mode(b1, 1); // mu = 4
    CHECK(apply_S(0.7, v).coeffs()(1)
          == doctest::Approx(heat_semigroup(0.7, v).coeffs()(1)).epsilon(1e-13));
    CHECK_THROWS_AS(apply_S(-0.1, u), std::domain_error);
}

TEST_CASE("apply_P values")
{
    BasisPtr b = pi_basis(0.5, 1.0);
    const SpectralField u = single_mode(b, 0);
    CHECK(apply_P(0.0, u).coeffs()(0)
          == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-13));
    CHECK(apply_P(1.0, u).coeffs()(0)
          == doctest::Approx(0.136606007391949283).epsilon(1e-11));

    BasisPtr b1 = pi_basis(1.0, 1.0);
    const SpectralField v = single_mode(b1, 0);
    CHECK(apply_P(0.4, v).coeffs()(0)
          == doctest::Approx(std::exp(-0.4)).epsilon(1e-13));
}

TEST_CASE("stamp multiplier ranges")
{
    for (double alpha : { 0.3, 0.5, 0.8 }) {
        BasisPtr b = pi_basis(alpha, 0.7, 32);
        for (double t : { 0.0, 0.01, 1.0, 50.0 }) {
            const OperatorStamp s = make_S_stamp(t, *b);
            CHECK(s.multipliers.minCoeff() > 0.0);
            CHECK(s.multipliers.maxCoeff() <= 1.0 + 1e-14);
            const OperatorStamp p = make_P_stamp(t, *b);
            CHECK(p.multipliers.minCoeff() > 0.0);
            CHECK(p.multipliers.maxCoeff() <= 1.0 / gamma_fn(alpha) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("contraction bounds over random fields")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DomainSpec d;
    d.modes_per_dim = 64;
    for (double alpha : { 0.3, 0.8 }) {
        BasisPtr b = build_basis(d, { alpha, 0.6 });
        const double pbound = 1.0 / gamma_fn(alpha);
        for (double t : { 0.01, 0.1, 1.0, 10.0 }) {
            const OperatorStamp s = make_S_stamp(t, *b);
            const OperatorStamp p = make_P_stamp(t, *b);
            for (int trial = 0; trial < 100; ++trial) {
                Eigen::ArrayXd w(b->size());
                for (int n = 0; n < b->size(); ++n)
                    w(n) = dist(rng);
                const SpectralField u(b, w);
                const double hs = hs_norm(u);
                CHECK(hs_norm(s.apply(u)) <= hs * (1.0 + 1e-12));
                CHECK(hs_norm(p.apply(u)) <= hs * pbound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("positivity preservation on grid values")
{
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    DomainSpec d;
    d.modes_per_dim = 48;
    BasisPtr b = build_basis(d, { 0.6, 0.7 });
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::ArrayXd g(b->size());
        for (int i = 0; i < b->size(); ++i)
            g(i) = dist(rng);
        const SpectralField u = from_grid(g, b);
        const double sup = sup_norm(u);
        for (double t : { 0.05, 0.5, 5.0 })
            CHECK(to_grid(apply_S(t, u)).minCoeff() >= -1e-8 * sup);
    }
}

TEST_CASE("strong continuity as t goes to zero")
{
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DomainSpec d;
    d.modes_per_dim = 32;
    BasisPtr b = build_basis(d, { 0.5, 0.6 });
    Eigen::ArrayXd w(b->size());
    for (int n = 0; n < b->size(); ++n)
        w(n) = dist(rng) / (1.0 + n);
    const SpectralField u(b, w);
    double first = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int e = 1; e <= 6; ++e) {
        const double t = std::pow(10.0, -e);
        const double dev =
            hs_norm(SpectralField(b, apply_S(t, u).coeffs() - u.coeffs()));
        CHECK(dev < prev);
        if (e == 1)
            first = dev;
        prev = dev;
    }
    // The decay is only of order t^alpha, so ask for a solid relative drop
    // rather than an absolute tail bound.
    CHECK(prev <= 0.1 * first);
}

TEST_CASE("mode-wise rl reconstruction of S from P")
{
    // J^{1-alpha} (tau^{alpha-1} E_{alpha,alpha}(-mu tau^alpha)) equals
    // E_{alpha,1}(-mu t^alpha); checked away from the origin node.
    for (double alpha : { 0.3, 0.5, 0.8 })
        for (double mu : { 1.0, 10.0 }) {
            const double worst = rl_reconstruction_check(alpha, mu, 1e-3, 1000, 0.1);
            CAPTURE(alpha);
            CAPTURE(mu);
            CHECK(worst <= 5e-3);
        }
    CHECK_THROWS_AS(rl_reconstruction_check(1.0, 1.0, 1e-3, 100, 0.05),
                    std::domain_error);
    CHECK_THROWS_AS(rl_reconstruction_check(0.5, -1.0, 1e-3, 100, 0.05),
                    std::domain_error);
}

TEST_CASE("subordination identity")
{
    CHECK(subordination_check(0.5, 1.0, 1.0, 256) <= 1e-6);
    CHECK(subordination_check(0.3, 5.0, 0.5, 256) <= 1e-6);
    CHECK(subordination_check(0.8, 0.1, 2.0, 256) <= 1e-6);
    CHECK_THROWS_AS(subordination_check(1.0, 1.0, 1.0, 256), std::domain_error);
    CHECK_THROWS_AS(subordination_check(0.5, -1.0, 1.0, 256), std::domain_error);
}
