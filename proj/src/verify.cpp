#include "fracquench/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace fq {

namespace {

using Checks = std::vector<CheckResult>;

void add(Checks& out, const std::string& suite, const std::string& name, double margin,
         const std::string& detail = {})
{
    out.push_back({ suite, name, margin >= 0.0 && std::isfinite(margin), margin, detail });
}

double resolve_gamma(const VerifyOptions& opt, double x)
{
    return opt.gamma ? opt.gamma(x) : gamma_fn(x);
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

Eigen::ArrayXd random_coeffs(std::mt19937& rng, int n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::ArrayXd c(n);
    for (int k = 0; k < n; ++k)
        c(k) = u(rng) / (1.0 + k);
    return c;
}

// Tail cutoff for integrals of Psi_alpha against bounded weights.
double wright_cutoff(double alpha, double weight_growth)
{
    double cut = 2.0;
    while (cut < 400.0 && wright(alpha, cut) * std::pow(cut, weight_growth) > 1e-13)
        cut *= 1.5;
    return cut;
}

// ---- special_fn ----

Checks suite_special(const VerifyOptions& opt)
{
    Checks out;
    const std::string suite = "special_fn";

    {
        const MittagLefflerEvaluator e11(1.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double z = -30.0 + 35.0 * i / 199.0;
            worst = std::max(worst, std::abs(e11(z) - std::exp(z)) / std::exp(z));
        }
        add(out, suite, "E11_matches_exp", 1e-12 - worst, "worst rel " + fmt(worst));
    }
    {
        double worst = 0.0;
        for (const double alpha : { 0.3, 0.5, 0.8, 1.0 })
            for (const double beta : { 0.3, 0.5, 1.0, 1.7 }) {
                const double want = 1.0 / resolve_gamma(opt, beta);
                worst = std::max(worst,
                                 std::abs(mittag_leffler(alpha, beta, 0.0) - want) / want);
            }
        add(out, suite, "E_at_zero_is_reciprocal_gamma", 1e-14 - worst, "worst rel " + fmt(worst));
    }
    {
        // Adjacent evaluation regimes must agree where they hand over:
        // series vs contour at |z| = r0, contour vs asymptotic at |z| = r1.
        MLRegimeConfig force_contour_low;
        force_contour_low.series_radius = 0.5;
        MLRegimeConfig force_contour_high;
        force_contour_high.asymptotic_radius = 1e9;
        double worst = 0.0;
        for (const double alpha : { 0.3, 0.5, 0.8 })
            for (const double beta : { alpha, 1.0 }) {
                const double a = mittag_leffler(alpha, beta, -1.0);
                const double b = mittag_leffler(alpha, beta, -1.0, force_contour_low);
                worst = std::max(worst, std::abs(a - b) / std::abs(a));
                const double c = mittag_leffler(alpha, beta, -10.0);
                const double d = mittag_leffler(alpha, beta, -10.0, force_contour_high);
                worst = std::max(worst, std::abs(c - d) / std::abs(c));
            }
        add(out, suite, "regime_switch_continuity", 1e-8 - worst, "worst rel " + fmt(worst));
    }
    {
        double margin = 1.0;
        for (const double alpha : { 0.3, 0.5, 0.8, 1.0 }) {
            const MittagLefflerEvaluator e(alpha, 1.0);
            double prev = e(0.0);
            for (int i = 1; i <= 10000; ++i) {
                const double v = e(-0.01 * i);
                margin = std::min(margin, v);                    // positive
                margin = std::min(margin, prev - v + 1e-15);      // non-increasing
                prev = v;
            }
        }
        add(out, suite, "E_monotone_positive", margin, "min margin " + fmt(margin));
    }
    {
        // Semigroup of RL integrals on a smooth series, refinement ratio.
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (const double a : { 0.3, 0.5, 0.8 })
            for (const double b : { 0.3, 0.5, 0.8 }) {
                double prev_err = 0.0;
                for (const int n : { 200, 400 }) {
                    ScalarSeries v;
                    v.step = 1.0 / n;
                    v.values.resize(n + 1);
                    for (int i = 0; i <= n; ++i)
                        v.values(i) = std::sin(3.0 * i * v.step) + 1.0;
                    const ScalarSeries lhs = rl_integral_scalar(rl_integral_scalar(v, a), b);
                    const ScalarSeries rhs = rl_integral_scalar(v, a + b);
                    const double err = (lhs.values - rhs.values).abs().maxCoeff();
                    if (prev_err > 0.0)
                        worst_ratio = std::min(worst_ratio, prev_err / err);
                    prev_err = err;
                }
            }
        add(out, suite, "rl_semigroup_refinement", worst_ratio - 1.5,
            "worst ratio " + fmt(worst_ratio));
    }
    {
        // Caputo is a left inverse of J^alpha under refinement; measured on
        // t >= 0.1 (the first node carries an O(1) composition defect).
        double worst_rate = std::numeric_limits<double>::infinity();
        for (const double a : { 0.3, 0.5, 0.8 }) {
            double prev_err = 0.0;
            for (const int n : { 400, 800 }) {
                ScalarSeries v;
                v.step = 1.0 / n;
                v.values.resize(n + 1);
                for (int i = 0; i <= n; ++i)
                    v.values(i) = std::cos(2.0 * i * v.step);
                const ScalarSeries round = caputo_scalar(rl_integral_scalar(v, a), a);
                double err = 0.0;
                for (int i = n / 10; i <= n; ++i)
                    err = std::max(err, std::abs(round.values(i) - v.values(i)));
                if (prev_err > 0.0)
                    worst_rate = std::min(worst_rate, std::log2(prev_err / err));
                prev_err = err;
            }
        }
        add(out, suite, "caputo_left_inverse_rate", worst_rate - 0.8,
            "worst rate " + fmt(worst_rate));
    }
    {
        double worst = 0.0;
        for (const double alpha : { 0.3, 0.5, 0.8 })
            for (const int r : { 0, 1, 2 }) {
                const double cut = wright_cutoff(alpha, r);
                const double got = adaptive_simpson(
                    [&](double t) { return wright(alpha, t) * std::pow(t, r); }, 0.0, cut, 1e-9);
                const double want =
                    resolve_gamma(opt, 1.0 + r) / resolve_gamma(opt, 1.0 + alpha * r);
                worst = std::max(worst, std::abs(got - want) / want);
            }
        add(out, suite, "wright_moments", 1e-6 - worst, "worst rel " + fmt(worst));
    }
    {
        double worst = 0.0;
        for (const double alpha : { 0.3, 0.5, 0.8 })
            for (const double z : { 0.5, 1.0, 5.0 }) {
                const double cut = wright_cutoff(alpha, 0.0);
                const double got = adaptive_simpson(
                    [&](double t) { return wright(alpha, t) * std::exp(-z * t); }, 0.0, cut, 1e-9);
                const double want = mittag_leffler(alpha, 1.0, -z);
                worst = std::max(worst, std::abs(got - want) / std::abs(want));
            }
        add(out, suite, "wright_laplace_transform", 1e-6 - worst, "worst rel " + fmt(worst));
    }
    return out;
}

// ---- operators ----

Checks suite_operators(const VerifyOptions& opt)
{
    Checks out;
    const std::string suite = "operators";
    std::mt19937 rng(opt.seed);

    DomainSpec domain;
    domain.modes_per_dim = 64;

    {
        const int fields = opt.quick ? 100 : 1000;
        double margin = std::numeric_limits<double>::infinity();
        for (const double alpha : { 0.3, 0.5, 0.8 }) {
            FractionalParams params { alpha, 0.6 };
            BasisPtr basis = build_basis(domain, params);
            const double pbound = 1.0 / resolve_gamma(opt, alpha);
            std::vector<OperatorStamp> s_stamps, p_stamps;
            for (const double t : { 0.01, 0.1, 1.0, 10.0 }) {
                s_stamps.push_back(make_S_stamp(t, *basis));
                p_stamps.push_back(make_P_stamp(t, *basis));
            }
            for (int i = 0; i < fields; ++i) {
                const SpectralField u(basis, random_coeffs(rng, basis->size()));
                const double hs = hs_norm(u);
                for (std::size_t j = 0; j < s_stamps.size(); ++j) {
                    margin = std::min(margin,
                                      hs * (1.0 + 1e-12) - hs_norm(s_stamps[j].apply(u)));
                    margin = std::min(margin, hs * pbound * (1.0 + 1e-12)
                                                  - hs_norm(p_stamps[j].apply(u)));
                }
            }
        }
        add(out, suite, "contraction_bounds", margin, "min margin " + fmt(margin));
    }
    {
        FractionalParams params { 0.6, 0.7 };
        BasisPtr basis = build_basis(domain, params);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 50; ++i) {
            Eigen::ArrayXd grid(basis->size());
            for (int g = 0; g < basis->size(); ++g)
                grid(g) = u01(rng);
            const SpectralField u = from_grid(grid, basis);
            const double sup = sup_norm(u);
            for (const double t : { 0.05, 0.5, 5.0 }) {
                const double low = to_grid(apply_S(t, u)).minCoeff();
                margin = std::min(margin, low + 1e-8 * sup);
            }
        }
        add(out, suite, "positivity_preservation", margin, "min margin " + fmt(margin));
    }
    {
        // J^{1-alpha} of tau^{alpha-1} E_{alpha,alpha}(-mu tau^alpha)
        // reproduces E_{alpha,1}(-mu t^alpha).
        double worst = 0.0;
        for (const double alpha : { 0.3, 0.5, 0.8 })
            for (const double mu : { 1.0, 10.0 })
                worst = std::max(worst, rl_reconstruction_check(alpha, mu, 1e-3, 1000, 0.1));
        add(out, suite, "rl_reconstructs_S", 5e-3 - worst, "worst abs " + fmt(worst));
    }
    {
        // Caputo eigenrelation with error decreasing under refinement.
        double worst = 0.0;
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (const double alpha : { 0.3, 0.5, 0.8 }) {
            const MittagLefflerEvaluator ea1(alpha, 1.0);
            const double mu = 1.0;
            double prev_err = 0.0;
            for (const double h : { 1e-3, 5e-4 }) {
                const int n = static_cast<int>(std::lround(1.0 / h));
                ScalarSeries v;
                v.step = h;
                v.values.resize(n + 1);
                for (int i = 0; i <= n; ++i)
                    v.values(i) = ea1(-mu * std::pow(i * h, alpha));
                const ScalarSeries d = caputo_scalar(v, alpha);
                double err = 0.0;
                for (int i = static_cast<int>(0.1 / h); i <= n; ++i)
                    err = std::max(err, std::abs(d.values(i) + mu * v.values(i)));
                if (prev_err == 0.0) {
                    worst = std::max(worst, err);
                } else {
                    worst_ratio = std::min(worst_ratio, prev_err / err);
                }
                prev_err = err;
            }
        }
        add(out, suite, "caputo_eigenrelation", std::min(5e-3 - worst, worst_ratio - 1.0),
            "worst abs " + fmt(worst) + ", refine ratio " + fmt(worst_ratio));
    }
    {
        FractionalParams params { 0.5, 0.6 };
        BasisPtr basis = build_basis(domain, params);
        // Smooth the random field: the t^alpha decay rate is only uniform
        // over fields with decaying coefficients, i.e. in the operator
        // domain; a rough field keeps O(1) deviation down to tiny t.
        const Eigen::ArrayXd smooth =
            random_coeffs(rng, basis->size()) / (1.0 + basis->frac_eigenvalues());
        const SpectralField u(basis, smooth);
        double margin = std::numeric_limits<double>::infinity();
        double prev = std::numeric_limits<double>::infinity();
        double first = 0.0;
        for (int e = 1; e <= 6; ++e) {
            const double t = std::pow(10.0, -e);
            const double dev = hs_norm(SpectralField(
                basis, apply_S(t, u).coeffs() - u.coeffs()));
            margin = std::min(margin, prev - dev);
            if (e == 1)
                first = dev;
            prev = dev;
        }
        // The decay is only of order t^alpha, so require a solid relative
        // drop over five decades rather than an absolute tail bound.
        margin = std::min(margin, 0.1 * first - prev);
        add(out, suite, "strong_continuity", margin, "smallest-t dev " + fmt(prev));
    }
    {
        double worst = 0.0;
        worst = std::max(worst, subordination_check(0.5, 1.0, 1.0, 256));
        worst = std::max(worst, subordination_check(0.3, 5.0, 0.5, 256));
        worst = std::max(worst, subordination_check(0.8, 0.1, 2.0, 256));
        add(out, suite, "subordination_identity", 1e-6 - worst, "worst abs " + fmt(worst));
    }
    return out;
}

// ---- solver ----

SolveConfig interval_config(double alpha, double s, double length, int modes, double h,
                            double t_max)
{
    SolveConfig cfg;
    cfg.params = { alpha, s };
    cfg.domain.dim = 1;
    cfg.domain.lengths = { length, length };
    cfg.domain.modes_per_dim = modes;
    cfg.reaction.kind = ReactionSpec::Kind::inverse_power;
    cfg.reaction.c = 1.0;
    cfg.reaction.p = 1.0;
    cfg.h = h;
    cfg.t_max = t_max;
    cfg.quench_eps = 1e-3;
    cfg.h_min = 1e-8;
    return cfg;
}

Checks suite_solver(const VerifyOptions& opt)
{
    Checks out;
    const std::string suite = "solver";
    std::mt19937 rng(opt.seed + 1);

    {
        SolveConfig cfg = interval_config(0.6, 0.7, 1.0, 32, 0.05, 0.5);
        cfg.reaction.kind = ReactionSpec::Kind::zero;
        BasisPtr basis = build_basis(cfg.domain, cfg.params);
        Eigen::ArrayXd c0 = random_coeffs(rng, basis->size()).abs() * 0.05;
        cfg.u0_coeffs = c0;
        const Trajectory traj = run(cfg);
        double worst = 0.0;
        const SpectralField u0(basis, c0);
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const Eigen::ArrayXd want = apply_S(traj.times[i], u0).coeffs();
            worst = std::max(worst, (traj.states[i].coeffs() - want).abs().maxCoeff());
        }
        add(out, suite, "homogeneous_matches_S", 1e-12 - worst, "worst abs " + fmt(worst));
    }

    const double tol = 1e-8; // of c = 1
    for (const bool quenching : { false, true }) {
        SolveConfig cfg = quenching ? interval_config(0.7, 0.6, 10.0, 32, 1e-2, 20.0)
                                    : interval_config(0.7, 0.6, 0.3, 32, 1e-2, 2.0);
        const std::string tag = quenching ? "quenching" : "global";
        QuenchReport rep;
        const Trajectory traj = run(cfg, &rep);
        const bool mono_ok = monotonicity_condition(cfg);

        double pos_margin = std::numeric_limits<double>::infinity();
        double mono_margin = std::numeric_limits<double>::infinity();
        double bound_margin = std::numeric_limits<double>::infinity();
        Eigen::ArrayXd prev;
        for (std::size_t i = 0; i < traj.states.size(); ++i) {
            const Eigen::ArrayXd g = to_grid(traj.states[i]);
            pos_margin = std::min(pos_margin, g.minCoeff() + tol);
            bound_margin = std::min(bound_margin, cfg.reaction.c - traj.max_values[i]);
            if (i > 0 && mono_ok)
                mono_margin = std::min(mono_margin, (g - prev).minCoeff() + tol);
            prev = g;
        }
        add(out, suite, "positivity_minimum_" + tag, pos_margin,
            "min grid margin " + fmt(pos_margin));
        add(out, suite, "time_monotonicity_" + tag, mono_margin,
            "min increment " + fmt(mono_margin));
        add(out, suite, "bounded_below_c_" + tag, bound_margin,
            "min gap to c " + fmt(bound_margin));
        if (quenching) {
            const double t1t2 = [&] {
                const auto [t1, t2] = existence_horizon(cfg, 0.5);
                return std::min(t1, t2);
            }();
            const double tq_lo = rep.t_q_bracket ? rep.t_q_bracket->first
                                                 : -std::numeric_limits<double>::infinity();
            add(out, suite, "horizon_below_quench_time", tq_lo - t1t2,
                "T_pred " + fmt(t1t2) + ", T_q lower " + fmt(tq_lo));
        }
    }
    return out;
}

// ---- quench_analysis ----

Checks suite_quench(const VerifyOptions&)
{
    Checks out;
    const std::string suite = "quench_analysis";

    {
        // Monotone iteration, run explicitly to observe the iterates.
        DomainSpec domain;
        domain.modes_per_dim = 64;
        domain.lengths = { 1.0, 1.0 };
        FractionalParams params { 0.7, 0.6 };
        ReactionSpec reaction;
        BasisPtr basis = build_basis(domain, params);
        Eigen::ArrayXd v = Eigen::ArrayXd::Zero(basis->size());
        double margin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 200; ++k) {
            const Eigen::ArrayXd coeffs =
                from_grid(reaction(v), basis).coeffs() / basis->frac_eigenvalues();
            const Eigen::ArrayXd next = to_grid(SpectralField(basis, coeffs));
            margin = std::min(margin, (next - v).minCoeff() + 1e-10);
            v = next;
        }
        add(out, suite, "monotone_iteration", margin, "min increment " + fmt(margin));
    }
    {
        DomainSpec domain;
        domain.modes_per_dim = 64;
        FractionalParams params { 0.7, 0.6 };
        ReactionSpec reaction;
        domain.scale = 0.3;
        const SteadyResult small = steady_solve(domain, params, reaction, 1e-8);
        double margin = small.status == SteadyResult::Status::converged
                            ? 10.0 * 1e-8 - small.residual
                            : -1.0;
        add(out, suite, "steady_converges_small_domain", margin,
            std::string(to_string(small.status)) + ", residual " + fmt(small.residual));

        domain.scale = 10.0;
        const SteadyResult large = steady_solve(domain, params, reaction, 1e-8);
        add(out, suite, "steady_no_solution_large_domain",
            large.status == SteadyResult::Status::no_solution ? 1.0 : -1.0,
            to_string(large.status));
    }
    {
        double margin = 1.0;
        std::string detail;
        for (const double scale : { 0.3, 10.0 }) {
            SolveConfig cfg = interval_config(0.7, 0.6, 1.0, 32, 1e-2, 20.0);
            cfg.domain.scale = scale;
            const QuenchReport rep = classify(cfg);
            const bool agrees = rep.steady_agrees && *rep.steady_agrees;
            const bool expected = rep.classification
                                  == (scale < 1.0 ? QuenchReport::Classification::global
                                                  : QuenchReport::Classification::quenched);
            if (!agrees || !expected)
                margin = -1.0;
            detail += std::string(detail.empty() ? "" : "; ") + fmt(scale) + " -> "
                      + to_string(rep.classification);
        }
        add(out, suite, "classify_agreement", margin, detail);
    }
    return out;
}

} // namespace

std::vector<CheckResult> verify_suite(const std::string& suite, const VerifyOptions& options)
{
    if (suite == "special_fn")
        return suite_special(options);
    if (suite == "operators")
        return suite_operators(options);
    if (suite == "solver")
        return suite_solver(options);
    if (suite == "quench_analysis")
        return suite_quench(options);
    throw std::invalid_argument("verify: unknown suite '" + suite + "'");
}

std::vector<CheckResult> verify_all(const VerifyOptions& options)
{
    Checks out;
    for (const char* suite : { "special_fn", "operators", "solver", "quench_analysis" }) {
        Checks part = verify_suite(suite, options);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

bool all_pass(const std::vector<CheckResult>& results)
{
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.pass; });
}

std::string format_check_table(const std::vector<CheckResult>& results)
{
    std::string out = "suite             check                              status  margin\n";
    for (const CheckResult& r : results) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-17s %-34s %-7s %11.3e  %s\n", r.suite.c_str(),
                      r.name.c_str(), r.pass ? "pass" : "FAIL", r.margin, r.detail.c_str());
        out += line;
    }
    return out;
}

} // namespace fq
