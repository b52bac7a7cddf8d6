#include "fracquench/quench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace fq {

const char* to_string(SteadyResult::Status status)
{
    switch (status) {
    case SteadyResult::Status::converged: return "converged";
    case SteadyResult::Status::no_solution: return "no_solution";
    case SteadyResult::Status::max_iter: return "max_iter";
    }
    return "unknown";
}

SteadyResult steady_solve(const DomainSpec& domain, const FractionalParams& params,
                          const ReactionSpec& reaction, double tol, int max_iter)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("steady_solve: tol must be positive");
    reaction.validate();

    BasisPtr basis = build_basis(domain, params);
    const Eigen::ArrayXd& mu = basis->frac_eigenvalues();
    const double c = reaction.c;

    SteadyResult res;
    Eigen::ArrayXd v_grid = Eigen::ArrayXd::Zero(basis->size());
    Eigen::ArrayXd coeffs = Eigen::ArrayXd::Zero(basis->size());
    double prev_change = std::numeric_limits<double>::infinity();
    int stagnant_checks = 0;

    for (int k = 1; k <= max_iter; ++k) {
        const Eigen::ArrayXd fv = reaction(v_grid);
        if (!fv.allFinite()) {
            res.status = SteadyResult::Status::no_solution;
            res.v = SpectralField(basis, std::move(coeffs));
            res.iterations = k;
            return res;
        }
        const Eigen::ArrayXd f_coeffs = from_grid(fv, basis).coeffs();
        Eigen::ArrayXd next_coeffs = f_coeffs / mu;
        const Eigen::ArrayXd next_grid = to_grid(SpectralField(basis, next_coeffs));
        const double change = (next_grid - v_grid).abs().maxCoeff();
        const double sup = next_grid.maxCoeff();

        v_grid = next_grid;
        coeffs = std::move(next_coeffs);
        res.iterations = k;

        if (sup >= c - tol) {
            res.status = SteadyResult::Status::no_solution;
            res.v = SpectralField(basis, std::move(coeffs));
            return res;
        }
        if (change <= tol) {
            // Stationary residual ||(-Lap)^s v - f(v)||_L2 at the new iterate.
            const Eigen::ArrayXd f_new = from_grid(reaction(v_grid), basis).coeffs();
            res.residual = std::sqrt((mu * coeffs - f_new).square().sum());
            if (res.residual <= 10.0 * tol) {
                res.status = SteadyResult::Status::converged;
                res.v = SpectralField(basis, std::move(coeffs));
                return res;
            }
        }
        if (k % 100 == 0) {
            // Iterates creeping toward c without contracting: call it
            // nonexistence rather than burning the full iteration budget.
            const bool stagnant = change >= prev_change * (1.0 - 1e-6);
            if (stagnant && sup >= 0.9 * c)
                ++stagnant_checks;
            else
                stagnant_checks = 0;
            prev_change = change;
            if (stagnant_checks >= 5) {
                res.status = SteadyResult::Status::no_solution;
                res.heuristic_stop = true;
                res.v = SpectralField(basis, std::move(coeffs));
                return res;
            }
        }
    }
    res.status = SteadyResult::Status::max_iter;
    res.v = SpectralField(basis, std::move(coeffs));
    const Eigen::ArrayXd f_last = from_grid(reaction(v_grid), basis).coeffs();
    res.residual = std::sqrt((mu * res.v.coeffs() - f_last).square().sum());
    return res;
}

QuenchReport classify(const SolveConfig& cfg, double steady_tol, SteadyResult* steady_out)
{
    if (cfg.u0_coeffs && cfg.u0_coeffs->abs().maxCoeff() != 0.0)
        throw std::invalid_argument("classify: requires u0 = 0");

    const SteadyResult steady =
        steady_solve(cfg.domain, cfg.params, cfg.reaction, steady_tol);
    if (steady_out)
        *steady_out = steady;

    QuenchReport rep;
    Trajectory traj = run(cfg, &rep);

    if (traj.status == RunStatus::quenched) {
        rep.classification = QuenchReport::Classification::quenched;
        rep.steady_agrees = (steady.status == SteadyResult::Status::no_solution);
        return rep;
    }
    if (traj.status == RunStatus::reached_horizon && traj.max_values.size() >= 3) {
        const std::size_t n = traj.max_values.size();
        const double d_last = std::abs(traj.max_values[n - 1] - traj.max_values[n - 2]);
        const double d_prev = std::abs(traj.max_values[n - 2] - traj.max_values[n - 3]);
        const bool settled = d_last <= d_prev;
        if (settled && steady.status == SteadyResult::Status::converged) {
            rep.classification = QuenchReport::Classification::global;
            rep.steady_agrees = true;
            return rep;
        }
        rep.classification = QuenchReport::Classification::inconclusive;
        rep.steady_agrees = settled ? std::optional<bool>(false) : std::nullopt;
        return rep;
    }
    rep.classification = QuenchReport::Classification::inconclusive;
    rep.steady_agrees = std::nullopt;
    return rep;
}

namespace {

SolveConfig default_time_cfg(const DomainSpec& domain, const FractionalParams& params,
                             const ReactionSpec& reaction)
{
    SolveConfig cfg;
    cfg.domain = domain;
    cfg.params = params;
    cfg.reaction = reaction;
    cfg.h = 1e-2;
    cfg.t_max = 20.0;
    cfg.quench_eps = 1e-3 * reaction.c;
    cfg.h_min = 1e-8;
    return cfg;
}

QuenchReport::Classification steady_class(const DomainSpec& domain,
                                          const FractionalParams& params,
                                          const ReactionSpec& reaction, double scale,
                                          double tol)
{
    DomainSpec d = domain;
    d.scale = scale;
    const SteadyResult r = steady_solve(d, params, reaction, tol);
    switch (r.status) {
    case SteadyResult::Status::converged:
        return QuenchReport::Classification::global;
    case SteadyResult::Status::no_solution:
        return QuenchReport::Classification::quenched;
    case SteadyResult::Status::max_iter:
        return QuenchReport::Classification::inconclusive;
    }
    return QuenchReport::Classification::inconclusive;
}

} // namespace

CriticalSizeResult critical_size(const DomainSpec& base, const FractionalParams& params,
                                 const ReactionSpec& reaction, double lo, double hi,
                                 double tol, const SolveConfig* time_cfg)
{
    if (!(lo > 0.0) || !(lo < hi))
        throw std::invalid_argument("critical_size: need 0 < lo < hi");
    if (!(tol > 0.0))
        throw std::invalid_argument("critical_size: tol must be positive");

    const double steady_tol = 1e-8;
    CriticalSizeResult out;
    out.modes_per_dim = base.modes_per_dim;

    const auto eval = [&](double scale) {
        const auto c = steady_class(base, params, reaction, scale, steady_tol);
        out.evaluations.emplace_back(scale, c);
        return c;
    };

    if (eval(lo) != QuenchReport::Classification::global)
        throw std::invalid_argument("critical_size: lo endpoint is not global");
    if (eval(hi) != QuenchReport::Classification::quenched)
        throw std::invalid_argument("critical_size: hi endpoint is not quenching");

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const auto c = eval(mid);
        if (c == QuenchReport::Classification::global)
            lo = mid;
        else
            hi = mid; // inconclusive steady iteration counts as the quench side
    }
    out.lo = lo;
    out.hi = hi;

    SolveConfig tcfg = time_cfg ? *time_cfg : default_time_cfg(base, params, reaction);
    tcfg.domain = base;
    tcfg.u0_coeffs.reset();
    tcfg.domain.scale = lo;
    out.lo_time_check = classify(tcfg, steady_tol).classification;
    tcfg.domain.scale = hi;
    out.hi_time_check = classify(tcfg, steady_tol).classification;
    return out;
}

std::vector<SweepCell> sweep(const std::vector<double>& alphas, const std::vector<double>& ss,
                             const std::vector<double>& scales, const SolveConfig& base,
                             double steady_tol)
{
    std::vector<SweepCell> cells(alphas.size() * ss.size() * scales.size());
    for (std::size_t ia = 0; ia < alphas.size(); ++ia)
        for (std::size_t is = 0; is < ss.size(); ++is)
            for (std::size_t ic = 0; ic < scales.size(); ++ic) {
                SweepCell& cell = cells[(ia * ss.size() + is) * scales.size() + ic];
                cell.alpha = alphas[ia];
                cell.s = ss[is];
                cell.scale = scales[ic];
            }

    int workers = 1;
    if (const char* env = std::getenv("FRACQ_THREADS")) {
        workers = std::atoi(env);
        if (workers < 1)
            throw std::invalid_argument("FRACQ_THREADS must be a positive integer");
    }
    workers = std::min<int>(workers, static_cast<int>(cells.size()));
    workers = std::max(workers, 1);

    std::atomic<std::size_t> next { 0 };
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size())
                return;
            SweepCell& cell = cells[i];
            try {
                SolveConfig cfg = base;
                cfg.params.alpha = cell.alpha;
                cfg.params.s = cell.s;
                cfg.domain.scale = cell.scale;
                cfg.u0_coeffs.reset();
                SteadyResult steady;
                cell.report = classify(cfg, steady_tol, &steady);
                cell.steady_status = steady.status;
                cell.residual = steady.residual;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return cells;
}

} // namespace fq
