#pragma once

// Steady-state analysis and quench classification: monotone iteration
// for the stationary problem, the global/quenched dichotomy, critical
// domain-size bisection, and parameter sweeps.

#include "fracquench/solver.hpp"

#include <limits>
#include <string>
#include <vector>

namespace fq {

struct SteadyResult {
    enum class Status { converged, no_solution, max_iter };

    Status status = Status::max_iter;
    SpectralField v; // minimal solution when converged, last iterate otherwise
    int iterations = 0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    bool heuristic_stop = false; // no_solution declared by the stagnation check
};

const char* to_string(SteadyResult::Status status);

/// Monotone iteration v^{k+1} = G_s f(v^k) from v^0 = 0. Converged when
/// the sup-norm change is <= tol and the stationary residual is <= 10 tol;
/// no_solution when the increasing iterates cross c - tol.
SteadyResult steady_solve(const DomainSpec& domain, const FractionalParams& params,
                          const ReactionSpec& reaction, double tol = 1e-8,
                          int max_iter = 100000);

/// Combine the time solver with the steady oracle. Requires u0 = 0.
/// steady_out, when non-null, receives the steady solve result.
QuenchReport classify(const SolveConfig& cfg, double steady_tol = 1e-8,
                      SteadyResult* steady_out = nullptr);

struct CriticalSizeResult {
    double lo = 0.0; // largest scale classified global
    double hi = 0.0; // smallest scale classified quenching
    std::vector<std::pair<double, QuenchReport::Classification>> evaluations;
    int modes_per_dim = 0;
    QuenchReport::Classification lo_time_check = QuenchReport::Classification::inconclusive;
    QuenchReport::Classification hi_time_check = QuenchReport::Classification::inconclusive;
};

/// Bisect the dilation scale between a global lo and a quenching hi,
/// classifying with steady_solve; the returned bracket endpoints get a
/// confirming time-solver run (which may stay inconclusive very close
/// to the threshold). time_cfg, when given, supplies the time-solver
/// parameters for the confirmation runs.
CriticalSizeResult critical_size(const DomainSpec& base, const FractionalParams& params,
                                 const ReactionSpec& reaction, double lo, double hi,
                                 double tol, const SolveConfig* time_cfg = nullptr);

struct SweepCell {
    double alpha = 0.0;
    double s = 0.0;
    double scale = 0.0;
    QuenchReport report;
    SteadyResult::Status steady_status = SteadyResult::Status::max_iter;
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::string error; // empty on success
};

/// classify() over the tensor grid alphas x ss x scales (scale fastest),
/// scheduled across FRACQ_THREADS workers, collected in grid order.
std::vector<SweepCell> sweep(const std::vector<double>& alphas, const std::vector<double>& ss,
                             const std::vector<double>& scales, const SolveConfig& base,
                             double steady_tol = 1e-8);

} // namespace fq
