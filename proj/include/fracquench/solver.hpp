#pragma once

// Mild-solution time stepper: exact per-mode Mittag-Leffler kernel
// weights with the nonlinearity frozen at the left endpoint of each
// history cell, and step halving near quench.

#include "fracquench/operators.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace fq {

struct ReactionSpec {
    // `zero` is a degenerate test reaction (f identically 0) that turns
    // the scheme into the pure solution-operator evolution.
    enum class Kind { inverse_power, exponential_singular, zero };

    Kind kind = Kind::inverse_power;
    double c = 1.0;   // quenching ceiling
    double p = 1.0;   // exponent of 1/(c-u)^p
    double f_max_cutoff = 1e12;

    /// f(u); +inf at and above the ceiling.
    double operator()(double u) const;
    Eigen::ArrayXd operator()(const Eigen::ArrayXd& u) const;

    /// Sup-norm Lipschitz constant of f on {|u| <= r}, r < c.
    double lipschitz_at(double r) const;

    void validate() const;
};

struct SolveConfig {
    DomainSpec domain;
    FractionalParams params;
    ReactionSpec reaction;
    std::optional<Eigen::ArrayXd> u0_coeffs; // default zero field
    double h = 1e-3;
    double t_max = 1.0;
    double quench_eps = 1e-3; // defaults to 1e-3*c when resolved from file
    double h_min = 1e-10;
    int snapshot_every = 0; // 0 = no snapshots
    // Step budget guard: a run stuck at h_min below the horizon ends with
    // status step_underflow instead of looping.
    long max_steps = 2000000;
    MLRegimeConfig ml;

    void validate() const;
};

enum class RunStatus { running, reached_horizon, quenched, step_underflow };

const char* to_string(RunStatus status);

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<double> max_values; // sup norm per stored state
    RunStatus status = RunStatus::running;
};

struct QuenchReport {
    enum class Classification { quenched, global, inconclusive };

    Classification classification = Classification::inconclusive;
    std::optional<std::pair<double, double>> t_q_bracket;
    Eigen::MatrixXd quench_points; // rows = collocation argmax set
    std::optional<bool> steady_agrees;
};

const char* to_string(QuenchReport::Classification c);

/// Owns the history caches (frozen reaction coefficients and per-offset
/// Mittag-Leffler stamp tables) for one run. Times live on an integer
/// tick lattice so offsets stay exact across step halving.
class HistoryStepper {
public:
    explicit HistoryStepper(SolveConfig cfg);

    /// Resume from an existing trajectory produced by this scheme; used
    /// by the single-step entry point.
    HistoryStepper(SolveConfig cfg, const Trajectory& history);

    /// Advance by one accepted step (halving internally as needed).
    /// Returns false once the trajectory is terminal.
    bool advance();

    const Trajectory& trajectory() const { return traj_; }
    const SolveConfig& config() const { return cfg_; }
    const BasisPtr& basis() const { return basis_; }
    double current_step() const { return unit_; }

    QuenchReport report() const;

private:
    const Eigen::ArrayXd& stamp_at(std::int64_t offset_ticks);
    void halve();
    void append_state(std::int64_t tick, SpectralField state, double sup);

    SolveConfig cfg_;
    BasisPtr basis_;
    MittagLefflerEvaluator ml_;
    Trajectory traj_;
    std::vector<std::int64_t> ticks_;
    std::vector<Eigen::ArrayXd> reaction_coeffs_; // from_grid(f(u_j))
    std::unordered_map<std::int64_t, Eigen::ArrayXd> stamps_; // E_{a,1}(-mu_k (off*unit)^a)
    double unit_; // physical seconds per tick; equals the current step size
};

/// Advance a trajectory by one step (rebuilds history caches; prefer
/// HistoryStepper for long runs).
Trajectory step(const Trajectory& traj, const SolveConfig& cfg);

/// Run to the horizon / quench / step underflow; fills the report.
Trajectory run(const SolveConfig& cfg, QuenchReport* report = nullptr);

/// Contraction-mapping horizons (T1, T2); the guaranteed existence
/// interval is min(T1, T2). L_f is the sup-norm constant at radius r.
std::pair<double, double> existence_horizon(const SolveConfig& cfg, double r);

/// True iff -(-Laplace)^s u0 + f(u0) > 0 at every collocation point.
bool monotonicity_condition(const SolveConfig& cfg);

} // namespace fq
