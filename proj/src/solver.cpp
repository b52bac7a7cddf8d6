#include "fracquench/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fq {

namespace {

SpectralField initial_state(const SolveConfig& cfg, BasisPtr basis)
{
    if (!cfg.u0_coeffs)
        return SpectralField::zero(std::move(basis));
    return SpectralField(std::move(basis), *cfg.u0_coeffs);
}

} // namespace

double ReactionSpec::operator()(double u) const
{
    if (kind == Kind::zero)
        return 0.0;
    if (u >= c)
        return std::numeric_limits<double>::infinity();
    switch (kind) {
    case Kind::inverse_power:
        return std::pow(c - u, -p);
    case Kind::exponential_singular:
        return std::exp(u / (c - u));
    default:
        throw std::logic_error("ReactionSpec: unknown kind");
    }
}

Eigen::ArrayXd ReactionSpec::operator()(const Eigen::ArrayXd& u) const
{
    Eigen::ArrayXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i)
        out(i) = (*this)(u(i));
    return out;
}

double ReactionSpec::lipschitz_at(double r) const
{
    if (!(r >= 0.0) || !(r < c))
        throw std::domain_error("lipschitz_at: need 0 <= r < c");
    switch (kind) {
    case Kind::inverse_power:
        return p * std::pow(c - r, -(p + 1.0));
    case Kind::exponential_singular:
        // f'(u) = exp(u/(c-u)) * c/(c-u)^2, increasing on [0, c)
        return std::exp(r / (c - r)) * c / ((c - r) * (c - r));
    case Kind::zero:
        return 0.0;
    }
    throw std::logic_error("ReactionSpec: unknown kind");
}

void ReactionSpec::validate() const
{
    if (!(c > 0.0))
        throw std::invalid_argument("ReactionSpec: c must be positive");
    if (!(p > 0.0))
        throw std::invalid_argument("ReactionSpec: p must be positive");
    if (!(f_max_cutoff > 1.0))
        throw std::invalid_argument("ReactionSpec: f_max_cutoff must exceed 1");
}

void SolveConfig::validate() const
{
    domain.validate();
    params.validate();
    reaction.validate();
    ml.validate();
    if (!(h_min > 0.0) || !(h > h_min))
        throw std::invalid_argument("SolveConfig: need h > h_min > 0");
    if (!(t_max > 0.0))
        throw std::invalid_argument("SolveConfig: t_max must be positive");
    if (!(quench_eps > 0.0) || !(quench_eps < reaction.c))
        throw std::invalid_argument("SolveConfig: quench_eps must lie in (0, c)");
    if (snapshot_every < 0)
        throw std::invalid_argument("SolveConfig: snapshot_every must be >= 0");
    if (max_steps < 2)
        throw std::invalid_argument("SolveConfig: max_steps must be >= 2");
    if (u0_coeffs && u0_coeffs->size() != domain.total_modes())
        throw std::invalid_argument("SolveConfig: u0 coefficient count does not match domain");
}

const char* to_string(RunStatus status)
{
    switch (status) {
    case RunStatus::running: return "running";
    case RunStatus::reached_horizon: return "reached_horizon";
    case RunStatus::quenched: return "quenched";
    case RunStatus::step_underflow: return "step_underflow";
    }
    return "unknown";
}

const char* to_string(QuenchReport::Classification c)
{
    switch (c) {
    case QuenchReport::Classification::quenched: return "quenched";
    case QuenchReport::Classification::global: return "global";
    case QuenchReport::Classification::inconclusive: return "inconclusive";
    }
    return "unknown";
}

HistoryStepper::HistoryStepper(SolveConfig cfg)
    : cfg_(std::move(cfg)),
      basis_(build_basis(cfg_.domain, cfg_.params)),
      ml_(cfg_.params.alpha, 1.0, cfg_.ml),
      unit_(cfg_.h)
{
    cfg_.validate();

    SpectralField u0 = initial_state(cfg_, basis_);
    const Eigen::ArrayXd grid = to_grid(u0);
    if (grid.minCoeff() < -1e-9 * cfg_.reaction.c)
        throw std::invalid_argument("HistoryStepper: u0 must be nonnegative on the grid");
    const double sup = sup_norm(u0);
    if (sup >= cfg_.reaction.c)
        throw std::invalid_argument("HistoryStepper: sup norm of u0 must be below the ceiling");

    reaction_coeffs_.push_back(from_grid(cfg_.reaction(grid), basis_).coeffs());
    ticks_.push_back(0);
    traj_.times.push_back(0.0);
    traj_.states.push_back(std::move(u0));
    traj_.max_values.push_back(sup);
}

const Eigen::ArrayXd& HistoryStepper::stamp_at(std::int64_t offset_ticks)
{
    auto it = stamps_.find(offset_ticks);
    if (it != stamps_.end())
        return it->second;

    const Eigen::ArrayXd& mu = basis_->frac_eigenvalues();
    Eigen::ArrayXd e(mu.size());
    if (offset_ticks == 0) {
        e.setOnes();
    } else {
        const double ta = std::pow(offset_ticks * unit_, cfg_.params.alpha);
        for (Eigen::Index k = 0; k < mu.size(); ++k)
            e(k) = ml_(-mu(k) * ta);
    }
    return stamps_.emplace(offset_ticks, std::move(e)).first->second;
}

void HistoryStepper::halve()
{
    unit_ *= 0.5;
    for (auto& t : ticks_)
        t *= 2;
    std::unordered_map<std::int64_t, Eigen::ArrayXd> rekeyed;
    rekeyed.reserve(stamps_.size());
    for (auto& [off, e] : stamps_)
        rekeyed.emplace(2 * off, std::move(e));
    stamps_ = std::move(rekeyed);
}

void HistoryStepper::append_state(std::int64_t tick, SpectralField state, double sup)
{
    reaction_coeffs_.push_back(from_grid(cfg_.reaction(to_grid(state)), basis_).coeffs());
    ticks_.push_back(tick);
    traj_.times.push_back(tick * unit_);
    traj_.states.push_back(std::move(state));
    traj_.max_values.push_back(sup);
}

bool HistoryStepper::advance()
{
    if (traj_.status != RunStatus::running)
        return false;
    if (static_cast<long>(traj_.times.size()) > cfg_.max_steps) {
        traj_.status = RunStatus::step_underflow;
        return false;
    }

    const double alpha = cfg_.params.alpha;
    const double c = cfg_.reaction.c;
    const Eigen::ArrayXd& mu = basis_->frac_eigenvalues();
    const std::size_t n = ticks_.size();

    for (;;) {
        const std::int64_t t_next_ticks = ticks_.back() + 1;
        const double t_next = t_next_ticks * unit_;

        Eigen::ArrayXd coeffs = stamp_at(t_next_ticks) * traj_.states.front().coeffs();
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t lo = t_next_ticks - (j + 1 < n ? ticks_[j + 1] : t_next_ticks);
            const std::int64_t hi = t_next_ticks - ticks_[j];
            const Eigen::ArrayXd& e_lo = stamp_at(lo);
            const Eigen::ArrayXd& e_hi = stamp_at(hi);
            const double t_lo = lo * unit_;
            const double t_hi = hi * unit_;
            const Eigen::ArrayXd& fj = reaction_coeffs_[j];
            for (Eigen::Index k = 0; k < mu.size(); ++k)
                coeffs(k) += ml_weight_from_values(alpha, mu(k), t_lo, t_hi, e_lo(k), e_hi(k)) * fj(k);
        }

        SpectralField candidate(basis_, std::move(coeffs));
        const Eigen::ArrayXd grid = to_grid(candidate);
        const Eigen::ArrayXd fvals = cfg_.reaction(grid);
        const double sup = sup_norm(candidate);
        const bool reaction_overflow =
            !fvals.allFinite() || fvals.maxCoeff() > cfg_.reaction.f_max_cutoff;
        const bool near_ceiling = sup >= c - cfg_.quench_eps;

        if (reaction_overflow || near_ceiling) {
            if (0.5 * unit_ >= cfg_.h_min) {
                halve();
                continue;
            }
            if (near_ceiling) {
                traj_.status = RunStatus::quenched;
            } else {
                traj_.status = RunStatus::step_underflow;
            }
            return false;
        }

        append_state(t_next_ticks, std::move(candidate), sup);
        if (t_next >= cfg_.t_max * (1.0 - 1e-12)) {
            traj_.status = RunStatus::reached_horizon;
            return false;
        }
        if (sup > c - 10.0 * cfg_.quench_eps && 0.5 * unit_ >= cfg_.h_min)
            halve();
        return true;
    }
}

QuenchReport HistoryStepper::report() const
{
    QuenchReport rep;
    if (traj_.status == RunStatus::quenched) {
        rep.classification = QuenchReport::Classification::quenched;
        const double t_last = traj_.times.back();
        rep.t_q_bracket = std::make_pair(t_last, t_last + unit_);

        const SpectralField& last = traj_.states.back();
        const Eigen::ArrayXd grid = to_grid(last);
        const double gmax = grid.maxCoeff();
        const SpectralBasis& b = *basis_;
        const int nn = b.modes_per_dim();
        std::vector<Eigen::Index> hits;
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            if (grid(i) >= gmax - cfg_.quench_eps)
                hits.push_back(i);
        rep.quench_points.resize(static_cast<Eigen::Index>(hits.size()), b.dim());
        for (std::size_t r = 0; r < hits.size(); ++r) {
            const Eigen::Index i = hits[r];
            if (b.dim() == 1) {
                rep.quench_points(static_cast<Eigen::Index>(r), 0) = b.collocation(0)(i);
            } else {
                rep.quench_points(static_cast<Eigen::Index>(r), 0) = b.collocation(0)(i % nn);
                rep.quench_points(static_cast<Eigen::Index>(r), 1) = b.collocation(1)(i / nn);
            }
        }
    } else {
        rep.classification = QuenchReport::Classification::inconclusive;
        rep.quench_points.resize(0, basis_->dim());
    }
    return rep;
}

HistoryStepper::HistoryStepper(SolveConfig cfg, const Trajectory& history)
    : HistoryStepper([&] {
          SolveConfig seeded = std::move(cfg);
          if (!history.times.empty())
              seeded.u0_coeffs = history.states.front().coeffs();
          return seeded;
      }())
{
    if (history.times.empty())
        return;
    if (history.status != RunStatus::running)
        throw std::invalid_argument("HistoryStepper: history trajectory is terminal");

    // Steps only ever halve, so the last gap is the current step size and
    // every accepted time is a multiple of it.
    double step_size = cfg_.h;
    for (std::size_t j = 1; j < history.times.size(); ++j) {
        const double gap = history.times[j] - history.times[j - 1];
        if (!(gap > 0.0))
            throw std::invalid_argument("HistoryStepper: history times must increase");
        step_size = std::min(step_size, gap);
    }
    while (unit_ > step_size * 1.5)
        halve();

    for (std::size_t j = 1; j < history.times.size(); ++j) {
        const auto tick = static_cast<std::int64_t>(std::llround(history.times[j] / unit_));
        if (std::abs(tick * unit_ - history.times[j]) > 1e-9 * unit_)
            throw std::invalid_argument("HistoryStepper: history times are off the step lattice");
        ticks_.push_back(tick);
        reaction_coeffs_.push_back(from_grid(cfg_.reaction(to_grid(history.states[j])), basis_).coeffs());
        traj_.times.push_back(tick * unit_);
        traj_.states.push_back(history.states[j]);
        traj_.max_values.push_back(history.max_values.size() > j ? history.max_values[j]
                                                                 : sup_norm(history.states[j]));
    }
}

Trajectory step(const Trajectory& traj, const SolveConfig& cfg)
{
    if (traj.times.empty()) {
        HistoryStepper stepper(cfg);
        stepper.advance();
        return stepper.trajectory();
    }
    HistoryStepper stepper(cfg, traj);
    stepper.advance();
    return stepper.trajectory();
}

Trajectory run(const SolveConfig& cfg, QuenchReport* report)
{
    HistoryStepper stepper(cfg);
    while (stepper.advance()) {
    }
    if (report)
        *report = stepper.report();
    return stepper.trajectory();
}

std::pair<double, double> existence_horizon(const SolveConfig& cfg, double r)
{
    cfg.validate();
    BasisPtr basis = build_basis(cfg.domain, cfg.params);
    const double r0 = sup_norm(initial_state(cfg, basis));
    const double c = cfg.reaction.c;
    if (!(r0 < r) || !(r < c))
        throw std::domain_error("existence_horizon: need sup_norm(u0) < r < c");

    const double alpha = cfg.params.alpha;
    const double lf = cfg.reaction.lipschitz_at(r);
    const double g1a = gamma_fn(1.0 + alpha);
    const double t1 = std::pow((c - r0) * g1a / (lf * (1.0 + c)), 1.0 / alpha);
    const double t2 = std::pow(g1a / lf, 1.0 / alpha);
    return { t1, t2 };
}

bool monotonicity_condition(const SolveConfig& cfg)
{
    cfg.validate();
    BasisPtr basis = build_basis(cfg.domain, cfg.params);
    const SpectralField u0 = initial_state(cfg, basis);
    const Eigen::ArrayXd grid = to_grid(u0);
    const Eigen::ArrayXd lap = to_grid(apply_fractional_laplacian(u0));
    const Eigen::ArrayXd rhs = -lap + cfg.reaction(grid);
    return rhs.isFinite().all() && (rhs > 0.0).all();
}

} // namespace fq
