#include "fertrot/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fertrot {

namespace {

constexpr double kTimeEps = 1e-9;

long step_index(double t, double origin) {
  return std::lround((t - origin) / kStepYears);
}

void validate_spec(const ThinningSpec& spec) {
  if (!spec.intensity.allFinite() || (spec.intensity.array() < 0.0).any() ||
      (spec.intensity.array() > kMaxThinningIntensity).any())
    throw PreconditionError("thinning intensity must lie in [0, 0.9]");
  if (spec.allocation_exponent < -2 || spec.allocation_exponent > 2)
    throw PreconditionError("allocation exponent must lie in [-2, 2]");
  if (spec.class_fractions &&
      (!spec.class_fractions->allFinite() || (spec.class_fractions->array() < 0.0).any() ||
       (spec.class_fractions->array() > 1.0).any()))
    throw PreconditionError("class removal fractions must lie in [0, 1]");
}

// Fractions for one species row removing `q` of its basal area with class
// weights w; classes whose fraction would exceed 1 are removed entirely and
// the remainder redistributed.
ClassRow species_fractions(const ClassRow& stems, double q, int exponent) {
  ClassRow f = ClassRow::Zero();
  if (q <= 0.0) return f;
  const ClassVector& d = class_midpoints();
  ClassRow ba;
  for (int j = 0; j < kClassCount; ++j) ba(j) = stems(j) * d(j) * d(j);
  const double total = ba.sum();
  if (!(total > 0.0)) return f;
  const double d_mean = (ba.array() * d.transpose().array()).sum() / total;
  ClassRow w;
  for (int j = 0; j < kClassCount; ++j) w(j) = std::pow(d(j) / d_mean, exponent);

  std::array<bool, kClassCount> full{};
  for (int iter = 0; iter <= kClassCount; ++iter) {
    double clamped = 0.0;
    double weighted = 0.0;
    for (int j = 0; j < kClassCount; ++j) {
      if (full[j]) clamped += ba(j);
      else weighted += w(j) * ba(j);
    }
    if (!(weighted > 0.0)) break;
    const double lambda =
        clamped == 0.0 ? q * (total / weighted) : (q * total - clamped) / weighted;
    bool changed = false;
    for (int j = 0; j < kClassCount; ++j) {
      if (full[j]) continue;
      f(j) = lambda * w(j);
      if (f(j) > 1.0 && stems(j) > 0.0) {
        full[j] = true;
        changed = true;
      }
    }
    for (int j = 0; j < kClassCount; ++j)
      if (full[j]) f(j) = 1.0;
    if (!changed) break;
  }
  for (int j = 0; j < kClassCount; ++j)
    if (stems(j) == 0.0) f(j) = 0.0;
  return f;
}

// Splits stems into kept and removed parts that add back to the original
// exactly: the larger part is the difference, the smaller one recomputed
// from it.
void split(const StemMatrix& stems, const StemMatrix& fractions, StemMatrix& kept,
           StemMatrix& removed) {
  for (int s = 0; s < kSpeciesCount; ++s)
    for (int j = 0; j < kClassCount; ++j) {
      const double n = stems(s, j);
      const double f = fractions(s, j);
      if (f <= 0.5) {
        const double keep = n - n * f;
        removed(s, j) = n - keep;
        kept(s, j) = keep;
      } else {
        const double take = n - n * (1.0 - f);
        kept(s, j) = n - take;
        removed(s, j) = take;
      }
    }
}

}  // namespace

bool ThinningSpec::operator==(const ThinningSpec& other) const {
  if (time != other.time || intensity != other.intensity ||
      allocation_exponent != other.allocation_exponent ||
      class_fractions.has_value() != other.class_fractions.has_value())
    return false;
  return !class_fractions || *class_fractions == *other.class_fractions;
}

void validate(const Schedule& schedule, double observed_age) {
  auto check_time = [&](double t, const char* what) {
    if (!std::isfinite(t) || !on_step_grid(t) || !on_step_grid(t - observed_age))
      throw PreconditionError(std::string(what) + " time " + std::to_string(t) +
                              " is not on the 2.5-year grid");
    if (t < observed_age - kTimeEps)
      throw PreconditionError(std::string(what) + " time " + std::to_string(t) +
                              " precedes the observed stand age");
    if (schedule.rotation > 0.0 && t >= schedule.rotation - kTimeEps)
      throw PreconditionError(std::string(what) + " time " + std::to_string(t) +
                              " is not before the final harvest");
  };
  if (schedule.rotation != 0.0 &&
      (!std::isfinite(schedule.rotation) || !on_step_grid(schedule.rotation) ||
       schedule.rotation <= observed_age))
    throw PreconditionError("rotation must be a step end after the observed age");
  for (std::size_t i = 0; i < schedule.thinnings.size(); ++i) {
    const ThinningSpec& t = schedule.thinnings[i];
    check_time(t.time, "thinning");
    validate_spec(t);
    if (i > 0 && t.time <= schedule.thinnings[i - 1].time + kTimeEps)
      throw PreconditionError("thinning times must be strictly increasing");
  }
  for (std::size_t i = 0; i < schedule.fertilizations.size(); ++i) {
    const double t = schedule.fertilizations[i];
    check_time(t, "fertilization");
    if (i > 0 && t < schedule.fertilizations[i - 1] + kFertilizationYears - kTimeEps)
      throw PreconditionError("fertilizations must be at least 10 years apart");
  }
}

StemMatrix removal_fractions(const StemMatrix& stems, const ThinningSpec& spec) {
  validate_spec(spec);
  if (spec.class_fractions) return *spec.class_fractions;
  StemMatrix f;
  for (int s = 0; s < kSpeciesCount; ++s)
    f.row(s) = species_fractions(stems.row(s), spec.intensity(s), spec.allocation_exponent);
  return f;
}

ThinningResult apply_thinning(const StandState& state, const ThinningSpec& spec,
                              const GrowthParams& growth) {
  const StemMatrix f = removal_fractions(state.stems, spec);
  ThinningResult r;
  r.state = state;
  split(state.stems, f, r.state.stems, r.removed_stems);
  if ((r.state.stems.array() < 0.0).any() || (r.removed_stems.array() < 0.0).any())
    throw InvariantError("thinning produced negative stems");
  r.removed_volume = assortment_volumes(r.removed_stems, growth);
  return r;
}

std::optional<double> last_event_time(const Schedule& schedule) {
  std::optional<double> last;
  for (const ThinningSpec& t : schedule.thinnings) last = std::max(last.value_or(t.time), t.time);
  for (double t : schedule.fertilizations) last = std::max(last.value_or(t), t);
  return last;
}

namespace {

// Steps from points[from].before of `traj` (whose earlier points are kept)
// through `steps`, applying the schedule's events due at or after `from`.
Trajectory step_through(Trajectory traj, std::size_t from, const Schedule& schedule,
                        const GrowthParams& growth, long steps) {
  const double a0 = traj.observed_age;
  const VolumeTable table = volume_table(growth);
  StandState state = traj.points[from].before;
  traj.points.resize(from);
  traj.points.reserve(static_cast<std::size_t>(steps) + 1);
  const long first = static_cast<long>(from);
  std::size_t next_thinning = 0;
  while (next_thinning < schedule.thinnings.size() &&
         step_index(schedule.thinnings[next_thinning].time, a0) < first)
    ++next_thinning;
  std::size_t next_fert = 0;
  while (next_fert < schedule.fertilizations.size() &&
         step_index(schedule.fertilizations[next_fert], a0) < first)
    ++next_fert;
  for (long k = first; k <= steps; ++k) {
    TrajectoryPoint p;
    p.time = a0 + kStepYears * static_cast<double>(k);
    p.before = state;
    p.volume_before = assortment_volumes(state.stems, table);
    while (next_thinning < schedule.thinnings.size() &&
           step_index(schedule.thinnings[next_thinning].time, a0) == k) {
      const StemMatrix f = removal_fractions(state.stems, schedule.thinnings[next_thinning]);
      StemMatrix kept, removed;
      split(state.stems, f, kept, removed);
      if ((kept.array() < 0.0).any() || (removed.array() < 0.0).any())
        throw InvariantError("thinning produced negative stems");
      state.stems = kept;
      p.thinning_removal += assortment_volumes(removed, table);
      p.thinned = true;
      ++next_thinning;
    }
    while (next_fert < schedule.fertilizations.size() &&
           step_index(schedule.fertilizations[next_fert], a0) == k) {
      state = apply_fertilization(state);
      p.fertilized = true;
      ++next_fert;
    }
    p.after = state;
    p.volume_after = p.thinned ? assortment_volumes(state.stems, table) : p.volume_before;
    traj.points.push_back(std::move(p));
    if (k < steps) state = advance_step(state, growth);
  }
  return traj;
}

long horizon_steps(double a0, double horizon) {
  return std::max(0L, static_cast<long>(std::floor((horizon - a0) / kStepYears + kTimeEps)));
}

void validate_open(const Schedule& schedule, double a0) {
  Schedule open = schedule;
  open.rotation = 0.0;
  validate(open, a0);
}

}  // namespace

Trajectory simulate_trajectory(const StandState& initial, const Schedule& schedule,
                               const GrowthParams& growth, double horizon) {
  validate(initial);
  const double a0 = initial.age;
  if (!on_step_grid(a0)) throw PreconditionError("observed stand age must be a multiple of 2.5 years");
  validate_open(schedule, a0);
  Trajectory traj;
  traj.observed_age = a0;
  traj.points.emplace_back();
  traj.points.front().before = initial;
  return step_through(std::move(traj), 0, schedule, growth, horizon_steps(a0, horizon));
}

Trajectory resume_trajectory(const Trajectory& base, std::size_t from, const Schedule& schedule,
                             const GrowthParams& growth, double horizon) {
  if (from >= base.points.size())
    throw PreconditionError("resume point lies beyond the base trajectory");
  validate_open(schedule, base.observed_age);
  return step_through(base, from, schedule, growth, horizon_steps(base.observed_age, horizon));
}

std::vector<CycleExpectation> rotation_curve(const Trajectory& trajectory,
                                             const Schedule& schedule,
                                             const EconomicConfig& cfg,
                                             const RotationWindow& window) {
  // Single pass over the trajectory with running integrals; agrees with
  // cycle_expectation(build_ledger(...)) at every rotation age.
  const std::vector<TrajectoryPoint>& pts = trajectory.points;
  std::vector<CycleExpectation> curve;
  if (pts.empty()) return curve;
  const std::optional<double> last = last_event_time(schedule);
  const double a0 = trajectory.observed_age;
  const double half_dt = 0.5 * kStepYears;

  // fertilization book value carried until the first later thinning, or
  // until the final harvest when there is none
  double fert_book_closed = 0.0;  // sum of F * holding time, written off early
  double fert_open = 0.0;         // F still on the books at the final harvest
  std::vector<double> open_since;
  double writeoffs = cfg.regeneration_cost;
  double losses = 0.0;

  double s0 = stumpage_value(pts[0].volume_before, cfg);
  double stock_integral = 0.5 * a0 * s0;
  double volume_integral = 0.5 * a0 * pts[0].volume_before.sum();
  // the juvenile ramp earns the first observed value; nothing before age 0
  double value_growth = a0 > 0.0 ? s0 : 0.0;
  double right_value = 0.0;
  double right_volume = 0.0;

  for (std::size_t k = 0; k < pts.size(); ++k) {
    const TrajectoryPoint& p = pts[k];
    const double left_value = k == 0 ? s0 : stumpage_value(p.volume_before, cfg);
    const double left_volume = p.volume_before.sum();
    if (k > 0) {
      stock_integral += half_dt * (right_value + left_value);
      volume_integral += half_dt * (right_volume + left_volume);
      value_growth += left_value - right_value;

      const double t = p.time;
      const bool in_window = t >= window.min_rotation - kTimeEps && t <= window.max_rotation + kTimeEps;
      if (in_window && !(last && t <= *last + kTimeEps)) {
        const double tau = t;
        double book = cfg.regeneration_cost * tau + fert_book_closed;
        for (double since : open_since) book += cfg.fertilization_cost * (tau - since);
        CycleExpectation e;
        e.tau = tau;
        e.expected_capitalization = (stock_integral + cfg.bare_land_value * tau + book) / tau;
        e.expected_profit_rate = (value_growth - cfg.interest_rate * e.expected_capitalization * tau -
                                  cfg.annual_expense * tau - writeoffs - fert_open - losses) /
                                 tau;
        if (!(e.expected_capitalization > 0.0))
          throw PreconditionError("expected capitalization must be positive");
        e.expected_return_rate = e.expected_profit_rate / e.expected_capitalization;
        e.expected_volume = volume_integral / tau;
        curve.push_back(e);
      }
    }
    if (p.thinned) {
      const double revenue = harvest_revenue(p.thinning_removal, HarvestType::Thinning, cfg);
      losses += stumpage_value(p.thinning_removal, cfg) - revenue;
      for (double since : open_since) {
        fert_book_closed += cfg.fertilization_cost * (p.time - since);
        writeoffs += cfg.fertilization_cost;
        fert_open -= cfg.fertilization_cost;
      }
      open_since.clear();
    }
    if (p.fertilized) {
      open_since.push_back(p.time);
      fert_open += cfg.fertilization_cost;
    }
    right_value = p.thinned ? stumpage_value(p.volume_after, cfg) : left_value;
    right_volume = p.volume_after.sum();
  }
  return curve;
}

SimulationResult simulate_schedule(const StandState& initial, const Schedule& schedule,
                                   const GrowthParams& growth, const EconomicConfig& cfg,
                                   const RotationWindow& window) {
  validate(schedule, initial.age);
  SimulationResult r;
  const double horizon = std::max(window.max_rotation, schedule.rotation);
  r.trajectory = simulate_trajectory(initial, schedule, growth, horizon);
  r.curve = rotation_curve(r.trajectory, schedule, cfg, window);
  if (schedule.rotation > 0.0) r.ledger = build_ledger(r.trajectory, schedule, cfg);
  return r;
}

}  // namespace fertrot
