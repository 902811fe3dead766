#include "fertrot/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fertrot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Grid coordinates of one thinning.
struct Gene {
  int time = 0;      // steps after the observed age
  int q = 0;         // index into the intensity grid
  int exponent = 0;  // index into opt.exponents
  int profile = 0;   // 0 = uniform, k > 0 = favour the k-th present species
};

class Search {
 public:
  Search(const StandState& initial, const GrowthParams& growth, const EconomicConfig& cfg,
         const OptimizationConfig& opt, const std::vector<double>& fertilizations)
      : initial_(initial), growth_(growth), cfg_(cfg), opt_(opt), fert_(fertilizations) {
    const double a0 = initial.age;
    first_step_ = static_cast<int>(std::ceil(opt.thinning_offset_min / kStepYears - 1e-9));
    last_step_ = static_cast<int>(std::floor(opt.thinning_offset_max / kStepYears + 1e-9));
    last_step_ = std::min(last_step_, static_cast<int>(std::floor(
                                          (opt.window.max_rotation - a0) / kStepYears + 1e-9)) - 1);
    for (double q = opt.q_min; q <= opt.q_max + 1e-9; q += opt.q_step) q_grid_.push_back(round_q(q));
    for (Species s : kAllSpecies)
      if (initial.has_species(s)) present_.push_back(s);
    profiles_ = opt.species_profiles && present_.size() > 1 ? 1 + static_cast<int>(present_.size()) : 1;
  }

  SearchResult run() {
    std::vector<Gene> accepted;
    double best = evaluate(accepted);
    SearchResult result;
    result.trace.push_back({0, "no thinning", best, evaluations_});

    for (int round = 1; round <= opt_.max_thinnings; ++round) {
      std::vector<Gene> proposal;
      double proposal_value = kNegInf;
      // candidates share the accepted schedule's trajectory up to their new thinning
      const Trajectory base = trajectory(accepted);
      for (int t = first_step_; t <= last_step_; ++t) {
        if (std::any_of(accepted.begin(), accepted.end(), [t](const Gene& g) { return g.time == t; }))
          continue;
        for (int qi = 0; qi < static_cast<int>(q_grid_.size()); ++qi)
          for (int ei = 0; ei < static_cast<int>(opt_.exponents.size()); ++ei)
            for (int pi = 0; pi < profiles_; ++pi) {
              std::vector<Gene> genes = accepted;
              genes.push_back({t, qi, ei, pi});
              sort_genes(genes);
              const double v = evaluate(genes, base, t);
              if (v > proposal_value) {
                proposal_value = v;
                proposal = std::move(genes);
              }
            }
      }
      if (proposal.empty()) break;
      refine(proposal, proposal_value);
      if (!(proposal_value > best + opt_.epsilon)) break;
      accepted = std::move(proposal);
      best = proposal_value;
      std::ostringstream desc;
      for (std::size_t i = 0; i < accepted.size(); ++i)
        desc << (i ? " | " : "") << describe(to_spec(accepted[i]));
      result.trace.push_back({round, desc.str(), best, evaluations_});
    }

    result.schedule = to_schedule(accepted);
    const SimulationResult sim = simulate_schedule(initial_, result.schedule, growth_, cfg_, opt_.window);
    result.curve = sim.curve;
    result.max_return_rate = best;
    result.schedule.rotation = optimal_rotation(result.curve);
    return result;
  }

 private:
  static double round_q(double q) { return std::round(q * 1e6) / 1e6; }

  static void sort_genes(std::vector<Gene>& genes) {
    std::sort(genes.begin(), genes.end(), [](const Gene& a, const Gene& b) { return a.time < b.time; });
  }

  ThinningSpec to_spec(const Gene& g) const {
    ThinningSpec spec;
    spec.time = initial_.age + kStepYears * g.time;
    const double q = q_grid_[static_cast<std::size_t>(g.q)];
    for (Species s : present_) spec.intensity(index(s)) = q;
    if (g.profile > 0) {
      const int row = index(present_[static_cast<std::size_t>(g.profile - 1)]);
      spec.intensity(row) = std::min(kMaxThinningIntensity, 2.0 * q);
    }
    spec.allocation_exponent = opt_.exponents[static_cast<std::size_t>(g.exponent)];
    return spec;
  }

  Schedule to_schedule(const std::vector<Gene>& genes) const {
    Schedule s;
    for (const Gene& g : genes) s.thinnings.push_back(to_spec(g));
    s.fertilizations = fert_;
    return s;
  }

  Trajectory trajectory(const std::vector<Gene>& genes) const {
    return simulate_trajectory(initial_, to_schedule(genes), growth_, opt_.window.max_rotation);
  }

  double evaluate(const std::vector<Gene>& genes) {
    ++evaluations_;
    return schedule_objective(initial_, to_schedule(genes), growth_, cfg_, opt_.window);
  }

  // Same value as evaluate(genes) when `base` agrees with `genes` on every
  // event before step `from`.
  double evaluate(const std::vector<Gene>& genes, const Trajectory& base, int from) {
    ++evaluations_;
    const Schedule schedule = to_schedule(genes);
    const Trajectory traj = resume_trajectory(base, static_cast<std::size_t>(std::max(from, 0)),
                                              schedule, growth_, opt_.window.max_rotation);
    return max_return_rate(rotation_curve(traj, schedule, cfg_, opt_.window));
  }

  bool valid(const std::vector<Gene>& genes) const {
    for (std::size_t i = 0; i < genes.size(); ++i) {
      const Gene& g = genes[i];
      if (g.time < first_step_ || g.time > last_step_) return false;
      if (g.q < 0 || g.q >= static_cast<int>(q_grid_.size())) return false;
      if (g.exponent < 0 || g.exponent >= static_cast<int>(opt_.exponents.size())) return false;
      if (g.profile < 0 || g.profile >= profiles_) return false;
      if (i > 0 && g.time <= genes[i - 1].time) return false;
    }
    return true;
  }

  // Coordinate descent over every thinning's grid coordinates.
  void refine(std::vector<Gene>& genes, double& value) {
    bool improved = true;
    Trajectory base = trajectory(genes);
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < genes.size(); ++i) {
        for (int coord = 0; coord < 4; ++coord) {
          for (int delta : {-1, 1}) {
            std::vector<Gene> trial = genes;
            Gene& g = trial[i];
            switch (coord) {
              case 0: g.time += delta; break;
              case 1: g.q += delta; break;
              case 2: g.exponent += delta; break;
              default: g.profile += delta; break;
            }
            if (!valid(trial)) continue;
            const double v = evaluate(trial, base, std::min(genes[i].time, g.time));
            if (v > value + opt_.epsilon) {
              genes = std::move(trial);
              value = v;
              improved = true;
              base = trajectory(genes);
            }
          }
        }
      }
    }
  }

  const StandState& initial_;
  const GrowthParams& growth_;
  const EconomicConfig& cfg_;
  const OptimizationConfig& opt_;
  std::vector<double> fert_;
  std::vector<double> q_grid_;
  std::vector<Species> present_;
  int first_step_ = 0;
  int last_step_ = 0;
  int profiles_ = 1;
  long evaluations_ = 0;
};

}  // namespace

void validate(const OptimizationConfig& opt) {
  if (!(opt.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(opt.q_step > 0.0) || opt.q_min < 0.0 || opt.q_max > kMaxThinningIntensity ||
      opt.q_min > opt.q_max)
    throw InputError("intensity grid must satisfy 0 <= q_min <= q_max <= 0.9, q_step > 0");
  if (opt.exponents.empty()) throw InputError("at least one allocation exponent required");
  for (int e : opt.exponents)
    if (e < -2 || e > 2) throw InputError("allocation exponents must lie in [-2, 2]");
  if (!std::is_sorted(opt.exponents.begin(), opt.exponents.end()))
    throw InputError("allocation exponents must be sorted ascending");
  if (opt.max_thinnings < 0) throw InputError("max_thinnings must be >= 0");
  if (!(opt.window.max_rotation > opt.window.min_rotation))
    throw InputError("rotation window must be non-empty");
  if (!on_step_grid(opt.thinning_offset_min) || !on_step_grid(opt.thinning_offset_max) ||
      opt.thinning_offset_min < 0.0 || opt.thinning_offset_max < opt.thinning_offset_min)
    throw InputError("thinning offsets must be on the 2.5-year grid and ordered");
}

double optimal_rotation(const std::vector<CycleExpectation>& curve) {
  if (curve.empty()) throw PreconditionError("empty return-rate curve");
  const CycleExpectation* best = &curve.front();
  for (const CycleExpectation& e : curve)
    if (e.expected_return_rate > best->expected_return_rate ||
        (e.expected_return_rate == best->expected_return_rate && e.tau < best->tau))
      best = &e;
  return best->tau;
}

double max_return_rate(const std::vector<CycleExpectation>& curve) {
  double best = kNegInf;
  for (const CycleExpectation& e : curve) best = std::max(best, e.expected_return_rate);
  return best;
}

double schedule_objective(const StandState& initial, const Schedule& schedule,
                          const GrowthParams& growth, const EconomicConfig& cfg,
                          const RotationWindow& window) {
  const Trajectory traj = simulate_trajectory(initial, schedule, growth, window.max_rotation);
  return max_return_rate(rotation_curve(traj, schedule, cfg, window));
}

SearchResult greedy_thinning_search(const StandState& initial, const GrowthParams& growth,
                                    const EconomicConfig& cfg, const OptimizationConfig& opt,
                                    const std::vector<double>& fertilizations) {
  validate(opt);
  validate(initial);
  Search search(initial, growth, cfg, opt, fertilizations);
  return search.run();
}

std::string describe(const ThinningSpec& spec) {
  std::ostringstream os;
  os << "t=" << spec.time << " q=[";
  for (int s = 0; s < kSpeciesCount; ++s) os << (s ? " " : "") << spec.intensity(s);
  os << "] gamma=" << spec.allocation_exponent;
  return os.str();
}

}  // namespace fertrot
