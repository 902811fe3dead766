#pragma once

#include "fertrot/economics.hpp"
#include "fertrot/growth.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace fertrot {

inline constexpr double kMaxThinningIntensity = 0.9;

/// One thinning. Per species, `intensity` is the fraction of that species'
/// basal area removed; removal weight across classes is proportional to
/// (d / d_mean)^allocation_exponent. When `class_fractions` is set it
/// overrides both and gives the stem fraction removed per species and class.
struct ThinningSpec {
  double time = 0.0;
  SpeciesVector intensity = SpeciesVector::Zero();
  int allocation_exponent = 0;
  std::optional<StemMatrix> class_fractions;

  bool operator==(const ThinningSpec& other) const;
};

struct Schedule {
  double rotation = 0.0;  // final harvest age; 0 when not yet chosen
  std::vector<ThinningSpec> thinnings;
  std::vector<double> fertilizations;

  bool operator==(const Schedule& other) const = default;
};

/// Checks grid alignment, ordering and ranges. When `rotation` > 0 all
/// events must lie in (0, rotation], thinnings strictly before it.
void validate(const Schedule& schedule, double observed_age);

/// Removal fraction per species and class implied by a spec on `stems`.
StemMatrix removal_fractions(const StemMatrix& stems, const ThinningSpec& spec);

struct ThinningResult {
  StandState state;
  StemMatrix removed_stems = StemMatrix::Zero();
  AssortmentMatrix removed_volume = AssortmentMatrix::Zero();
};

ThinningResult apply_thinning(const StandState& state, const ThinningSpec& spec,
                              const GrowthParams& growth);

/// Rotation ages at which a cycle may end: step ends within [min, max].
struct RotationWindow {
  double min_rotation = 0.0;
  double max_rotation = 120.0;
};

/// Last event time of a schedule, or nullopt when it has none.
std::optional<double> last_event_time(const Schedule& schedule);

/// Steps the stand from its observed age through `horizon`, applying the
/// thinnings and then the fertilizations due at each grid time.
Trajectory simulate_trajectory(const StandState& initial, const Schedule& schedule,
                               const GrowthParams& growth, double horizon);

/// Re-simulates `base` from grid point `from` on, keeping earlier points.
/// The schedule must agree with the one `base` was built from on every
/// event before `from`.
Trajectory resume_trajectory(const Trajectory& base, std::size_t from, const Schedule& schedule,
                             const GrowthParams& growth, double horizon);

/// Expectations for every admissible rotation age of the window: step ends
/// strictly after the observed age and after the last event.
std::vector<CycleExpectation> rotation_curve(const Trajectory& trajectory,
                                             const Schedule& schedule,
                                             const EconomicConfig& cfg,
                                             const RotationWindow& window);

struct SimulationResult {
  Trajectory trajectory;
  std::optional<Ledger> ledger;  // at schedule.rotation when set
  std::vector<CycleExpectation> curve;
};

SimulationResult simulate_schedule(const StandState& initial, const Schedule& schedule,
                                   const GrowthParams& growth, const EconomicConfig& cfg,
                                   const RotationWindow& window = {});

}  // namespace fertrot
