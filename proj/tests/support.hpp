#pragma once

#include "fertrot/io.hpp"

#include <cmath>
#include <filesystem>
#include <random>

namespace fertrot::test {

inline std::filesystem::path data_dir() { return FERTROT_DATA_DIR; }

inline const GrowthParams& default_growth() {
  static const GrowthParams g = load_growth_params(data_dir() / "growth_params.json");
  return g;
}

inline const EconomicConfig& default_econ() {
  static const EconomicConfig c = load_econ_config(data_dir() / "econ_config.json");
  return c;
}

inline StandFile bundled_stand(int i) {
  return load_stand(data_dir() / "stands" / ("synthetic-1-" + std::to_string(i) + ".json"));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Small hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  // sparse non-negative stem matrix, some species and classes empty
  StemMatrix stems(double max_per_class = 800.0) {
    StemMatrix m = StemMatrix::Zero();
    for (int s = 0; s < kSpeciesCount; ++s) {
      if (!coin(0.7)) continue;
      for (int j = 0; j < kClassCount; ++j)
        if (coin(0.6)) m(s, j) = uniform(0.0, max_per_class);
    }
    return m;
  }

  StandState state() {
    StandState st;
    st.age = kStepYears * integer(0, 30);
    st.stems = stems();
    st.site.site_index = uniform(8.0, 35.0);
    st.fert_remaining = coin() ? 0.0 : kStepYears * integer(1, 4);
    return st;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Increment, survival and ingrowth such that advance_step only moves stems.
inline GrowthParams frozen_growth() {
  GrowthParams g = default_growth();
  for (SpeciesGrowth& s : g.species) {
    s.increment = {0, 0, 0, 0, 0};
    s.survival = {60, 0, 0, 0, 0};
    s.ingrowth = {0, 0, 0};
  }
  return g;
}

}  // namespace fertrot::test
