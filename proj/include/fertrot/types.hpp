#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fertrot {

inline constexpr int kSpeciesCount = 4;
inline constexpr int kClassCount = 12;
inline constexpr int kAssortmentCount = 2;

inline constexpr double kClassWidthCm = 5.0;
inline constexpr double kStepYears = 2.5;
inline constexpr int kStepMonths = 30;
inline constexpr double kFertilizationYears = 10.0;
inline constexpr double kDefaultSiteIndexBump = 5.0;

enum class Species { Spruce = 0, Pine = 1, Birch = 2, Other = 3 };
enum class Assortment { Sawlog = 0, Pulp = 1 };
enum class HarvestType { Thinning = 0, Clearcut = 1 };

inline constexpr std::array<Species, kSpeciesCount> kAllSpecies{
    Species::Spruce, Species::Pine, Species::Birch, Species::Other};

// stems/ha, rows = species, columns = diameter classes
using StemMatrix = Eigen::Matrix<double, kSpeciesCount, kClassCount>;
using ClassVector = Eigen::Matrix<double, kClassCount, 1>;
using ClassRow = Eigen::Matrix<double, 1, kClassCount>;
using TransitionMatrix = Eigen::Matrix<double, kClassCount, kClassCount>;
// m3/ha or Eur/m3, rows = species, columns = {sawlog, pulp}
using AssortmentMatrix = Eigen::Matrix<double, kSpeciesCount, kAssortmentCount>;
using SpeciesVector = Eigen::Matrix<double, kSpeciesCount, 1>;

/// Midpoint diameter (cm) of class `j`: 5, 10, ..., 60.
inline constexpr double class_midpoint(int j) { return kClassWidthCm * (j + 1); }

inline const ClassVector& class_midpoints() {
  static const ClassVector mids = [] {
    ClassVector m;
    for (int j = 0; j < kClassCount; ++j) m(j) = class_midpoint(j);
    return m;
  }();
  return mids;
}

inline int index(Species s) { return static_cast<int>(s); }
inline int index(Assortment a) { return static_cast<int>(a); }

std::string_view to_string(Species s);
std::string_view to_string(Assortment a);
std::string_view to_string(HarvestType h);
Species species_from_string(std::string_view name);
Assortment assortment_from_string(std::string_view name);

/// Malformed or schema-violating input (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain precondition (CLI exit code 3).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Internal invariant breach (CLI exit code 4).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// True when `t` lies on the 2.5-year time grid.
bool on_step_grid(double t);

}  // namespace fertrot
