#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tsdia/cli/config.hpp"
#include "tsdia/oscillator.hpp"

namespace tsdia::cli {

/// Raised when two curves cannot be put on a common grid.
class GridMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error metrics of one curve against a reference.
///
/// z-scores use the real part and the combined standard error of both curves; nodes where that
/// error is zero are skipped (they still count toward max_abs and rms).
struct CurveComparison {
  std::string reference;
  std::string candidate;
  std::vector<double> times;
  std::vector<double> z;
  double max_abs = 0.0;
  double rms = 0.0;
  double max_abs_z = 0.0;
  double z_fraction = 1.0;  // share of z-scored nodes with |z| <= z_max
  int z_nodes = 0;
  bool pass = true;
};

struct ComparisonReport {
  std::vector<CurveComparison> comparisons;
  Tolerances tolerances;
  bool pass = true;
};

/// Compares on the common nodes. Grids must coincide or one must subsample the other by an
/// integer factor from t = 0.
CurveComparison compare_curves(const GreenFunction& reference, const GreenFunction& candidate,
                               const Tolerances& tol);

Json to_json(const CurveComparison& c, bool with_nodes);
Json to_json(const ComparisonReport& r);

/// Writes through a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& file, const std::function<void(const std::filesystem::path&)>& write);
void write_json_atomically(const std::filesystem::path& file, const Json& j);

}  // namespace tsdia::cli
