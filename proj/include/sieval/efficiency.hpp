#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sieval {

// Plateau thresholds: absolute gain for [0,1] metrics, and for parse counts.
inline constexpr double kUnitMetricEpsilon = 0.02;
inline constexpr double kCountEpsilon = 20.0;

struct CurvePoint {
  std::int64_t train_size = 0;
  double value = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

struct MarginalGain {
  std::int64_t from_size = 0;
  std::int64_t to_size = 0;
  double delta = 0.0;
};

struct EfficiencyCurve {
  std::string metric;
  std::vector<CurvePoint> points;  // strictly increasing train_size
  std::vector<MarginalGain> marginal_gains;
  // Smallest size from which every later step gains less than epsilon.
  // Absent when only the last point qualifies.
  std::optional<std::int64_t> plateau_size;
};

// Throws InvalidArgument for fewer than two points, sizes that are not
// strictly increasing, or a non-positive epsilon.
EfficiencyCurve efficiency_curve(std::string metric, std::vector<CurvePoint> points, double epsilon);

}  // namespace sieval
