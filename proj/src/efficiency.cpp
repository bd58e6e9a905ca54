#include "sieval/efficiency.hpp"

#include "sieval/errors.hpp"

namespace sieval {

EfficiencyCurve efficiency_curve(std::string metric, std::vector<CurvePoint> points, double epsilon) {
  if (points.size() < 2) throw InvalidArgument("efficiency_curve: need at least two points");
  if (!(epsilon > 0.0)) throw InvalidArgument("efficiency_curve: epsilon must be positive");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].train_size <= points[i - 1].train_size) {
      throw InvalidArgument("efficiency_curve: train sizes must be strictly increasing (" +
                            std::to_string(points[i - 1].train_size) + " then " +
                            std::to_string(points[i].train_size) + ")");
    }
  }

  EfficiencyCurve curve;
  curve.metric = std::move(metric);
  for (std::size_t i = 1; i < points.size(); ++i) {
    curve.marginal_gains.push_back(
        {points[i - 1].train_size, points[i].train_size, points[i].value - points[i - 1].value});
  }
  // Walk back from the end while the step into the current point is small.
  std::size_t first = points.size() - 1;
  while (first > 0 && curve.marginal_gains[first - 1].delta < epsilon) --first;
  if (first + 1 < points.size()) curve.plateau_size = points[first].train_size;
  curve.points = std::move(points);
  return curve;
}

}  // namespace sieval
