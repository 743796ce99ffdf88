#include "knetsim/agent/quantizer.hpp"

#include <algorithm>
#include <cmath>

namespace knetsim::agent {

GridQuantizer::GridQuantizer(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw Error("InvalidValue", "quantizer needs at least one axis");
  for (const auto& axis : axes_) {
    if (!(axis.hi > axis.lo) || axis.bins == 0) {
      throw Error("InvalidValue", "quantizer axis needs hi > lo and bins >= 1");
    }
    l1_radius_ += (axis.hi - axis.lo) / static_cast<double>(axis.bins) / 2.0;
  }
}

std::vector<std::uint32_t> GridQuantizer::cell_of(const std::vector<double>& raw) const {
  if (raw.size() != axes_.size()) {
    throw Error("UnknownObservationSchema",
                "observation has " + std::to_string(raw.size()) + " dimensions, grid has " +
                    std::to_string(axes_.size()));
  }
  std::vector<std::uint32_t> cell(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& axis = axes_[i];
    const double width = (axis.hi - axis.lo) / static_cast<double>(axis.bins);
    const double offset = (raw[i] - axis.lo) / width;
    const auto bin = static_cast<std::int64_t>(std::floor(offset));
    cell[i] = static_cast<std::uint32_t>(
        std::clamp<std::int64_t>(bin, 0, static_cast<std::int64_t>(axis.bins) - 1));
  }
  return cell;
}

std::vector<double> GridQuantizer::centroid(const std::vector<std::uint32_t>& cell) const {
  std::vector<double> c(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& axis = axes_[i];
    const double width = (axis.hi - axis.lo) / static_cast<double>(axis.bins);
    c[i] = axis.lo + (static_cast<double>(cell[i]) + 0.5) * width;
  }
  return c;
}

std::string GridQuantizer::key_of(const std::vector<std::uint32_t>& cell) const {
  std::string key;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (i) key += '_';
    key += std::to_string(cell[i]);
  }
  return key;
}

std::pair<SemanticState, double> GridQuantizer::perceive(EntityId subject,
                                                         const std::vector<double>& raw,
                                                         sim::SimTime now) const {
  const auto cell = cell_of(raw);
  const auto center = centroid(cell);
  double l1 = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) l1 += std::abs(raw[i] - center[i]);
  const double distortion = std::min(1.0, l1 / l1_radius_);

  SemanticState state;
  state.subject = subject;
  state.key = key_of(cell);
  state.annotation = center;
  state.timestamp = now;
  return {state, distortion};
}

double GridQuantizer::analytic_mean_distortion() const {
  // Uniform raw over any cell: E|x - centroid| per axis is a quarter cell
  // width, so the normalised L1 mean is exactly one half.
  double mean_l1 = 0.0;
  for (const auto& axis : axes_) {
    mean_l1 += (axis.hi - axis.lo) / static_cast<double>(axis.bins) / 4.0;
  }
  return mean_l1 / l1_radius_;
}

std::vector<std::string> GridQuantizer::alphabet() const {
  std::vector<std::string> keys;
  std::vector<std::uint32_t> cell(axes_.size(), 0);
  while (true) {
    keys.push_back(key_of(cell));
    std::size_t i = 0;
    for (; i < axes_.size(); ++i) {
      if (++cell[i] < axes_[i].bins) break;
      cell[i] = 0;
    }
    if (i == axes_.size()) break;
  }
  return keys;
}

}  // namespace knetsim::agent
