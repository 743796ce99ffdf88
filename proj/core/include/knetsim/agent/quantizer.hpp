#pragma once

#include <string>
#include <vector>

#include "knetsim/common.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::agent {

// Discretised perception output plus the continuous annotation it came from.
struct SemanticState {
  EntityId subject = 0;
  std::string key;                  // drawn from the scenario alphabet
  std::vector<double> annotation;   // de-quantised cell centroid
  double confidence = 1.0;
  sim::SimTime timestamp{};
};

// Uniform grid quantiser: the scenario's abstraction function from raw
// observations to state keys. Distortion is the L1 distance between the raw
// point and the centroid of its cell, normalised by the cell's maximum L1
// radius: 0 at a centroid, 1 at the far corner of a cell.
class GridQuantizer {
public:
  struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::uint32_t bins = 1;
  };

  explicit GridQuantizer(std::vector<Axis> axes);

  std::size_t dimensions() const { return axes_.size(); }

  std::vector<std::uint32_t> cell_of(const std::vector<double>& raw) const;
  std::vector<double> centroid(const std::vector<std::uint32_t>& cell) const;
  std::string key_of(const std::vector<std::uint32_t>& cell) const;

  // (state, distortion). Throws Error("UnknownObservationSchema") when the
  // observation arity does not match the grid.
  std::pair<SemanticState, double> perceive(EntityId subject,
                                            const std::vector<double>& raw,
                                            sim::SimTime now) const;

  // Closed-form mean distortion for raw samples uniform over the grid; the
  // oracle for Monte-Carlo perception tests.
  double analytic_mean_distortion() const;

  std::vector<std::string> alphabet() const;

private:
  std::vector<Axis> axes_;
  double l1_radius_ = 0.0;  // sum of half cell widths
};

}  // namespace knetsim::agent
