#pragma once

#include <compare>
#include <cstdint>

namespace knetsim::sim {

// Virtual clock value. One tick is one microsecond of simulated time; integer
// ticks keep event ordering exact under arithmetic.
struct SimTime {
  std::uint64_t ticks = 0;

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime rhs) const { return {ticks + rhs.ticks}; }
  constexpr SimTime operator+(std::uint64_t t) const { return {ticks + t}; }
  SimTime& operator+=(std::uint64_t t) {
    ticks += t;
    return *this;
  }
};

constexpr SimTime from_millis(std::uint64_t ms) { return {ms * 1000}; }
constexpr SimTime from_micros(std::uint64_t us) { return {us}; }

}  // namespace knetsim::sim
