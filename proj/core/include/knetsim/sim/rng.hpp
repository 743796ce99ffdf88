#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace knetsim::sim {

// Counter-free xoshiro256** stream seeded from (seed, stream label) via
// splitmix64. All derived draws (doubles, ranges, normals) are computed with
// explicit arithmetic, so the same (seed, label, draw index) produces the
// same value on every platform and build. Standard-library distributions are
// implementation-defined and would break replay.
class RngStream {
public:
  RngStream() : RngStream(0, "") {}
  RngStream(std::uint64_t seed, const std::string& stream_id);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double();

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n);

  bool next_bernoulli(double p);

  // Standard normal via Box-Muller; consumes two uniform draws per pair.
  double next_normal();

  // Uniform in [lo, hi).
  double next_range(double lo, double hi);

  std::uint64_t draw_count() const { return draws_; }

private:
  std::uint64_t state_[4];
  std::uint64_t draws_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// One named stream per entity: registering a new entity never perturbs the
// draw sequences of existing ones.
class RngRegistry {
public:
  explicit RngRegistry(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  RngStream& stream(const std::string& stream_id);

private:
  std::uint64_t seed_;
  std::map<std::string, RngStream> streams_;
};

}  // namespace knetsim::sim
