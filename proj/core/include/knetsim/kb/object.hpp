#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knetsim/common.hpp"
#include "knetsim/sim/time.hpp"

namespace knetsim::kb {

enum class ObjectKind : std::uint8_t {
  Fact,
  Experience,
  ModelSummary,
  Intention,
  ReasoningTrace,
};

std::string_view to_string(ObjectKind kind);

// Scenario-defined object value: a numeric vector (position, trajectory cells,
// anomaly score, ...) plus an optional discrete tag.
struct Payload {
  std::vector<double> values;
  std::string tag;

  bool operator==(const Payload&) const = default;
};

std::uint64_t payload_digest(const Payload& payload);

// Normalised L1 distance between payload vectors, 1.0 on tag or shape
// mismatch. Used for delta significance and prior grounding checks.
double payload_distance(const Payload& a, const Payload& b);

struct ProvenanceHop {
  EntityId author = 0;
  std::uint64_t digest = 0;  // covers (author, payload digest, prior hop digest)
};

struct KnowledgeObject {
  std::uint64_t id = 0;
  ObjectKind kind = ObjectKind::Fact;
  EntityId subject = 0;
  Payload payload;
  double confidence = 0.0;
  sim::SimTime valid_from{};
  sim::SimTime valid_until{};
  EntityId origin = 0;
  std::uint64_t version = 0;  // monotone per (subject, kind, origin)
  std::vector<ProvenanceHop> provenance;

  bool valid_at(sim::SimTime now) const {
    return valid_from <= now && now < valid_until;
  }
};

std::uint64_t hop_digest(EntityId author, const Payload& payload, std::uint64_t prior);

// Appends a provenance hop whose digest covers the payload and the previous
// hop, forming the tamper-evident chain.
void sign(KnowledgeObject& object, EntityId author);

// Recomputes the digest chain hop by hop; true iff every stored digest
// matches and the chain is non-empty.
bool verify_provenance(const KnowledgeObject& object);

// Convenience constructor that validates invariants and signs the first hop.
KnowledgeObject make_object(std::uint64_t id, ObjectKind kind, EntityId subject,
                            Payload payload, double confidence, sim::SimTime valid_from,
                            sim::SimTime valid_until, EntityId origin, std::uint64_t version);

}  // namespace knetsim::kb
