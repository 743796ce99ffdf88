#include "knetsim/kb/object.hpp"

#include <algorithm>
#include <cmath>

namespace knetsim::kb {

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Fact: return "fact";
    case ObjectKind::Experience: return "experience";
    case ObjectKind::ModelSummary: return "model-summary";
    case ObjectKind::Intention: return "intention";
    case ObjectKind::ReasoningTrace: return "reasoning-trace";
  }
  return "unknown";
}

std::uint64_t payload_digest(const Payload& payload) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a(h, static_cast<std::uint64_t>(payload.values.size()));
  for (double v : payload.values) h = fnv1a(h, v);
  h = fnv1a(h, payload.tag);
  return h;
}

double payload_distance(const Payload& a, const Payload& b) {
  if (a.tag != b.tag || a.values.size() != b.values.size()) return 1.0;
  if (a.values.empty()) return 0.0;
  double sum = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    sum += std::abs(a.values[i] - b.values[i]);
    scale += std::max(std::abs(a.values[i]), std::abs(b.values[i]));
  }
  if (scale == 0.0) return 0.0;
  return std::min(1.0, sum / scale);
}

std::uint64_t hop_digest(EntityId author, const Payload& payload, std::uint64_t prior) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a(h, static_cast<std::uint64_t>(author));
  h = fnv1a(h, payload_digest(payload));
  h = fnv1a(h, prior);
  return h;
}

void sign(KnowledgeObject& object, EntityId author) {
  const std::uint64_t prior =
      object.provenance.empty() ? 0 : object.provenance.back().digest;
  object.provenance.push_back({author, hop_digest(author, object.payload, prior)});
}

bool verify_provenance(const KnowledgeObject& object) {
  if (object.provenance.empty()) return false;
  std::uint64_t prior = 0;
  for (const auto& hop : object.provenance) {
    if (hop.digest != hop_digest(hop.author, object.payload, prior)) return false;
    prior = hop.digest;
  }
  return true;
}

KnowledgeObject make_object(std::uint64_t id, ObjectKind kind, EntityId subject,
                            Payload payload, double confidence, sim::SimTime valid_from,
                            sim::SimTime valid_until, EntityId origin,
                            std::uint64_t version) {
  if (confidence < 0.0 || confidence > 1.0) {
    throw Error("InvalidValue", "confidence outside [0, 1]");
  }
  KnowledgeObject obj;
  obj.id = id;
  obj.kind = kind;
  obj.subject = subject;
  obj.payload = std::move(payload);
  obj.confidence = confidence;
  obj.valid_from = valid_from;
  obj.valid_until = valid_until;
  obj.origin = origin;
  obj.version = version;
  sign(obj, origin);
  return obj;
}

}  // namespace knetsim::kb
