#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "darcnn/geom.hpp"

namespace darcnn {

using PersonId = std::int64_t;

enum class Part { head, body };

// head_body: head is the principal part; body_head: body is.
enum class Branch { head_body, body_head };

inline Branch branch_for(Part principal) {
  return principal == Part::head ? Branch::head_body : Branch::body_head;
}

inline std::string_view to_string(Part p) { return p == Part::head ? "head" : "body"; }

inline std::string_view to_string(Branch b) {
  return b == Branch::head_body ? "head_body" : "body_head";
}

// Ground truth for one person.
struct GtPair {
  Box head;
  Box body;
  PersonId person_id = 0;

  const Box& part(Part p) const { return p == Part::head ? head : body; }

  friend bool operator==(const GtPair&, const GtPair&) = default;
};

struct Scene {
  std::string image_id;
  ImageSize image;
  std::vector<GtPair> persons;

  friend bool operator==(const Scene&, const Scene&) = default;
};

// Coupled head/body proposal emitted from one anchor of one branch.
struct PairedProposal {
  Box head;
  Box body;
  double score = 0.0;
  Part principal = Part::head;
  Branch source_branch = Branch::head_body;

  const Box& part(Part p) const { return p == Part::head ? head : body; }

  friend bool operator==(const PairedProposal&, const PairedProposal&) = default;
};

// Final head/body candidate entering suppression.
struct DetectionPair {
  Box head;
  Box body;
  double head_score = 0.0;
  double body_score = 0.0;

  friend bool operator==(const DetectionPair&, const DetectionPair&) = default;
};

}  // namespace darcnn
