#pragma once

#include <optional>
#include <string>

#include "reeb/certificates.hpp"

namespace reeb {

/// Candidate deltas: pairwise differences of critical heights of both graphs
/// and their halves, together with 0.
std::vector<Rat> candidate_deltas(const ReebGraph& F, const ReebGraph& G);

/// Existence of a delta-interleaving between merge trees, decided by
/// exhaustive backtracking over component assignments at grid vertices
/// (unique-ascent propagation prunes everything except the leaf choices).
struct MergeDecision {
  bool exists = false;
  std::optional<InterleavingPair> witness;
};
MergeDecision interleaving_decision_merge(const ReebGraph& F, const ReebGraph& G,
                                          const Rat& delta);

/// Smallest candidate delta admitting an interleaving, with witness.
std::pair<Rat, InterleavingPair> interleaving_distance_merge(const ReebGraph& F,
                                                             const ReebGraph& G);

/// Three-valued search verdicts for the map-pair decisions.
struct SearchVerdict {
  enum Kind { Found, FalseAtResolution, FalseComplete, Exhausted } kind;
  std::optional<ContortionPair> contortion;  // witness when Found
  std::optional<DistortionPair> distortion;
  long nodes_explored = 0;
};

struct SearchBudget {
  long max_nodes = 2'000'000;
};

/// Exhaustive search over vertex-to-grid-vertex image assignments with
/// canonical routes; exact "false" (FalseComplete) only when delta and all
/// heights are grid-aligned.
SearchVerdict contortion_decision(const ReebGraph& F, const ReebGraph& G,
                                  const Rat& delta, const std::vector<Rat>& grid,
                                  const SearchBudget& budget = {});
SearchVerdict distortion_decision(const ReebGraph& F, const ReebGraph& G,
                                  const Rat& delta, const std::vector<Rat>& grid,
                                  const SearchBudget& budget = {});

struct DistanceBracket {
  Rat lower, upper;
  std::string lower_evidence, upper_evidence;
};

struct DistanceReport {
  DistanceBracket d_I, d_FD, d_FC, d_U;
};

/// Brackets for the four distances. Exact on merge trees (decision plus the
/// full transformation pipeline); aggregated evidence elsewhere.
DistanceReport distance_report(const ReebGraph& F, const ReebGraph& G);

}  // namespace reeb
