#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reeb/complex.hpp"
#include "reeb/interlevel.hpp"
#include "reeb/plmap.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// phi: F -> G and psi: G -> F with a claimed delta. Distortion and
/// contortion certificates share this shape; only the verifier differs.
struct DistortionPair {
  Rat delta;
  PLMap phi, psi;
};
struct ContortionPair {
  Rat delta;
  PLMap phi, psi;
};

/// Component-valued interleaving certificate: at every vertex of the
/// grid-subdivided graphs, the assigned connected component of the
/// width-2delta window around the vertex value in the other graph.
/// Assignments address vertices as points of the original graphs.
struct InterleavingPair {
  Rat delta;
  std::vector<Rat> grid;
  struct Assignment {
    Point at;
    ComponentKey component;
  };
  std::vector<Assignment> phi;  // at points of F, components in G
  std::vector<Assignment> psi;  // at points of G, components in F
};

/// Concrete witness space for the universal distance: a complex carrying two
/// height tables whose Reeb quotients are claimed isomorphic to F and G.
struct Coupling {
  Rat delta;  // claimed sup-norm bound
  Complex2 z;
  std::vector<Rat> f_hat, g_hat;
  std::vector<std::pair<std::string, std::string>> iso_f, iso_g;
};

struct Verdict {
  bool accepted = false;
  std::string witness;  // populated on reject
  Rat measured;         // coupling sup-norm

  static Verdict accept() { return {true, "", Rat(0)}; }
  static Verdict reject(std::string w) { return {false, std::move(w), Rat(0)}; }
};

/// Def-2.10-style check: value bounds at route endpoints plus the
/// |d_f - d_g| <= 2 delta condition over correspondence samples at event
/// points. Throws std::invalid_argument on malformed maps.
Verdict verify_distortion(const ReebGraph& F, const ReebGraph& G,
                          const DistortionPair& pair);

/// Def-2.9-style check: for every event point x and every partner
/// y in psi^-1(x), phi(x) and y must be connected in g^-1(I_delta(f(x)));
/// symmetrically for G.
Verdict verify_contortion(const ReebGraph& F, const ReebGraph& G,
                          const ContortionPair& pair);

/// Interleaving check: per-cell continuity (a height-monotone path joins the
/// assigned components inside the delta-smoothing) and the 2-delta round
/// trips at grid vertices. Errors when the grid misses shifted criticals.
Verdict verify_interleaving(const ReebGraph& F, const ReebGraph& G,
                            const InterleavingPair& pair);

/// Confirms the claimed isomorphisms of the two Reeb quotients of z and
/// returns the exact sup-norm of f_hat - g_hat in Verdict::measured.
Verdict verify_coupling(const ReebGraph& F, const ReebGraph& G,
                        const Coupling& c);

/// Event heights on a source edge for map verification: route breakpoints,
/// window event preimages (criticals of both graphs shifted by the deltas in
/// `shifts`) and midpoints between consecutive events.
std::vector<Rat> edge_event_heights(const ReebGraph& src, const ReebGraph& dst,
                                    const PLMap& m, int src_edge,
                                    const std::vector<Rat>& shifts);

}  // namespace reeb
