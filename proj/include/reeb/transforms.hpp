#pragma once

#include "reeb/certificates.hpp"
#include "reeb/smoothing.hpp"

namespace reeb {

/// Every constructive proof as a certificate transformation. Each verifies
/// its input first and throws std::invalid_argument when the input does not
/// verify; each output passes its own verifier at the stated bound.

/// A verified contortion pair is a distortion pair at the same delta.
DistortionPair contortion_as_distortion(const ReebGraph& F, const ReebGraph& G,
                                        const ContortionPair& pair);

/// From a coupling with sup-norm delta, a contortion pair at delta + 2 eps.
ContortionPair coupling_to_contortion(const ReebGraph& F, const ReebGraph& G,
                                      const Coupling& c, const Rat& eps);

/// From a distortion pair at delta, a coupling with sup-norm <= 3 delta.
Coupling distortion_to_coupling(const ReebGraph& F, const ReebGraph& G,
                                const DistortionPair& pair);

/// From an interleaving at delta, a coupling with sup-norm <= 5 delta.
Coupling interleaving_to_coupling(const ReebGraph& F, const ReebGraph& G,
                                  const InterleavingPair& pair);

/// From an interleaving at delta, a contortion pair at 3 delta + 3 eps.
ContortionPair interleaving_to_contortion_general(const ReebGraph& F,
                                                  const ReebGraph& G,
                                                  const InterleavingPair& pair,
                                                  const Rat& eps);

/// Merge trees only: from an interleaving at delta, a contortion pair at the
/// same delta (capped-shift composition through the epigraph).
ContortionPair interleaving_to_contortion_merge(const ReebGraph& F,
                                                const ReebGraph& G,
                                                const InterleavingPair& pair);

/// Contour trees only: from a contortion pair at delta, a coupling with
/// sup-norm <= delta, built from geodesic products swept along edges.
Coupling contortion_to_coupling_contour(const ReebGraph& F, const ReebGraph& G,
                                        const ContortionPair& pair);

/// Default sample spacing: a quarter of the smallest gap between distinct
/// critical heights of the two graphs.
Rat default_epsilon(const ReebGraph& F, const ReebGraph& G);

}  // namespace reeb
