#pragma once

#include "reeb/certificates.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb::fixtures {

/// Two parallel arcs between heights -2 and 2.
ReebGraph cycle_f();
/// A single segment over [-2, 2].
ReebGraph segment_g();
/// The level-preserving pair (phi: cycle -> segment, psi into the first arc),
/// a 1-distortion.
DistortionPair cycle_segment_pair();

/// Cycle through heights -2..2 with marked interior points x and z at height
/// 0 on the two arcs, plus tails down to -3 and up to 3.
ReebGraph tailed_cycle_f();
Point tailed_cycle_x();
Point tailed_cycle_z();
/// Segment over [-3, 3] with the marked point y at height 0.
ReebGraph long_segment_g();
Point long_segment_y();
/// Level-preserving pair with phi(x) = y and psi(y) = z (psi routes through
/// the z-arc); a 1-distortion constituent but not a 1-contortion.
DistortionPair tailed_pair();

/// Merge tree with leaves at 0 and 1 joined at a root at 3.
ReebGraph m1();
/// Root at the bottom (height 0), two upper leaves (2 and 3): a contour tree
/// that is not a merge tree.
ReebGraph m1_upside_down();

ReebGraph segment(const Rat& lo, const Rat& hi, const std::string& name = "");

}  // namespace reeb::fixtures
