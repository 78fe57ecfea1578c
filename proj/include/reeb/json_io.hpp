#pragma once

#include <string>

#include "reeb/certificates.hpp"
#include "reeb/complex.hpp"
#include "reeb/distances.hpp"
#include "reeb/reeb_graph.hpp"

namespace reeb {

/// Canonical-ordered graph JSON:
///   {"nodes":[{"id":...,"h":[num,den]}...], "edges":[[lower,upper]...]}
/// Nodes are sorted by (height, id) and edges by endpoint order, so byte
/// equality of two serialized canonical forms means they are isomorphic with
/// identical ids.
std::string serialize_graph(const ReebGraph& g);
ReebGraph parse_graph(const std::string& text);

std::string serialize_complex(const Complex2& x);
Complex2 parse_complex(const std::string& text);

/// Certificates are tagged by "kind": distortion / contortion /
/// interleaving / coupling. Points are {"node": id} or {"edge": i, "h": [n,d]}.
std::string serialize_distortion(const ReebGraph& F, const ReebGraph& G,
                                 const DistortionPair& p);
std::string serialize_contortion(const ReebGraph& F, const ReebGraph& G,
                                 const ContortionPair& p);
std::string serialize_interleaving(const ReebGraph& F, const ReebGraph& G,
                                   const InterleavingPair& p);
std::string serialize_coupling(const Coupling& c);

std::string certificate_kind(const std::string& text);
DistortionPair parse_distortion(const ReebGraph& F, const ReebGraph& G,
                                const std::string& text);
ContortionPair parse_contortion(const ReebGraph& F, const ReebGraph& G,
                                const std::string& text);
InterleavingPair parse_interleaving(const ReebGraph& F, const ReebGraph& G,
                                    const std::string& text);
Coupling parse_coupling(const std::string& text);

/// Point-map sidecar: {"points":[[source,target]...]}.
std::string serialize_point_map(
    const ReebGraph& src, const ReebGraph& dst,
    const std::vector<std::pair<Point, Point>>& pairs);

std::string serialize_report(const DistanceReport& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace reeb
