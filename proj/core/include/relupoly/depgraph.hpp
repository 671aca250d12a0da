#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relupoly/tropical.hpp"

namespace relupoly {

enum class RidgeKind { NonBending, Bending, Ambiguous, BoxClipped };

struct RidgeClass {
  std::size_t ridge = 0;
  RidgeKind kind = RidgeKind::Ambiguous;
  std::size_t star_count = 0;            // facets in the breakpoint star
  std::vector<std::size_t> earlier;      // facet ids (bending only)
  std::vector<std::size_t> later;        // facet ids (bending only)
  std::vector<std::vector<std::size_t>> continuations;  // opposite equal-weight pairs
  std::string note;
};

RidgeClass classify_ridge(const CanonicalComplex& c, const BreakpointComplex& b, std::size_t ridge);

struct CandidatePartition {
  std::vector<std::vector<std::size_t>> classes;  // candidate -> member facets
  std::vector<std::size_t> facet_class;           // facet -> candidate (SIZE_MAX if invisible)
  std::vector<RidgeClass> ridge_classes;
  bool had_ambiguous = false;

  // ground-truth layer attribution when every member facet shares one neuron
  std::optional<NeuronRef> attribution(const CanonicalComplex& c, std::size_t cls) const;
};

CandidatePartition candidate_bent_hyperplanes(const CanonicalComplex& c, const BreakpointComplex& b);

struct DepEdge {
  std::size_t from = 0, to = 0;
  std::vector<std::size_t> witness_ridges;
};

struct DependencyGraph {
  std::size_t vertex_count = 0;
  std::vector<DepEdge> edges;
  bool had_ambiguous = false;

  bool has_edge(std::size_t u, std::size_t v) const;
};

DependencyGraph dependency_graph(const CanonicalComplex& c, const BreakpointComplex& b,
                                 const CandidatePartition& part);

// Does the graph contain a vertex-disjoint layered subgraph matching the
// hidden architecture with all adjacent layers fully connected?
bool layered_subgraph_check(const DependencyGraph& g, const Architecture& arch);

struct DepthCertificate {
  bool accepted = true;
  std::vector<std::size_t> chain;  // witnessing chain of candidates when rejected
};
// Rejects iff the graph contains a directed chain of more than max_layers vertices.
DepthCertificate depth_certificate(const DependencyGraph& g, std::size_t max_layers);

// Longest directed chain (vertex count); cycles are reported as rejection.
std::vector<std::size_t> longest_chain(const DependencyGraph& g);

std::string depgraph_to_dot(const CanonicalComplex& c, const CandidatePartition& part,
                            const DependencyGraph& g);

}  // namespace relupoly
