#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relupoly/depgraph.hpp"

namespace relupoly {

// Rational data of one breakpoint facet, as consumed by the emission:
// primitive normal, offset, unnormalized weight and its squared norm.
struct FiberFacetData {
  std::size_t facet = 0;
  RatVec abar;
  Rat bbar;
  RatVec w;
  Rat norm2;
  SignPattern signs;   // activation pattern s(sigma)
  NeuronRef neuron;    // varphi(sigma): assigned hidden neuron of the target
};

struct FiberData {
  Architecture target;
  std::vector<FiberFacetData> facets;
};

// candidate -> hidden neuron of the target, injective
struct CandidateAssignment {
  std::vector<NeuronRef> neuron_of_candidate;
};

// All order-respecting injective maps up to within-layer permutation
// (canonical neuron indices per layer), truncated at cap.
struct ConfigurationList {
  std::vector<CandidateAssignment> configurations;
  bool truncated = false;
};
ConfigurationList enumerate_configurations(const DependencyGraph& g, const Architecture& arch,
                                           std::size_t cap);

// Fiber data for the parameter's own realization: each facet keeps its unique
// incident neuron and its own activation pattern.
FiberData ground_truth_fiber_data(const CanonicalComplex& c, const BreakpointComplex& b);

// Fiber data for a supplied candidate assignment; rejects assignments that
// violate a dependency-graph edge order before any emission happens.
FiberData fiber_data_for_assignment(const CanonicalComplex& c, const BreakpointComplex& b,
                                    const CandidatePartition& part, const DependencyGraph& g,
                                    const Architecture& target, const CandidateAssignment& phi);

struct Monomial {
  Rat coeff;
  // variable references: ("W", l, i, j), ("b", l, i), ("mu", facet)
  std::vector<std::vector<std::size_t>> w_refs;  // (l, i, j), repeated = power
  std::vector<std::pair<std::size_t, std::size_t>> b_refs;  // (l, i)
  std::size_t mu_power = 0;
  std::size_t mu_facet = 0;
};

struct PolyConstraint {
  std::string type;  // "alignment" | "offset" | "weight" | "nonzero"
  std::size_t facet = 0;
  std::size_t row = 0;
  std::vector<Monomial> poly;  // = 0 (or != 0 for "nonzero")
};

struct ConfigurationSystem {
  Architecture target;
  std::vector<FiberFacetData> facets;
  std::vector<PolyConstraint> constraints;
};

// Rational-only emission with the reparametrization mu = delta*lambda/|abar|:
// alignment rows g = mu*abar, offset row t = mu*bbar, weight rows in
// cross-multiplied squared form, one nonvanishing condition per facet.
ConfigurationSystem emit_configuration_system(const FiberData& data);

// Exact membership: solve mu per facet by one division, then check every
// alignment row and the full pairwise weight coherence.
bool verify_membership(const Parameter& eta, const FiberData& data);

std::string system_to_json(const ConfigurationSystem& sys);
std::string system_to_text(const ConfigurationSystem& sys);

}  // namespace relupoly
