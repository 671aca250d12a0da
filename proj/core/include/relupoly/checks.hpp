#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relupoly/depgraph.hpp"
#include "relupoly/rng.hpp"
#include "relupoly/tropical.hpp"

namespace relupoly {

enum class VerdictStatus { Pass, Fail, ProbabilisticPass };

struct Verdict {
  std::string property;
  VerdictStatus status = VerdictStatus::Pass;
  std::string notes;
  std::vector<std::size_t> witness_faces;
  std::vector<std::string> witnesses;

  bool passed() const { return status != VerdictStatus::Fail; }
};

// Def.-2 genericity: per-region arrangement condition plus the selector-product
// rank condition. Exhaustive over subset sequences up to 2^16 per (k,l) pair,
// then 1024 random sequences with a probabilistic verdict.
Verdict genericity_check(const CanonicalComplex& c, std::uint64_t seed = 0);

// every facet on exactly one bent hyperplane, every interior ridge on exactly two
Verdict supertransversality_check(const CanonicalComplex& c);

// zero facet weight iff some layer is entirely inactive on the facet
Verdict cancellation_free_check(const CanonicalComplex& c, const BreakpointComplex& b);

struct CtpicChoice {
  NeuronRef neuron;
  std::vector<std::size_t> facets;  // chosen connected component
};

struct CtpicResult {
  Verdict verdict;
  std::vector<CtpicChoice> chosen;
};

CtpicResult ctpic_check(const CanonicalComplex& c, const BreakpointComplex& b, const Polyhedron& p);

struct IdentifiabilityReport {
  bool identifiable_among_generic = false;
  std::string polytope;  // description of the sub-polytope found
  Verdict genericity;
  Verdict supertransversality;
  Verdict cancellation_free;
  std::vector<Verdict> transparency;  // layers 2..L
  Verdict lra;
  Verdict ctpic;
  std::vector<std::string> failed_premises;
};

// Aggregates generic + cTPIC + LRA over candidate sub-polytopes (the box, each
// full-dimensional region, and any extra polytopes supplied, e.g. from a
// construction trail). Never claims non-identifiability.
IdentifiabilityReport identifiability_verdict(const CanonicalComplex& c, const BreakpointComplex& b,
                                              std::uint64_t seed = 0,
                                              const std::vector<Polyhedron>* extra = nullptr);

struct FunctionalDimension {
  int rank = 0;
  std::vector<double> singular_values;
  std::size_t samples = 0;
  double cutoff = 0.0;
  double gap = 0.0;  // sigma_rank / sigma_{rank+1} (inf when full)
};

// Numeric rank of the stacked parameter Jacobian at random box samples; the
// Jacobian per sample is the exact piecewise formula evaluated in floating
// point, with cutoff 1e-8 times the largest singular value.
FunctionalDimension functional_dimension_estimate(const Parameter& p, const WorkingBox& box,
                                                  std::size_t samples, std::uint64_t seed);

// Appendix-B bound: n + min over alpha in {-1,0,1}^n of
// rank((A + sum alpha_i col_i row_i) Q), Q the projection onto aff(P).
int min_width_lower_bound(const Parameter& one_hidden_layer, const RatMat& a, const Polyhedron& p);

std::string verdict_to_string(const Verdict& v);

}  // namespace relupoly
