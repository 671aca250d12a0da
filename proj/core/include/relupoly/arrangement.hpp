#pragma once

#include <string>
#include <vector>

#include "relupoly/geometry.hpp"

namespace relupoly {

struct Arrangement {
  std::size_t dim = 0;
  std::vector<Hyperplane> hyperplanes;
};

struct Essentialization {
  Arrangement essential;                // arrangement in the coordinates of L-perp
  std::vector<RatVec> lineality_basis;  // basis of the common lineality space L
  std::vector<RatVec> coord_basis;      // rows spanning L-perp; y = coord_basis * x
};

// Projects onto the orthogonal complement of the common lineality space.
Essentialization essentialize(const Arrangement& arr);

struct GenericityFailure {
  std::string reason;
  std::vector<std::size_t> subset;  // offending hyperplane indices, if any
  RatVec witness;                   // offending point, if any
};

// Generic in the classical sense: every k <= dim subset meets in codimension k
// and no dim+1 hyperplanes share a point. Call on an essential arrangement.
bool arrangement_is_generic(const Arrangement& arr, GenericityFailure* failure = nullptr);

// Def.-2-condition-1 style check: restrict the arrangement to aff(R),
// essentialize, test genericity, and require that no hyperplane passes through
// a vertex of R. Hyperplanes containing aff(R) make the input non-generic;
// hyperplanes missing aff(R) are dropped.
bool generic_arrangement_in_region(const Arrangement& arr, const Polyhedron& region,
                                   GenericityFailure* failure = nullptr);

}  // namespace relupoly
