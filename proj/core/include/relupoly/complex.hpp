#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "relupoly/geometry.hpp"
#include "relupoly/network.hpp"

namespace relupoly {

struct WorkingBox {
  std::size_t dim = 0;
  Rat radius = Rat(8);  // analyses run inside [-R, R]^dim

  Polyhedron polyhedron() const { return Polyhedron::box(dim, radius); }
};

struct NeuronRef {
  std::size_t layer;   // 1-based hidden layer
  std::size_t neuron;  // 0-based index within the layer

  bool operator==(const NeuronRef& o) const { return layer == o.layer && neuron == o.neuron; }
  bool operator<(const NeuronRef& o) const {
    return layer != o.layer ? layer < o.layer : neuron < o.neuron;
  }
};

struct Region {
  SignPattern signs;       // one entry per hidden layer; 0 only for constant-zero preactivations
  ActiveSets active;
  Polyhedron poly;         // includes the box constraints
  RatVec witness;          // strictly interior point
  AffinePiece map;         // x -> f(x) on this region
  AffinePiece hidden_map;  // x -> a^(L)(x) (or a^(stage) for stage regions)
  bool degenerate = false;
};

struct Face {
  SignPattern signs;
  int dim = 0;
  Polyhedron poly;
  Hyperplane hull;  // for facets: the affine hull (meaningless for ridges)
  RatVec witness;   // relative-interior point
  std::vector<NeuronRef> incident;  // neurons whose bent hyperplane contains this face
  bool box_clipped = false;
};

struct CanonicalComplex {
  Parameter param;
  WorkingBox box;
  Polyhedron domain;  // box, possibly intersected with a restriction polytope

  std::vector<Region> regions;
  std::vector<Face> facets;
  std::vector<Face> ridges;
  std::vector<std::array<std::size_t, 2>> facet_regions;  // facet -> the two adjacent regions
  std::vector<std::vector<std::size_t>> ridge_facets;     // ridge -> incident facets
  std::vector<std::vector<std::size_t>> ridge_regions;    // ridge -> star regions

  // stage_regions[l] = regions of the partial complex through layer l (l = 0..L)
  std::vector<std::vector<Region>> stage_regions;

  bool boundary_warning = false;  // some facet is clipped by the working box
  bool has_degenerate = false;    // some preactivation vanished identically on a region
  std::size_t lp_calls = 0;
};

// Layer-by-layer region enumeration with LP pruning, then facets and ridges
// from pairwise intersections. `within` restricts the domain (default: box).
CanonicalComplex build_complex(const Parameter& p, const WorkingBox& box,
                               const Polyhedron* within = nullptr);

// Facet ids of the visible bent hyperplane of one neuron.
std::vector<std::size_t> bent_hyperplane_facets(const CanonicalComplex& c, const NeuronRef& n);

// Faces intersected with P, activation patterns inherited.
CanonicalComplex local_complex(const CanonicalComplex& c, const Polyhedron& p);

std::string complex_to_json(const CanonicalComplex& c);

}  // namespace relupoly
