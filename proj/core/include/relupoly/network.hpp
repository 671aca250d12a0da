#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relupoly/geometry.hpp"
#include "relupoly/linalg.hpp"
#include "relupoly/rational.hpp"

namespace relupoly {

struct Architecture {
  std::vector<std::size_t> widths;  // (n_0, ..., n_{L+1})

  std::size_t depth() const { return widths.size() - 2; }  // L = number of hidden layers
  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }
  std::size_t width(std::size_t layer) const { return widths.at(layer); }  // layer 0 = input
  std::size_t parameter_count() const;
  std::size_t hidden_neuron_count() const;
  // Thm-18 value: sum of n_l * n_{l-1} plus n_{L+1} = parameters minus hidden neurons.
  std::size_t expected_functional_dimension() const;
  void validate() const;
  bool operator==(const Architecture& o) const { return widths == o.widths; }

  static Architecture parse(const std::string& comma_separated);
  std::string to_string() const;
};

struct Layer {
  RatMat W;
  RatVec b;
};

struct Parameter {
  Architecture arch;
  std::vector<Layer> layers;  // L+1 layers; the last one is the affine output layer

  void validate() const;
  const Layer& layer(std::size_t l) const { return layers.at(l - 1); }  // 1-based
  Layer& layer(std::size_t l) { return layers.at(l - 1); }
};

// Signs per hidden layer, entries in {-1, 0, +1}.
using LayerSigns = std::vector<int>;
using SignPattern = std::vector<LayerSigns>;

// Active index sets per hidden layer (0-based neuron indices).
using ActiveSets = std::vector<std::vector<std::size_t>>;

ActiveSets active_sets_from_signs(const SignPattern& s);
std::string sign_pattern_to_string(const SignPattern& s);

struct EvalTrace {
  std::vector<RatVec> pre;  // z^(1) .. z^(L)
  std::vector<RatVec> act;  // a^(0) = x, a^(1) .. a^(L)
  RatVec out;
};

EvalTrace eval_trace(const Parameter& p, const RatVec& x);
RatVec eval(const Parameter& p, const RatVec& x);
SignPattern activation_pattern(const Parameter& p, const RatVec& x);

struct AffinePiece {
  RatMat A;
  RatVec b;

  RatVec eval(const RatVec& x) const { return vec_add(A * x, b); }
  bool operator==(const AffinePiece& o) const { return A == o.A && b == o.b; }
};

// Affine map of the whole network on the region with the given active sets:
// A = W^(L+1) D_{S_L} W^(L) ... D_{S_1} W^(1), plus the matching bias chain.
AffinePiece affine_map_for_pattern(const Parameter& p, const ActiveSets& s);

// Affine map x -> a^(upto) on the region with the given active sets
// (upto = 0 gives the identity).
AffinePiece hidden_activation_map(const Parameter& p, const ActiveSets& s, std::size_t upto);

// Preactivation z^(l)_j as an affine function of the input on a region with the
// given active sets for the earlier layers.
LinExpr preactivation_affine(const Parameter& p, const ActiveSets& s, std::size_t l, std::size_t j);

// --- trivial symmetries ---

Parameter permute_layer(const Parameter& p, std::size_t hidden_layer,
                        const std::vector<std::size_t>& perm);
// lambda must be > 0.
Parameter scale_neuron(const Parameter& p, std::size_t hidden_layer, std::size_t neuron,
                       const Rat& lambda);

// Orbit canonical form: per hidden neuron, positive scaling to a primitive
// integer incoming (row, bias); neurons sorted lexicographically per layer.
Parameter canonicalize(const Parameter& p);
bool equivalent_mod_symmetries(const Parameter& a, const Parameter& b);

// --- shared network JSON format ---
Parameter parse_network_json(const std::string& text);
std::string emit_network_json(const Parameter& p);

}  // namespace relupoly
