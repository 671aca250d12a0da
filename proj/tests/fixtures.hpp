#pragma once

#include <random>

#include "relupoly/network.hpp"

namespace fixtures {

using namespace relupoly;

inline RatMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<RatVec> rv;
  for (auto& r : rows) {
    RatVec v;
    for (auto x : r) v.push_back(Rat(x));
    rv.push_back(v);
  }
  return RatMat::from_rows(rv);
}

inline RatVec vec(std::initializer_list<long> xs) {
  RatVec v;
  for (auto x : xs) v.push_back(Rat(x));
  return v;
}

inline Rat q(long n, long d = 1) { return rat_from_long(n, d); }

// The three parameter sets realizing min{0, max{x2 - x1 + 1, -x2}}; the listed
// output biases are 0.
inline Parameter sec6_realization(int which) {
  Parameter p;
  switch (which) {
    case 1: {
      p.arch.widths = {2, 2, 2, 1};
      p.layers.push_back({mat({{1, 0}, {0, 1}}), vec({0, 0})});
      p.layers.push_back({mat({{1, -1}, {1, -2}}), vec({-1, -1})});
      p.layers.push_back({mat({{-1, 1}}), vec({0})});
      break;
    }
    case 2: {
      p.arch.widths = {2, 2, 2, 1};
      p.layers.push_back({mat({{1, 1}, {1, -1}}), vec({0, -1})});
      Layer l2;
      l2.W = RatMat(2, 2);
      l2.W(0, 0) = q(1, 2);
      l2.W(0, 1) = q(-1, 2);
      l2.W(1, 0) = q(1, 2);
      l2.W(1, 1) = q(-3, 2);
      l2.b = {q(-1, 2), q(-1, 2)};
      p.layers.push_back(l2);
      p.layers.push_back({mat({{-1, 1}}), vec({0})});
      break;
    }
    case 3: {
      p.arch.widths = {2, 2, 1, 1};
      p.layers.push_back({mat({{0, 1}, {-1, 2}}), vec({1, 1})});
      p.layers.push_back({mat({{1, -1}}), vec({-1})});
      p.layers.push_back({mat({{-1}}), vec({0})});
      break;
    }
    default:
      throw std::runtime_error("unknown realization");
  }
  p.validate();
  return p;
}

// min{0, max{x2 - x1 + 1, -x2}}
inline Rat sec6_function(const RatVec& x) {
  Rat a = x[1] - x[0] + 1;
  Rat b = -x[1];
  Rat m = a > b ? a : b;
  return m < 0 ? m : Rat(0);
}

// Two first-layer lines (the axes) and one second-layer neuron whose bent
// hyperplane is the polyline through (0,2) and (2,0); 7 regions in a box.
inline Parameter fig1b_net() {
  Parameter p;
  p.arch.widths = {2, 2, 1, 1};
  p.layers.push_back({mat({{1, 0}, {0, 1}}), vec({0, 0})});
  Layer l2;
  l2.W = RatMat(1, 2);
  l2.W(0, 0) = q(1, 2);
  l2.W(0, 1) = q(1, 2);
  l2.b = {q(-1)};
  p.layers.push_back(l2);
  p.layers.push_back({mat({{1}}), vec({0})});
  p.validate();
  return p;
}

// f = [1 - [x]_+ - [y]_+]_+ : a bending ridge with three visible facets at
// (1,0) and at (0,1); the function is constant beyond the bent line.
inline Parameter three_facet_net() {
  Parameter p;
  p.arch.widths = {2, 2, 1, 1};
  p.layers.push_back({mat({{1, 0}, {0, 1}}), vec({0, 0})});
  p.layers.push_back({mat({{-1, -1}}), vec({1})});
  p.layers.push_back({mat({{1}}), vec({0})});
  p.validate();
  return p;
}

// Second layer not transparent: both second-layer preactivations are negative
// on a strip crossing the x-axis, so a first-layer facet is invisible there.
inline Parameter fig4a_net() {
  Parameter p;
  p.arch.widths = {2, 2, 2, 1};
  p.layers.push_back({mat({{1, 0}, {0, 1}}), vec({0, 0})});
  Layer l2;
  l2.W = RatMat(2, 2);
  l2.W(0, 0) = q(-1);
  l2.W(0, 1) = q(-1);
  l2.W(1, 0) = q(1, 4);
  l2.W(1, 1) = q(1, 4);
  l2.b = {q(1), q(-1)};
  p.layers.push_back(l2);
  p.layers.push_back({mat({{1, 1}}), vec({0})});
  p.validate();
  return p;
}

// Slab-like transparent second layer: one neuron active toward the origin,
// one active away from it, jointly covering the nonnegative orthant image.
// The weights are chosen generic (full-rank products).
inline Parameter fig4b_net() {
  Parameter p;
  p.arch.widths = {2, 2, 2, 1};
  p.layers.push_back({mat({{1, 0}, {0, 1}}), vec({0, 0})});
  Layer l2;
  l2.W = RatMat(2, 2);
  l2.W(0, 0) = q(-1, 4);
  l2.W(0, 1) = q(-1, 5);
  l2.W(1, 0) = q(1);
  l2.W(1, 1) = q(1);
  l2.b = {q(1), q(-1)};
  p.layers.push_back(l2);
  Layer l3;
  l3.W = RatMat(1, 2);
  l3.W(0, 0) = q(3, 5);
  l3.W(0, 1) = q(-2, 7);
  l3.b = {q(0)};
  p.layers.push_back(l3);
  p.validate();
  return p;
}

// A second-layer bent hyperplane through the intersection of the two
// first-layer lines: supertransversality fails at the origin.
inline Parameter fig4c_net() {
  Parameter p;
  p.arch.widths = {2, 2, 1, 1};
  p.layers.push_back({mat({{1, 0}, {0, 1}}), vec({0, 0})});
  p.layers.push_back({mat({{1, -1}}), vec({0})});
  p.layers.push_back({mat({{1}}), vec({0})});
  p.validate();
  return p;
}

inline Rat random_rational(std::mt19937_64& rng, long denom = 1 << 16) {
  std::uniform_int_distribution<long> dist(-denom, denom);
  return rat_from_long(dist(rng), denom);
}

inline Parameter random_net(const Architecture& arch, std::mt19937_64& rng) {
  Parameter p;
  p.arch = arch;
  for (std::size_t l = 1; l < arch.widths.size(); ++l) {
    Layer lay;
    lay.W = RatMat(arch.widths[l], arch.widths[l - 1]);
    for (std::size_t i = 0; i < lay.W.rows(); ++i)
      for (std::size_t j = 0; j < lay.W.cols(); ++j) lay.W(i, j) = random_rational(rng);
    for (std::size_t i = 0; i < arch.widths[l]; ++i) lay.b.push_back(random_rational(rng));
    p.layers.push_back(std::move(lay));
  }
  p.validate();
  return p;
}

inline RatVec random_point(std::size_t dim, const Rat& radius, std::mt19937_64& rng) {
  RatVec x(dim);
  std::uniform_int_distribution<long> dist(-(1 << 16), 1 << 16);
  for (auto& v : x) v = radius * rat_from_long(dist(rng), 1 << 16);
  return x;
}

}  // namespace fixtures
