#include "relupoly/depgraph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace relupoly {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      std::size_t nxt = parent_[x];
      parent_[x] = root;
      x = nxt;
    }
    return root;
  }
  void merge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<std::size_t> parent_, size_;
};

// direction of a facet seen from the ridge: the facet witness relative to the
// ridge witness, projected off the ridge's direction space
RatVec facet_direction_at_ridge(const CanonicalComplex& c, std::size_t facet, std::size_t ridge) {
  RatVec v = vec_sub(c.facets[facet].witness, c.ridges[ridge].witness);
  if (c.box.dim == 2) return v;  // ridges are points in the plane
  auto hull = affine_hull(c.ridges[ridge].poly);
  if (!hull || hull->basis.empty()) return v;
  // subtract the orthogonal projection onto the ridge directions
  RatMat proj = projection_onto_span(hull->basis);
  RatVec pv = proj * v;
  return vec_sub(v, pv);
}

bool opposite_directions(const RatVec& a, const RatVec& b) {
  if (!proportional(a, b)) return false;
  return !positively_proportional(a, b);
}

bool region_is_constant(const Region& r) { return r.map.A.is_zero(); }

}  // namespace

RidgeClass classify_ridge(const CanonicalComplex& c, const BreakpointComplex& b, std::size_t ridge) {
  RidgeClass rc;
  rc.ridge = ridge;
  if (c.ridges[ridge].box_clipped) {
    rc.kind = RidgeKind::BoxClipped;
    rc.note = "ridge clipped by the working box";
    return rc;
  }
  auto star = b.star(c, ridge);
  rc.star_count = star.size();

  // opposite equal-weight pairs (continuations of one hyperplane)
  std::vector<std::vector<std::size_t>> pairs;
  std::vector<bool> paired(star.size(), false);
  for (std::size_t i = 0; i < star.size(); ++i)
    for (std::size_t j = i + 1; j < star.size(); ++j) {
      if (!(c.facets[star[i]].hull == c.facets[star[j]].hull)) continue;
      RatVec di = facet_direction_at_ridge(c, star[i], ridge);
      RatVec dj = facet_direction_at_ridge(c, star[j], ridge);
      if (!opposite_directions(di, dj)) continue;
      if (b.weights[star[i]].w == b.weights[star[j]].w) {
        pairs.push_back({star[i], star[j]});
        paired[i] = paired[j] = true;
      }
    }
  bool all_paired = true;
  for (std::size_t i = 0; i < star.size(); ++i) all_paired = all_paired && paired[i];

  if (all_paired && !star.empty()) {
    rc.kind = RidgeKind::NonBending;
    rc.continuations = pairs;
    return rc;
  }

  if (rc.star_count != 3 && rc.star_count != 4) {
    rc.kind = RidgeKind::Ambiguous;
    rc.note = "non-supertransversal input: breakpoint star has " +
              std::to_string(rc.star_count) + " facets";
    return rc;
  }
  if (c.ridges[ridge].incident.size() != 2) {
    rc.kind = RidgeKind::Ambiguous;
    rc.note = "non-generic: ridge lies on " + std::to_string(c.ridges[ridge].incident.size()) +
              " bent hyperplanes, attribution ambiguous";
    return rc;
  }

  rc.kind = RidgeKind::Bending;
  if (rc.star_count == 4) {
    // the earlier hyperplane continues straight: exactly one opposite-normal pair
    std::vector<std::vector<std::size_t>> opp;
    for (std::size_t i = 0; i < star.size(); ++i)
      for (std::size_t j = i + 1; j < star.size(); ++j) {
        if (!(c.facets[star[i]].hull == c.facets[star[j]].hull)) continue;
        if (opposite_directions(facet_direction_at_ridge(c, star[i], ridge),
                                facet_direction_at_ridge(c, star[j], ridge)))
          opp.push_back({star[i], star[j]});
      }
    if (opp.size() != 1) {
      rc.kind = RidgeKind::Ambiguous;
      rc.note = "bending ridge without a unique straight pair";
      return rc;
    }
    rc.earlier = opp[0];
    for (auto f : star)
      if (f != opp[0][0] && f != opp[0][1]) rc.later.push_back(f);
  } else {
    // three facets: the earlier one is the unique facet not adjacent to a
    // region where the function is constant
    std::vector<std::size_t> not_const_adjacent;
    for (auto f : star) {
      const auto& pr = c.facet_regions[f];
      bool adj_const = region_is_constant(c.regions[pr[0]]) || region_is_constant(c.regions[pr[1]]);
      if (!adj_const) not_const_adjacent.push_back(f);
    }
    if (not_const_adjacent.size() != 1) {
      rc.kind = RidgeKind::Ambiguous;
      rc.note = "three-facet ridge without a unique non-constant-adjacent facet";
      return rc;
    }
    rc.earlier = {not_const_adjacent[0]};
    for (auto f : star)
      if (f != not_const_adjacent[0]) rc.later.push_back(f);
  }
  return rc;
}

CandidatePartition candidate_bent_hyperplanes(const CanonicalComplex& c, const BreakpointComplex& b) {
  CandidatePartition part;
  UnionFind uf(c.facets.size());
  for (auto ridge : b.ridges) {
    RidgeClass rc = classify_ridge(c, b, ridge);
    if (rc.kind == RidgeKind::NonBending) {
      for (const auto& pr : rc.continuations) uf.merge(pr[0], pr[1]);
    } else if (rc.kind == RidgeKind::Bending) {
      for (std::size_t k = 1; k < rc.earlier.size(); ++k) uf.merge(rc.earlier[0], rc.earlier[k]);
      for (std::size_t k = 1; k < rc.later.size(); ++k) uf.merge(rc.later[0], rc.later[k]);
    } else if (rc.kind == RidgeKind::Ambiguous) {
      part.had_ambiguous = true;
    }
    part.ridge_classes.push_back(std::move(rc));
  }

  part.facet_class.assign(c.facets.size(), SIZE_MAX);
  std::map<std::size_t, std::size_t> root_to_class;
  for (auto f : b.facets) {
    std::size_t root = uf.find(f);
    auto it = root_to_class.find(root);
    std::size_t cls;
    if (it == root_to_class.end()) {
      cls = part.classes.size();
      root_to_class.emplace(root, cls);
      part.classes.push_back({});
    } else {
      cls = it->second;
    }
    part.facet_class[f] = cls;
    part.classes[cls].push_back(f);
  }
  return part;
}

std::optional<NeuronRef> CandidatePartition::attribution(const CanonicalComplex& c,
                                                         std::size_t cls) const {
  std::optional<NeuronRef> common;
  for (auto f : classes.at(cls)) {
    if (c.facets[f].incident.size() != 1) return std::nullopt;
    if (!common)
      common = c.facets[f].incident[0];
    else if (!(*common == c.facets[f].incident[0]))
      return std::nullopt;
  }
  return common;
}

bool DependencyGraph::has_edge(std::size_t u, std::size_t v) const {
  for (const auto& e : edges)
    if (e.from == u && e.to == v) return true;
  return false;
}

DependencyGraph dependency_graph(const CanonicalComplex& c, const BreakpointComplex& b,
                                 const CandidatePartition& part) {
  (void)c;
  (void)b;
  DependencyGraph g;
  g.vertex_count = part.classes.size();
  g.had_ambiguous = part.had_ambiguous;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> edges;
  for (const auto& rc : part.ridge_classes) {
    if (rc.kind != RidgeKind::Bending) continue;
    std::size_t u = part.facet_class[rc.earlier[0]];
    std::size_t v = part.facet_class[rc.later[0]];
    if (u == SIZE_MAX || v == SIZE_MAX) continue;
    if (u == v) {
      g.had_ambiguous = true;  // would be a self-loop; non-generic
      continue;
    }
    edges[{u, v}].push_back(rc.ridge);
  }
  for (auto& [key, ridges] : edges) g.edges.push_back({key.first, key.second, std::move(ridges)});
  return g;
}

bool layered_subgraph_check(const DependencyGraph& g, const Architecture& arch) {
  const std::size_t L = arch.depth();
  std::vector<std::size_t> widths;
  for (std::size_t l = 1; l <= L; ++l) widths.push_back(arch.width(l));

  std::vector<bool> used(g.vertex_count, false);
  // choose disjoint vertex sets layer by layer; adjacent layers fully connected
  std::function<bool(std::size_t, std::vector<std::size_t>&)> place =
      [&](std::size_t layer, std::vector<std::size_t>& prev) -> bool {
    if (layer == L) return true;
    std::vector<std::size_t> chosen;
    std::function<bool(std::size_t)> pick = [&](std::size_t start) -> bool {
      if (chosen.size() == widths[layer]) {
        return place(layer + 1, chosen);
      }
      for (std::size_t v = start; v < g.vertex_count; ++v) {
        if (used[v]) continue;
        bool ok = true;
        for (auto u : prev)
          if (!g.has_edge(u, v)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        used[v] = true;
        chosen.push_back(v);
        if (pick(v + 1)) return true;
        chosen.pop_back();
        used[v] = false;
      }
      return false;
    };
    return pick(0);
  };
  std::vector<std::size_t> empty;
  return place(0, empty);
}

namespace {

bool graph_has_cycle(const DependencyGraph& g, std::vector<std::size_t>* cycle_out) {
  std::vector<std::vector<std::size_t>> adj(g.vertex_count);
  for (const auto& e : g.edges) adj[e.from].push_back(e.to);
  std::vector<int> state(g.vertex_count, 0);
  std::vector<std::size_t> stack;
  bool found = false;
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    state[v] = 1;
    stack.push_back(v);
    for (auto w : adj[v]) {
      if (found) return;
      if (state[w] == 1) {
        found = true;
        if (cycle_out) {
          auto it = std::find(stack.begin(), stack.end(), w);
          cycle_out->assign(it, stack.end());
        }
        return;
      }
      if (state[w] == 0) dfs(w);
    }
    stack.pop_back();
    state[v] = 2;
  };
  for (std::size_t v = 0; v < g.vertex_count && !found; ++v)
    if (state[v] == 0) dfs(v);
  return found;
}

}  // namespace

std::vector<std::size_t> longest_chain(const DependencyGraph& g) {
  if (graph_has_cycle(g, nullptr))
    throw PreconditionViolation("dependency graph has a cycle; chains are unbounded");
  std::vector<std::vector<std::size_t>> adj(g.vertex_count);
  for (const auto& e : g.edges) adj[e.from].push_back(e.to);
  std::vector<int> state(g.vertex_count, 0);
  std::vector<std::size_t> best_next(g.vertex_count, SIZE_MAX);
  std::vector<std::size_t> depth(g.vertex_count, 1);
  std::function<void(std::size_t)> dfs = [&](std::size_t v) {
    state[v] = 1;
    for (auto w : adj[v]) {
      if (state[w] == 0) dfs(w);
      if (depth[w] + 1 > depth[v]) {
        depth[v] = depth[w] + 1;
        best_next[v] = w;
      }
    }
    state[v] = 2;
  };
  for (std::size_t v = 0; v < g.vertex_count; ++v)
    if (state[v] == 0) dfs(v);
  std::vector<std::size_t> chain;
  if (g.vertex_count == 0) return chain;
  std::size_t start = 0;
  for (std::size_t v = 0; v < g.vertex_count; ++v)
    if (depth[v] > depth[start]) start = v;
  for (std::size_t v = start; v != SIZE_MAX; v = best_next[v]) chain.push_back(v);
  return chain;
}

DepthCertificate depth_certificate(const DependencyGraph& g, std::size_t max_layers) {
  DepthCertificate cert;
  std::vector<std::size_t> cycle;
  if (graph_has_cycle(g, &cycle)) {
    // a cycle has no order-preserving embedding into finitely many layers
    cert.accepted = false;
    cert.chain = cycle;
    return cert;
  }
  auto chain = longest_chain(g);
  if (chain.size() > max_layers) {
    cert.accepted = false;
    cert.chain = chain;
  }
  return cert;
}

std::string depgraph_to_dot(const CanonicalComplex& c, const CandidatePartition& part,
                            const DependencyGraph& g) {
  std::ostringstream os;
  os << "digraph dependency {\n";
  os << "  rankdir=LR;\n";
  for (std::size_t v = 0; v < g.vertex_count; ++v) {
    os << "  c" << v << " [label=\"candidate " << v;
    if (auto attr = part.attribution(c, v))
      os << "\\nneuron (" << attr->layer << "," << attr->neuron << ")";
    os << "\\nfacets: " << part.classes[v].size() << "\"];\n";
  }
  for (const auto& e : g.edges) {
    os << "  c" << e.from << " -> c" << e.to << " [label=\"ridge";
    for (auto r : e.witness_ridges) os << " " << r;
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace relupoly
