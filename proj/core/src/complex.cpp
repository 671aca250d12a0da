#include "relupoly/complex.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <json.hpp>

#include "relupoly/parallel.hpp"

namespace relupoly {

namespace {

// Several neurons may induce the same geometric hyperplane on a region; the
// cell BFS runs over distinct hyperplanes so that single flips stay connected.
struct StageNeuron {
  bool constant = false;
  int const_sign = 0;   // sign of the constant value when constant
  std::size_t hyp = 0;  // index into the dedup list otherwise
  int orient = 0;       // +1 iff preactivation is a positive multiple of the hyperplane form
};

int orientation_against_canonical(const RatVec& grad, const Hyperplane& h) {
  std::size_t t = 0;
  while (sgn(grad[t]) == 0) ++t;
  return sgn(h.normal[t]) * sgn(grad[t]);
}

struct Extent {
  RatVec lo, hi;
};

Extent compute_extent(const Polyhedron& p, std::size_t d, std::size_t* lp_calls) {
  Extent e;
  e.lo.assign(d, Rat(0));
  e.hi.assign(d, Rat(0));
  for (std::size_t i = 0; i < d; ++i) {
    RatVec c(d, Rat(0));
    c[i] = 1;
    auto up = lp_maximize(p, c);
    c[i] = -1;
    auto dn = lp_maximize(p, c);
    if (lp_calls) *lp_calls += 2;
    if (up.status != LpStatus::Optimal || dn.status != LpStatus::Optimal)
      throw InternalError("unbounded face inside the working box");
    e.hi[i] = up.value;
    e.lo[i] = -dn.value;
  }
  return e;
}

bool extents_touch(const Extent& a, const Extent& b) {
  for (std::size_t i = 0; i < a.lo.size(); ++i)
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  return true;
}

bool expr_proportional_to_hull(const LinExpr& e, const Hyperplane& h) {
  RatVec ea = e.a;
  ea.push_back(e.b);
  RatVec ha = h.normal;
  ha.push_back(h.offset);
  return proportional(ea, ha);
}

struct FacetCandidate {
  Polyhedron poly;
  Hyperplane hull;
  RatVec witness;
  bool ok = false;
};

// Facet polyhedron between two regions: the shared hull as an equality, with
// every constraint proportional to it dropped, so one strict LP decides
// whether the intersection has dimension d-1.
FacetCandidate facet_between(const Parameter& param, const Region& p, const Region& q,
                             std::size_t* lp_calls) {
  FacetCandidate out;
  const std::size_t L = param.arch.depth();
  std::optional<Hyperplane> hull;
  for (std::size_t l = 1; l <= L && !hull; ++l)
    for (std::size_t j = 0; j < param.arch.width(l) && !hull; ++j) {
      int sp = p.signs[l - 1][j], sq = q.signs[l - 1][j];
      if (sp * sq != -1) continue;
      auto ep = preactivation_affine(param, p.active, l, j);
      if (!is_zero_vec(ep.a)) {
        hull = Hyperplane::canonical(ep.a, ep.b);
        break;
      }
      auto eq2 = preactivation_affine(param, q.active, l, j);
      if (!is_zero_vec(eq2.a)) hull = Hyperplane::canonical(eq2.a, eq2.b);
    }
  if (!hull) return out;

  Polyhedron f;
  f.dim = p.poly.dim;
  f.eqs.push_back(hull->expr());
  for (const auto& e : p.poly.eqs) f.eqs.push_back(e);
  for (const auto& e : q.poly.eqs) f.eqs.push_back(e);
  for (const auto& e : p.poly.ineqs)
    if (!expr_proportional_to_hull(e, *hull)) f.ineqs.push_back(e);
  for (const auto& e : q.poly.ineqs)
    if (!expr_proportional_to_hull(e, *hull)) f.ineqs.push_back(e);

  if (lp_calls) ++*lp_calls;
  auto w = strictly_feasible_point(f);
  if (!w) return out;
  out.poly = std::move(f);
  out.hull = *hull;
  out.witness = *w;
  out.ok = true;
  return out;
}

std::vector<NeuronRef> incident_neurons(const Parameter& param, const SignPattern& signs,
                                        const std::vector<const Region*>& star) {
  std::vector<NeuronRef> out;
  const std::size_t L = param.arch.depth();
  for (std::size_t l = 1; l <= L; ++l)
    for (std::size_t j = 0; j < param.arch.width(l); ++j) {
      if (signs[l - 1][j] != 0) continue;
      for (const Region* r : star) {
        auto e = preactivation_affine(param, r->active, l, j);
        if (!is_zero_vec(e.a)) {
          out.push_back({l, j});
          break;
        }
      }
    }
  return out;
}

bool touches_box_boundary(const Polyhedron& face, const WorkingBox& box, std::size_t* lp_calls) {
  for (std::size_t i = 0; i < box.dim; ++i) {
    for (int s : {-1, +1}) {
      RatVec a(box.dim, Rat(0));
      a[i] = s;
      Polyhedron cut = face.with_equality({a, -box.radius});  // s*x_i = R
      if (lp_calls) ++*lp_calls;
      if (lp_feasible(cut)) return true;
    }
  }
  return false;
}

}  // namespace

CanonicalComplex build_complex(const Parameter& p, const WorkingBox& box,
                               const Polyhedron* within) {
  p.validate();
  if (box.dim != p.arch.input_dim()) throw InvalidInput("box dimension mismatch");
  if (sgn(box.radius) <= 0) throw InvalidInput("box radius must be positive");

  CanonicalComplex c;
  c.param = p;
  c.box = box;
  c.domain = box.polyhedron();
  if (within) c.domain = c.domain.intersect(*within);

  const std::size_t d = p.arch.input_dim();
  const std::size_t L = p.arch.depth();

  Region root;
  root.poly = c.domain;
  root.map = {RatMat::identity(d), RatVec(d, Rat(0))};
  root.hidden_map = root.map;
  {
    auto w = strictly_feasible_point(root.poly);
    ++c.lp_calls;
    if (!w) throw InvalidInput("working domain is empty or lower-dimensional");
    root.witness = *w;
  }
  c.stage_regions.push_back({root});

  for (std::size_t l = 1; l <= L; ++l) {
    std::vector<Region> next;
    for (const Region& parent : c.stage_regions[l - 1]) {
      const std::size_t n = p.arch.width(l);
      std::vector<StageNeuron> info(n);
      std::vector<Hyperplane> hyps;
      bool parent_degenerate = parent.degenerate;
      for (std::size_t j = 0; j < n; ++j) {
        auto e = preactivation_affine(p, parent.active, l, j);
        if (is_zero_vec(e.a)) {
          info[j].constant = true;
          info[j].const_sign = sgn(e.b);
          if (info[j].const_sign == 0) parent_degenerate = true;
          continue;
        }
        Hyperplane h = Hyperplane::canonical(e.a, e.b);
        std::size_t idx = hyps.size();
        for (std::size_t k = 0; k < hyps.size(); ++k)
          if (hyps[k] == h) {
            idx = k;
            break;
          }
        if (idx == hyps.size()) hyps.push_back(h);
        info[j].hyp = idx;
        info[j].orient = orientation_against_canonical(e.a, h);
      }

      const std::size_t m = hyps.size();
      std::vector<std::vector<int>> cells;
      std::vector<RatVec> cell_witness;
      std::set<std::vector<int>> seen;
      std::deque<std::vector<int>> queue;

      auto oriented = [&](std::size_t k, int s) {
        LinExpr e = hyps[k].expr();
        if (s < 0) {
          for (auto& qq : e.a) qq = -qq;
          e.b = -e.b;
        }
        return e;
      };

      auto try_cell = [&](const std::vector<int>& sv) {
        if (seen.count(sv)) return;
        seen.insert(sv);
        Polyhedron cell = parent.poly;
        for (std::size_t k = 0; k < m; ++k) cell.ineqs.push_back(oriented(k, sv[k]));
        ++c.lp_calls;
        auto w = strictly_feasible_point(cell);
        if (!w) return;
        cells.push_back(sv);
        cell_witness.push_back(*w);
        queue.push_back(sv);
      };

      if (m == 0) {
        cells.push_back({});
        cell_witness.push_back(parent.witness);
      } else {
        std::vector<int> seed(m);
        std::vector<std::size_t> zeros;
        for (std::size_t k = 0; k < m; ++k) {
          seed[k] = sgn(hyps[k].expr().eval(parent.witness));
          if (seed[k] == 0) zeros.push_back(k);
        }
        std::vector<int> combo(zeros.size(), -1);
        for (;;) {
          std::vector<int> sv = seed;
          for (std::size_t z = 0; z < zeros.size(); ++z) sv[zeros[z]] = combo[z];
          try_cell(sv);
          std::size_t z = 0;
          while (z < combo.size() && combo[z] == 1) combo[z++] = -1;
          if (z == combo.size()) break;
          combo[z] = 1;
        }
        while (!queue.empty()) {
          auto sv = queue.front();
          queue.pop_front();
          for (std::size_t k = 0; k < m; ++k) {
            auto flip = sv;
            flip[k] = -flip[k];
            try_cell(flip);
          }
        }
      }

      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        Region r;
        r.signs = parent.signs;
        r.active = parent.active;
        LayerSigns ls(n, 0);
        for (std::size_t j = 0; j < n; ++j)
          ls[j] = info[j].constant ? info[j].const_sign : info[j].orient * cells[ci][info[j].hyp];
        r.signs.push_back(ls);
        std::vector<std::size_t> act;
        for (std::size_t j = 0; j < n; ++j)
          if (ls[j] > 0) act.push_back(j);
        r.active.push_back(act);
        r.poly = parent.poly;
        for (std::size_t k = 0; k < m; ++k) r.poly.ineqs.push_back(oriented(k, cells[ci][k]));
        r.witness = cell_witness[ci];
        r.degenerate = parent_degenerate;
        r.hidden_map = hidden_activation_map(p, r.active, l);
        next.push_back(std::move(r));
      }
    }
    c.stage_regions.push_back(std::move(next));
  }

  c.regions = c.stage_regions.back();
  for (auto& r : c.regions) {
    r.map = affine_map_for_pattern(p, r.active);
    c.has_degenerate = c.has_degenerate || r.degenerate;
  }

  std::vector<Extent> ext;
  ext.reserve(c.regions.size());
  for (const auto& r : c.regions) ext.push_back(compute_extent(r.poly, d, &c.lp_calls));

  // the pair scan is the hot loop; it fans out over workers with per-slot
  // results so the outcome is order-independent
  std::vector<std::array<std::size_t, 2>> pairs;
  for (std::size_t i = 0; i < c.regions.size(); ++i)
    for (std::size_t j = i + 1; j < c.regions.size(); ++j)
      if (extents_touch(ext[i], ext[j])) pairs.push_back({i, j});
  std::vector<FacetCandidate> found(pairs.size());
  std::vector<std::size_t> pair_calls(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t t) {
    found[t] = facet_between(p, c.regions[pairs[t][0]], c.regions[pairs[t][1]], &pair_calls[t]);
  });
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    c.lp_calls += pair_calls[t];
    if (!found[t].ok) continue;
    Face f;
    f.poly = std::move(found[t].poly);
    f.hull = found[t].hull;
    f.witness = std::move(found[t].witness);
    f.dim = static_cast<int>(d) - 1;
    f.signs = activation_pattern(p, f.witness);
    f.incident =
        incident_neurons(p, f.signs, {&c.regions[pairs[t][0]], &c.regions[pairs[t][1]]});
    f.box_clipped = touches_box_boundary(f.poly, box, &c.lp_calls);
    c.boundary_warning = c.boundary_warning || f.box_clipped;
    c.facets.push_back(std::move(f));
    c.facet_regions.push_back({pairs[t][0], pairs[t][1]});
  }

  if (d >= 2) {
    std::vector<Extent> fext;
    fext.reserve(c.facets.size());
    for (const auto& f : c.facets) fext.push_back(compute_extent(f.poly, d, &c.lp_calls));
    for (std::size_t i = 0; i < c.facets.size(); ++i)
      for (std::size_t j = i + 1; j < c.facets.size(); ++j) {
        if (!extents_touch(fext[i], fext[j])) continue;
        Polyhedron inter = c.facets[i].poly.intersect(c.facets[j].poly);
        RatVec w;
        if (d == 2) {
          if (!(c.facets[i].hull == c.facets[j].hull)) {
            RatMat A(2, 2);
            A.set_row(0, c.facets[i].hull.normal);
            A.set_row(1, c.facets[j].hull.normal);
            RatVec b{-c.facets[i].hull.offset, -c.facets[j].hull.offset};
            if (exact_rank(A) < 2) continue;  // parallel hulls
            auto x = solve_linear(A, b);
            if (!x || !c.facets[i].poly.contains(*x) || !c.facets[j].poly.contains(*x)) continue;
            w = *x;
          } else {
            // collinear pieces meet in at most a point
            ++c.lp_calls;
            auto x = lp_feasible(inter);
            if (!x) continue;
            w = *x;
          }
        } else {
          ++c.lp_calls;
          if (!lp_feasible(inter)) continue;
          if (polyhedron_dim(inter) != static_cast<int>(d) - 2) continue;
          auto rw = relint_point(inter);
          if (!rw) continue;
          w = *rw;
        }
        bool dup = false;
        for (const auto& r : c.ridges)
          if (r.poly.contains(w) && inter.contains(r.witness)) {
            dup = true;
            break;
          }
        if (dup) continue;
        Face ridge;
        ridge.poly = std::move(inter);
        ridge.witness = w;
        ridge.dim = static_cast<int>(d) - 2;
        ridge.signs = activation_pattern(p, w);
        if (d == 2) {
          bool on_wall = false;
          for (std::size_t t = 0; t < d && !on_wall; ++t)
            if (w[t] == box.radius || w[t] == -box.radius) on_wall = true;
          ridge.box_clipped = on_wall;
        } else {
          ridge.box_clipped = touches_box_boundary(ridge.poly, box, &c.lp_calls);
        }
        c.ridges.push_back(std::move(ridge));
      }

    c.ridge_facets.assign(c.ridges.size(), {});
    c.ridge_regions.assign(c.ridges.size(), {});
    for (std::size_t t = 0; t < c.ridges.size(); ++t) {
      for (std::size_t fi = 0; fi < c.facets.size(); ++fi)
        if (c.facets[fi].poly.contains(c.ridges[t].witness)) c.ridge_facets[t].push_back(fi);
      for (std::size_t ri = 0; ri < c.regions.size(); ++ri)
        if (c.regions[ri].poly.contains(c.ridges[t].witness)) c.ridge_regions[t].push_back(ri);
      std::vector<const Region*> star;
      for (auto ri : c.ridge_regions[t]) star.push_back(&c.regions[ri]);
      c.ridges[t].incident = incident_neurons(p, c.ridges[t].signs, star);
    }
  }

  return c;
}

std::vector<std::size_t> bent_hyperplane_facets(const CanonicalComplex& c, const NeuronRef& n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.facets.size(); ++i)
    for (const auto& inc : c.facets[i].incident)
      if (inc == n) {
        out.push_back(i);
        break;
      }
  return out;
}

CanonicalComplex local_complex(const CanonicalComplex& c, const Polyhedron& p) {
  CanonicalComplex out;
  out.param = c.param;
  out.box = c.box;
  out.domain = c.domain.intersect(p);
  out.boundary_warning = c.boundary_warning;
  out.has_degenerate = c.has_degenerate;
  out.stage_regions = c.stage_regions;

  std::vector<std::size_t> region_map(c.regions.size(), SIZE_MAX);
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    Polyhedron cut = c.regions[i].poly.intersect(p);
    auto w = strictly_feasible_point(cut);
    if (!w) continue;
    Region r = c.regions[i];
    r.poly = std::move(cut);
    r.witness = *w;
    region_map[i] = out.regions.size();
    out.regions.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    Polyhedron cut = c.facets[i].poly.intersect(p);
    auto w = strictly_feasible_point(cut);
    if (!w) continue;
    auto pair = c.facet_regions[i];
    if (region_map[pair[0]] == SIZE_MAX || region_map[pair[1]] == SIZE_MAX) continue;
    Face f = c.facets[i];
    f.poly = std::move(cut);
    f.witness = *w;
    out.facets.push_back(std::move(f));
    out.facet_regions.push_back({region_map[pair[0]], region_map[pair[1]]});
  }
  for (std::size_t i = 0; i < c.ridges.size(); ++i) {
    Polyhedron cut = c.ridges[i].poly.intersect(p);
    if (polyhedron_dim(cut) != c.ridges[i].dim) continue;
    auto w = relint_point(cut);
    if (!w) continue;
    Face r = c.ridges[i];
    r.poly = std::move(cut);
    r.witness = *w;
    out.ridges.push_back(std::move(r));
  }
  out.ridge_facets.assign(out.ridges.size(), {});
  out.ridge_regions.assign(out.ridges.size(), {});
  for (std::size_t t = 0; t < out.ridges.size(); ++t) {
    for (std::size_t fi = 0; fi < out.facets.size(); ++fi)
      if (out.facets[fi].poly.contains(out.ridges[t].witness)) out.ridge_facets[t].push_back(fi);
    for (std::size_t ri = 0; ri < out.regions.size(); ++ri)
      if (out.regions[ri].poly.contains(out.ridges[t].witness)) out.ridge_regions[t].push_back(ri);
  }
  return out;
}

namespace {

nlohmann::json signs_json(const SignPattern& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& layer : s) {
    std::string t;
    for (int v : layer) t += v > 0 ? '+' : (v < 0 ? '-' : '0');
    out.push_back(t);
  }
  return out;
}

nlohmann::json poly_json(const Polyhedron& p) {
  auto expr = [](const LinExpr& e) {
    nlohmann::json j;
    nlohmann::json a = nlohmann::json::array();
    for (const auto& q : e.a) a.push_back(rat_to_string(q));
    j["a"] = a;
    j["b"] = rat_to_string(e.b);
    return j;
  };
  nlohmann::json j;
  j["ineqs"] = nlohmann::json::array();
  j["eqs"] = nlohmann::json::array();
  for (const auto& e : p.ineqs) j["ineqs"].push_back(expr(e));
  for (const auto& e : p.eqs) j["eqs"].push_back(expr(e));
  return j;
}

}  // namespace

std::string complex_to_json(const CanonicalComplex& c) {
  nlohmann::json j;
  j["dimension"] = c.box.dim;
  j["box_radius"] = rat_to_string(c.box.radius);
  j["lp_calls"] = c.lp_calls;
  j["warnings"] = nlohmann::json::array();
  if (c.boundary_warning)
    j["warnings"].push_back("complex truncated at the working box: facets touch the boundary");
  if (c.has_degenerate)
    j["warnings"].push_back("degenerate regions: some preactivation vanishes identically");

  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : c.regions) {
    nlohmann::json jr;
    jr["signs"] = signs_json(r.signs);
    jr["h_description"] = poly_json(r.poly);
    jr["degenerate"] = r.degenerate;
    regions.push_back(jr);
  }
  j["regions"] = regions;

  nlohmann::json facets = nlohmann::json::array();
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    const auto& f = c.facets[i];
    nlohmann::json jf;
    jf["signs"] = signs_json(f.signs);
    jf["h_description"] = poly_json(f.poly);
    nlohmann::json n = nlohmann::json::array();
    for (const auto& q : f.hull.normal) n.push_back(rat_to_string(q));
    jf["hull"] = {{"normal", n}, {"offset", rat_to_string(f.hull.offset)}};
    jf["adjacent_regions"] = {c.facet_regions[i][0], c.facet_regions[i][1]};
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& nr : f.incident) inc.push_back({{"layer", nr.layer}, {"neuron", nr.neuron}});
    jf["incident_neurons"] = inc;
    jf["box_clipped"] = f.box_clipped;
    facets.push_back(jf);
  }
  j["facets"] = facets;

  nlohmann::json ridges = nlohmann::json::array();
  for (std::size_t i = 0; i < c.ridges.size(); ++i) {
    const auto& r = c.ridges[i];
    nlohmann::json jr;
    jr["signs"] = signs_json(r.signs);
    nlohmann::json w = nlohmann::json::array();
    for (const auto& q : r.witness) w.push_back(rat_to_string(q));
    jr["witness"] = w;
    jr["facets"] = c.ridge_facets[i];
    jr["regions"] = c.ridge_regions[i];
    jr["box_clipped"] = r.box_clipped;
    ridges.push_back(jr);
  }
  j["ridges"] = ridges;
  return j.dump(2);
}

}  // namespace relupoly
