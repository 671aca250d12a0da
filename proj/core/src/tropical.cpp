#include "relupoly/tropical.hpp"

#include <json.hpp>

namespace relupoly {

RatVec weight_from_pieces(const RatMat& a_p, const RatMat& a_q, const RatVec& e) {
  return (a_p - a_q) * e;
}

FacetWeight facet_weight(const CanonicalComplex& c, std::size_t facet) {
  if (facet >= c.facets.size()) throw PreconditionViolation("facet id out of range");
  const Face& f = c.facets[facet];
  const auto& pair = c.facet_regions[facet];
  const Region& r0 = c.regions[pair[0]];
  const Region& r1 = c.regions[pair[1]];
  int side0 = sgn(f.hull.expr().eval(r0.witness));
  if (side0 == 0) throw InternalError("region witness lies on the facet hull");
  const Region& pos = side0 > 0 ? r0 : r1;
  const Region& neg = side0 > 0 ? r1 : r0;
  FacetWeight fw;
  fw.normal = f.hull.normal;
  fw.norm2 = norm2_squared(f.hull.normal);
  fw.w = weight_from_pieces(pos.map.A, neg.map.A, f.hull.normal);
  return fw;
}

ClosedFormWeight facet_weight_closed_form(const CanonicalComplex& c, std::size_t facet) {
  if (facet >= c.facets.size()) throw PreconditionViolation("facet id out of range");
  const Face& f = c.facets[facet];
  if (f.incident.size() != 1)
    throw PreconditionViolation("closed-form weight needs a unique incident bent hyperplane");
  const NeuronRef n = f.incident[0];
  const Parameter& p = c.param;
  const std::size_t L = p.arch.depth();

  // strictly active sets on the relative interior of the facet
  ActiveSets s = active_sets_from_signs(f.signs);

  ClosedFormWeight cf;
  cf.scale2 = norm2_squared(preactivation_affine(p, s, n.layer, n.neuron).a);

  RatVec v(p.arch.width(n.layer), Rat(0));
  v[n.neuron] = 1;
  for (std::size_t k = n.layer + 1; k <= L; ++k) {
    v = p.layer(k).W * v;
    std::vector<bool> active(p.arch.width(k), false);
    for (auto j : s[k - 1]) active[j] = true;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!active[j]) v[j] = 0;
  }
  cf.direction = p.layer(L + 1).W * v;
  return cf;
}

bool weights_agree(const FacetWeight& fw, const ClosedFormWeight& cf) {
  // w / |n| == dir * sqrt(scale2), i.e. w == dir * sqrt(scale2 * norm2):
  // per coordinate, matching signs and w^2 == dir^2 * scale2 * norm2.
  if (fw.w.size() != cf.direction.size()) return false;
  for (std::size_t r = 0; r < fw.w.size(); ++r) {
    if (fw.w[r] * fw.w[r] != cf.direction[r] * cf.direction[r] * cf.scale2 * fw.norm2) return false;
    if (sgn(cf.scale2) > 0) {
      if (sgn(fw.w[r]) != sgn(cf.direction[r])) return false;
    } else if (sgn(fw.w[r]) != 0) {
      return false;
    }
  }
  return true;
}

ClosedFormWeight one_layer_weight(const Parameter& p, const Hyperplane& h) {
  if (p.arch.depth() != 1) throw PreconditionViolation("one_layer_weight requires L = 1");
  const std::size_t n1 = p.arch.width(1);
  ClosedFormWeight out;
  out.scale2 = norm2_squared(h.normal);
  out.direction.assign(p.arch.output_dim(), Rat(0));
  bool found = false;
  for (std::size_t i = 0; i < n1; ++i) {
    RatVec row = p.layer(1).W.row(i);
    if (is_zero_vec(row)) continue;
    Hyperplane hi = Hyperplane::canonical(row, p.layer(1).b[i]);
    if (!(hi == h)) continue;
    found = true;
    // row = lambda * h.normal; contribution |lambda| * column
    std::size_t t = 0;
    while (sgn(h.normal[t]) == 0) ++t;
    Rat lambda = row[t] / h.normal[t];
    if (sgn(lambda) < 0) lambda = -lambda;
    RatVec col = p.layer(2).W.col(i);
    for (std::size_t r = 0; r < out.direction.size(); ++r) out.direction[r] += lambda * col[r];
  }
  if (!found) throw PreconditionViolation("hyperplane is not among the layer's zero sets");
  return out;
}

BreakpointComplex breakpoint_complex(const CanonicalComplex& c) {
  BreakpointComplex b;
  b.weights.reserve(c.facets.size());
  b.visible.assign(c.facets.size(), false);
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    b.weights.push_back(facet_weight(c, i));
    b.visible[i] = !b.weights.back().is_zero();
    if (b.visible[i]) b.facets.push_back(i);
  }
  for (std::size_t t = 0; t < c.ridges.size(); ++t)
    for (auto fi : c.ridge_facets[t])
      if (b.visible[fi]) {
        b.ridges.push_back(t);
        break;
      }
  return b;
}

std::vector<std::size_t> BreakpointComplex::star(const CanonicalComplex& c, std::size_t ridge) const {
  std::vector<std::size_t> out;
  for (auto fi : c.ridge_facets[ridge])
    if (visible[fi]) out.push_back(fi);
  return out;
}

LraResult lra_check(const CanonicalComplex& c, const BreakpointComplex& b, const Polyhedron& x) {
  LraResult res;
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    if (b.visible[i]) continue;
    if (meets_relative_interior(c.facets[i].poly, x)) {
      res.ok = false;
      res.offending.push_back(i);
    }
  }
  return res;
}

TransparencyResult transparency_check(const CanonicalComplex& c, std::size_t l, const Polyhedron& x) {
  if (l < 1 || l > c.param.arch.depth()) throw PreconditionViolation("not a hidden layer");
  TransparencyResult res;
  const auto& stage = c.stage_regions.at(l - 1);
  const std::size_t d = c.param.arch.input_dim();
  const std::size_t n = c.param.arch.width(l);
  for (std::size_t ri = 0; ri < stage.size(); ++ri) {
    const Region& r = stage[ri];
    // max t s.t. x in region cap X and z_j(x) <= -t for all j, t <= 1
    Polyhedron lifted;
    lifted.dim = d + 1;
    auto lift = [&](const LinExpr& e, const Rat& tc) {
      RatVec a = e.a;
      a.push_back(tc);
      return LinExpr{a, e.b};
    };
    for (const auto& e : r.poly.ineqs) lifted.ineqs.push_back(lift(e, Rat(0)));
    for (const auto& e : r.poly.eqs) lifted.eqs.push_back(lift(e, Rat(0)));
    for (const auto& e : x.ineqs) lifted.ineqs.push_back(lift(e, Rat(0)));
    for (const auto& e : x.eqs) lifted.eqs.push_back(lift(e, Rat(0)));
    for (std::size_t j = 0; j < n; ++j) {
      auto e = preactivation_affine(c.param, r.active, l, j);
      RatVec a(d + 1);
      for (std::size_t k = 0; k < d; ++k) a[k] = -e.a[k];
      a[d] = -1;
      lifted.ineqs.push_back({a, -e.b});  // -z_j - t >= 0
    }
    RatVec cap(d + 1, Rat(0));
    cap[d] = -1;
    lifted.ineqs.push_back({cap, Rat(1)});
    RatVec obj(d + 1, Rat(0));
    obj[d] = 1;
    auto lp = lp_maximize(lifted, obj);
    if (lp.status == LpStatus::Optimal && sgn(lp.value) > 0) {
      res.transparent = false;
      res.witness.assign(lp.x.begin(), lp.x.begin() + d);
      res.region = ri;
      return res;
    }
  }
  return res;
}

std::string weight_table_json(const CanonicalComplex& c, const BreakpointComplex& b) {
  nlohmann::json j;
  nlohmann::json facets = nlohmann::json::array();
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    nlohmann::json jf;
    jf["facet"] = i;
    nlohmann::json w = nlohmann::json::array();
    for (const auto& v : b.weights[i].w) w.push_back(rat_to_string(v));
    jf["w"] = w;
    nlohmann::json n = nlohmann::json::array();
    for (const auto& v : b.weights[i].normal) n.push_back(rat_to_string(v));
    jf["n"] = n;
    jf["norm2"] = rat_to_string(b.weights[i].norm2);
    jf["visible"] = static_cast<bool>(b.visible[i]);
    facets.push_back(jf);
  }
  j["facets"] = facets;
  return j.dump(2);
}

}  // namespace relupoly
