#include "relupoly/checks.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <climits>
#include <functional>
#include <limits>
#include <sstream>

#include "relupoly/arrangement.hpp"

namespace relupoly {

namespace {

std::string neuron_name(const NeuronRef& n) {
  return "(" + std::to_string(n.layer) + "," + std::to_string(n.neuron) + ")";
}

// vertices of a region that do not sit on the working-box walls
std::vector<RatVec> interior_vertices(const Polyhedron& poly, const WorkingBox& box) {
  std::vector<RatVec> out;
  for (auto& v : enumerate_vertices(poly)) {
    bool on_wall = false;
    for (const auto& coord : v)
      if (coord == box.radius || coord == -box.radius) on_wall = true;
    if (!on_wall) out.push_back(v);
  }
  return out;
}

}  // namespace

Verdict genericity_check(const CanonicalComplex& c, std::uint64_t seed) {
  Verdict v;
  v.property = "genericity";
  const Parameter& p = c.param;
  const std::size_t L = p.arch.depth();

  // condition 1: per layer and per region of the previous stage, the induced
  // arrangement is generic after essentialization and misses the region's vertices
  for (std::size_t l = 1; l <= L; ++l) {
    for (std::size_t ri = 0; ri < c.stage_regions[l - 1].size(); ++ri) {
      const Region& r = c.stage_regions[l - 1][ri];
      Arrangement arr;
      arr.dim = p.arch.input_dim();
      std::vector<std::size_t> arr_neuron;
      for (std::size_t j = 0; j < p.arch.width(l); ++j) {
        auto e = preactivation_affine(p, r.active, l, j);
        if (is_zero_vec(e.a)) {
          if (sgn(e.b) == 0) {
            v.status = VerdictStatus::Fail;
            v.notes = "preactivation of neuron " + neuron_name({l, j}) +
                      " vanishes identically on a region";
            v.witnesses.push_back(neuron_name({l, j}));
            return v;
          }
          continue;
        }
        arr.hyperplanes.push_back(Hyperplane::canonical(e.a, e.b));
        arr_neuron.push_back(j);
      }
      if (arr.hyperplanes.empty()) continue;
      auto ess = essentialize(arr);
      GenericityFailure why;
      if (!arrangement_is_generic(ess.essential, &why)) {
        v.status = VerdictStatus::Fail;
        v.notes = "layer " + std::to_string(l) + " arrangement on a region: " + why.reason;
        for (auto idx : why.subset) v.witnesses.push_back(neuron_name({l, arr_neuron[idx]}));
        return v;
      }
      // no hyperplane through a vertex of the region (interior vertices only;
      // box-corner artifacts are not vertices of the unbounded region)
      for (const auto& vert : interior_vertices(r.poly, c.box)) {
        for (std::size_t hi = 0; hi < arr.hyperplanes.size(); ++hi) {
          if (sgn(arr.hyperplanes[hi].expr().eval(vert)) == 0) {
            v.status = VerdictStatus::Fail;
            v.notes = "layer " + std::to_string(l) + " hyperplane of neuron " +
                      neuron_name({l, arr_neuron[hi]}) + " passes through a region vertex";
            std::ostringstream os;
            os << "vertex (";
            for (std::size_t t = 0; t < vert.size(); ++t)
              os << (t ? "," : "") << rat_to_string(vert[t]);
            os << ")";
            v.witnesses.push_back(os.str());
            return v;
          }
        }
      }
    }
  }

  // condition 2: selector-product ranks
  Rng rng = Rng(seed).split(0x5eed);
  const auto& w = p.arch.widths;
  bool probabilistic = false;
  for (std::size_t k = 1; k <= L + 1; ++k) {
    for (std::size_t l = k; l <= L + 1; ++l) {
      double log2count = 0;
      for (std::size_t i = k; i < l; ++i) log2count += static_cast<double>(w[i]);
      bool exhaustive = log2count <= 16.0;
      std::size_t trials = exhaustive ? (std::size_t{1} << static_cast<std::size_t>(log2count)) : 1024;
      if (!exhaustive) probabilistic = true;
      for (std::size_t t = 0; t < trials; ++t) {
        // decode subset sequence S_k .. S_{l-1}
        std::vector<std::vector<bool>> sel;
        std::size_t bits = t;
        std::size_t min_size = SIZE_MAX;
        for (std::size_t i = k; i < l; ++i) {
          std::vector<bool> s(w[i]);
          std::size_t cnt = 0;
          for (std::size_t j = 0; j < w[i]; ++j) {
            bool bit = exhaustive ? (bits & 1) : (rng.next() & 1);
            if (exhaustive) bits >>= 1;
            s[j] = bit;
            cnt += bit;
          }
          min_size = std::min(min_size, cnt);
          sel.push_back(std::move(s));
        }
        RatMat m = p.layer(k).W;
        for (std::size_t i = k; i < l; ++i) {
          RatMat masked = m;
          for (std::size_t row = 0; row < masked.rows(); ++row)
            if (!sel[i - k][row])
              for (std::size_t col = 0; col < masked.cols(); ++col) masked(row, col) = 0;
          m = p.layer(i + 1).W * masked;
        }
        std::size_t expected = std::min({w[k - 1], w[l], min_size});
        if (exact_rank(m) != static_cast<int>(expected)) {
          v.status = VerdictStatus::Fail;
          std::ostringstream os;
          os << "rank condition fails for layers " << k << ".." << l << " with subsets";
          for (std::size_t i = 0; i < sel.size(); ++i) {
            os << " {";
            bool first = true;
            for (std::size_t j = 0; j < sel[i].size(); ++j)
              if (sel[i][j]) {
                os << (first ? "" : ",") << j;
                first = false;
              }
            os << "}";
          }
          v.notes = os.str();
          v.witnesses.push_back(os.str());
          return v;
        }
      }
    }
  }
  if (probabilistic) {
    v.status = VerdictStatus::ProbabilisticPass;
    v.notes = "rank condition sampled (1024 subset sequences per layer pair beyond 2^16)";
  }
  return v;
}

Verdict supertransversality_check(const CanonicalComplex& c) {
  Verdict v;
  v.property = "supertransversality";
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    if (c.facets[i].incident.size() != 1) {
      v.status = VerdictStatus::Fail;
      v.notes = "facet lies on " + std::to_string(c.facets[i].incident.size()) +
                " bent hyperplanes";
      v.witness_faces.push_back(i);
      return v;
    }
  }
  for (std::size_t t = 0; t < c.ridges.size(); ++t) {
    if (c.ridges[t].box_clipped) continue;
    if (c.ridges[t].incident.size() != 2) {
      v.status = VerdictStatus::Fail;
      v.notes = "ridge lies on " + std::to_string(c.ridges[t].incident.size()) +
                " bent hyperplanes";
      v.witness_faces.push_back(t);
      return v;
    }
  }
  return v;
}

Verdict cancellation_free_check(const CanonicalComplex& c, const BreakpointComplex& b) {
  Verdict v;
  v.property = "cancellation-freeness";
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    bool dead_layer = false;
    for (const auto& layer : c.facets[i].signs) {
      bool all_neg = true;
      for (int s : layer) all_neg = all_neg && s < 0;
      if (all_neg) {
        dead_layer = true;
        break;
      }
    }
    bool zero = !b.visible[i];
    if (zero != dead_layer) {
      v.status = VerdictStatus::Fail;
      v.notes = zero ? "zero facet weight without a fully inactive layer"
                     : "fully inactive layer with nonzero facet weight";
      v.witness_faces.push_back(i);
      return v;
    }
  }
  return v;
}

CtpicResult ctpic_check(const CanonicalComplex& c, const BreakpointComplex& b, const Polyhedron& p) {
  CtpicResult res;
  res.verdict.property = "cTPIC";
  const Parameter& param = c.param;
  const std::size_t L = param.arch.depth();
  if (L == 1) {
    res.verdict.notes = "single hidden layer: no adjacent pair, vacuously true";
    return res;
  }

  // visible facets of each neuron meeting relint(P), split into components by
  // shared ridges
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<std::size_t>>> comps;
  for (std::size_t l = 1; l <= L; ++l)
    for (std::size_t j = 0; j < param.arch.width(l); ++j) {
      std::vector<std::size_t> own;
      for (auto fi : bent_hyperplane_facets(c, {l, j}))
        if (b.visible[fi] && meets_relative_interior(c.facets[fi].poly, p)) own.push_back(fi);
      // union-find over own facets via shared ridges
      std::map<std::size_t, std::size_t> idx;
      for (std::size_t k = 0; k < own.size(); ++k) idx[own[k]] = k;
      std::vector<std::size_t> parent(own.size());
      for (std::size_t k = 0; k < own.size(); ++k) parent[k] = k;
      std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      for (std::size_t t = 0; t < c.ridges.size(); ++t) {
        std::vector<std::size_t> here;
        for (auto fi : c.ridge_facets[t])
          if (idx.count(fi)) here.push_back(idx[fi]);
        for (std::size_t k = 1; k < here.size(); ++k) parent[find(here[k])] = find(here[0]);
      }
      std::map<std::size_t, std::vector<std::size_t>> groups;
      for (std::size_t k = 0; k < own.size(); ++k) groups[find(k)].push_back(own[k]);
      std::vector<std::vector<std::size_t>> cs;
      for (auto& [root, members] : groups) cs.push_back(members);
      std::sort(cs.begin(), cs.end(),
                [](const auto& a2, const auto& b2) { return a2.size() > b2.size(); });
      if (cs.empty()) {
        res.verdict.status = VerdictStatus::Fail;
        res.verdict.notes = "neuron " + neuron_name({l, j}) +
                            " has no visible facets in the polytope";
        res.verdict.witnesses.push_back(neuron_name({l, j}));
        return res;
      }
      comps[{l, j}] = std::move(cs);
    }

  // a pair of chosen components is connected when they share a ridge meeting
  // relint(P)
  auto linked = [&](const std::vector<std::size_t>& ca, const std::vector<std::size_t>& cb) {
    for (std::size_t t = 0; t < c.ridges.size(); ++t) {
      bool ina = false, inb = false;
      for (auto fi : c.ridge_facets[t]) {
        if (std::find(ca.begin(), ca.end(), fi) != ca.end()) ina = true;
        if (std::find(cb.begin(), cb.end(), fi) != cb.end()) inb = true;
      }
      if (ina && inb && meets_relative_interior(c.ridges[t].poly, p)) return true;
    }
    return false;
  };

  // choose one component per neuron: greedy (largest) first, then exhaustive
  std::vector<NeuronRef> order;
  for (std::size_t l = 1; l <= L; ++l)
    for (std::size_t j = 0; j < param.arch.width(l); ++j) order.push_back({l, j});

  std::vector<std::size_t> choice(order.size(), 0);
  auto valid_pairs = [&](std::vector<std::string>* failures) {
    bool all_ok = true;
    for (std::size_t a = 0; a < order.size(); ++a)
      for (std::size_t b2 = 0; b2 < order.size(); ++b2) {
        if (order[a].layer + 1 != order[b2].layer) continue;
        const auto& ca = comps[{order[a].layer, order[a].neuron}][choice[a]];
        const auto& cb = comps[{order[b2].layer, order[b2].neuron}][choice[b2]];
        if (!linked(ca, cb)) {
          all_ok = false;
          if (failures)
            failures->push_back(neuron_name(order[a]) + " x " + neuron_name(order[b2]));
          else
            return false;
        }
      }
    return all_ok;
  };

  bool ok = valid_pairs(nullptr);
  if (!ok) {
    // exhaustive over component choices (tiny in practice, capped)
    std::size_t total = 1;
    for (const auto& n : order) {
      total *= comps[{n.layer, n.neuron}].size();
      if (total > 100000) break;
    }
    if (total <= 100000) {
      std::function<bool(std::size_t)> dfs = [&](std::size_t at) -> bool {
        if (at == order.size()) return valid_pairs(nullptr);
        auto& cs = comps[{order[at].layer, order[at].neuron}];
        for (std::size_t k = 0; k < cs.size(); ++k) {
          choice[at] = k;
          if (dfs(at + 1)) return true;
        }
        choice[at] = 0;
        return false;
      };
      ok = dfs(0);
    }
  }

  if (!ok) {
    // report failures for the greedy (largest-component) choice
    std::fill(choice.begin(), choice.end(), 0);
    std::vector<std::string> failures;
    valid_pairs(&failures);
    res.verdict.status = VerdictStatus::Fail;
    res.verdict.notes = "no component choice links every adjacent-layer pair";
    res.verdict.witnesses = failures;
    return res;
  }
  for (std::size_t a = 0; a < order.size(); ++a)
    res.chosen.push_back({order[a], comps[{order[a].layer, order[a].neuron}][choice[a]]});
  return res;
}

IdentifiabilityReport identifiability_verdict(const CanonicalComplex& c, const BreakpointComplex& b,
                                              std::uint64_t seed,
                                              const std::vector<Polyhedron>* extra) {
  IdentifiabilityReport rep;
  rep.genericity = genericity_check(c, seed);
  rep.supertransversality = supertransversality_check(c);
  rep.cancellation_free = cancellation_free_check(c, b);
  const std::size_t L = c.param.arch.depth();
  for (std::size_t l = 2; l <= L; ++l) {
    auto t = transparency_check(c, l, c.domain);
    Verdict tv;
    tv.property = "transparency(layer " + std::to_string(l) + ")";
    if (!t.transparent) {
      tv.status = VerdictStatus::Fail;
      tv.notes = "a point of the image has the whole layer strictly negative";
    }
    rep.transparency.push_back(tv);
  }

  // search for a full-dimensional polytope where cTPIC and LRA both hold
  std::vector<std::pair<std::string, Polyhedron>> candidates;
  candidates.push_back({"working box", c.box.polyhedron()});
  if (extra)
    for (std::size_t i = 0; i < extra->size(); ++i)
      candidates.push_back({"trail polytope " + std::to_string(i), (*extra)[i]});
  for (std::size_t i = 0; i < c.regions.size(); ++i)
    candidates.push_back({"region " + std::to_string(i), c.regions[i].poly});

  bool found = false;
  for (const auto& [name, poly] : candidates) {
    auto lra = lra_check(c, b, poly);
    if (!lra.ok) continue;
    auto ct = ctpic_check(c, b, poly);
    if (!ct.verdict.passed()) continue;
    found = true;
    rep.polytope = name;
    rep.lra.property = "LRA";
    rep.ctpic = ct.verdict;
    break;
  }
  if (!found) {
    rep.lra.property = "LRA";
    auto lra_box = lra_check(c, b, c.box.polyhedron());
    if (!lra_box.ok) {
      rep.lra.status = VerdictStatus::Fail;
      rep.lra.notes = "invisible facets meet the interior of every candidate polytope";
      rep.lra.witness_faces = lra_box.offending;
    }
    auto ct = ctpic_check(c, b, c.box.polyhedron());
    rep.ctpic = ct.verdict;
    if (rep.ctpic.passed() && lra_box.ok) {
      rep.ctpic.status = VerdictStatus::Fail;
      rep.ctpic.notes = "no candidate polytope satisfies cTPIC and LRA jointly";
    }
  }

  bool generic_ok = rep.genericity.passed();
  rep.identifiable_among_generic = generic_ok && found;
  if (!rep.identifiable_among_generic) {
    if (!rep.genericity.passed()) rep.failed_premises.push_back("genericity");
    if (!rep.supertransversality.passed()) rep.failed_premises.push_back("supertransversality");
    if (!rep.cancellation_free.passed()) rep.failed_premises.push_back("cancellation-freeness");
    for (const auto& t : rep.transparency)
      if (!t.passed()) rep.failed_premises.push_back(t.property);
    if (!found) {
      if (!rep.lra.passed()) rep.failed_premises.push_back("LRA");
      if (!rep.ctpic.passed()) rep.failed_premises.push_back("cTPIC");
      if (rep.lra.passed() && rep.ctpic.passed())
        rep.failed_premises.push_back("cTPIC+LRA polytope not found");
    }
  }
  return rep;
}

FunctionalDimension functional_dimension_estimate(const Parameter& p, const WorkingBox& box,
                                                  std::size_t samples, std::uint64_t seed) {
  p.validate();
  const std::size_t d = p.arch.input_dim();
  const std::size_t m = p.arch.output_dim();
  const std::size_t L = p.arch.depth();
  const std::size_t n_params = p.arch.parameter_count();
  FunctionalDimension out;
  out.samples = samples;

  // The rank is a maximum over input sets, so samples must reach every linear
  // region; thin slab-like regions are invisible to plain uniform draws.
  // Stratify: cycle through the region witnesses with small rational jitter.
  CanonicalComplex strata = build_complex(p, box);
  const std::size_t n_regions = strata.regions.size();

  Rng rng = Rng(seed).split(0xd1ce);
  Eigen::MatrixXd jac(samples * m, n_params);
  jac.setZero();

  for (std::size_t s = 0; s < samples; ++s) {
    RatVec x;
    EvalTrace trace;
    bool found = false;
    const RatVec& anchor = strata.regions[s % n_regions].witness;
    Rat jitter = box.radius / 4096;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      x = vec_add(anchor, rng.rational_vector(d, jitter));
      bool in_box = true;
      for (const auto& v : x)
        if (v > box.radius || v < -box.radius) in_box = false;
      if (!in_box) {
        jitter /= 2;
        continue;
      }
      trace = eval_trace(p, x);
      found = true;
      for (const auto& z : trace.pre)
        for (const auto& v : z)
          if (std::abs(rat_to_double(v)) < 1e-9) found = false;
    }
    if (!found)
      throw PreconditionViolation(
          "sample landed on a nondifferentiability after 200 retries; adjust the box or seed");

    // selectors from the strict activation pattern
    std::vector<std::vector<bool>> active(L);
    for (std::size_t l = 0; l < L; ++l) {
      active[l].resize(p.arch.width(l + 1));
      for (std::size_t j = 0; j < active[l].size(); ++j) active[l][j] = sgn(trace.pre[l][j]) > 0;
    }
    // suffix products J_l = W^(L+1) D_L W^(L) ... D_l (m x n_l), exact then floated
    std::vector<RatMat> suffix(L + 2);
    suffix[L + 1] = RatMat::identity(m);
    for (std::size_t l = L; l >= 1; --l) {
      RatMat right = suffix[l + 1] * p.layer(l + 1).W;  // m x n_l
      for (std::size_t col = 0; col < right.cols(); ++col)
        if (!active[l - 1][col])
          for (std::size_t row = 0; row < right.rows(); ++row) right(row, col) = 0;
      suffix[l] = std::move(right);
      if (l == 1) break;
    }

    std::size_t col0 = 0;
    for (std::size_t l = 1; l <= L + 1; ++l) {
      const std::size_t nl = p.arch.width(l), nprev = p.arch.width(l - 1);
      const RatVec& a_prev = trace.act[l - 1];
      for (std::size_t i = 0; i < nl; ++i)
        for (std::size_t j = 0; j < nprev; ++j) {
          std::size_t col = col0 + i * nprev + j;
          for (std::size_t r = 0; r < m; ++r) {
            double ji = l == L + 1 ? (r == i ? 1.0 : 0.0) : rat_to_double(suffix[l](r, i));
            jac(s * m + r, col) = ji * rat_to_double(a_prev[j]);
          }
        }
      for (std::size_t i = 0; i < nl; ++i) {
        std::size_t col = col0 + nl * nprev + i;
        for (std::size_t r = 0; r < m; ++r)
          jac(s * m + r, col) = l == L + 1 ? (r == i ? 1.0 : 0.0) : rat_to_double(suffix[l](r, i));
      }
      col0 += nl * nprev + nl;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  Eigen::VectorXd sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  if (out.singular_values.empty() || out.singular_values[0] <= 0.0) {
    out.rank = 0;
    return out;
  }
  out.cutoff = 1e-8 * out.singular_values[0];
  int rank = 0;
  while (rank < sv.size() && out.singular_values[rank] >= out.cutoff) ++rank;
  out.rank = rank;
  if (rank < sv.size() && out.singular_values[rank] > 0.0)
    out.gap = out.singular_values[rank - 1] / out.singular_values[rank];
  else
    out.gap = std::numeric_limits<double>::infinity();
  return out;
}

int min_width_lower_bound(const Parameter& p, const RatMat& a, const Polyhedron& poly) {
  if (p.arch.depth() != 1) throw PreconditionViolation("min_width_lower_bound requires L = 1");
  const std::size_t n = p.arch.width(1);
  const std::size_t d = p.arch.input_dim();
  if (a.rows() != p.arch.output_dim() || a.cols() != d)
    throw PreconditionViolation("matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    RatVec row = p.layer(1).W.row(i);
    if (is_zero_vec(row)) throw PreconditionViolation("zero-row neuron has no hyperplane");
    Hyperplane h = Hyperplane::canonical(row, p.layer(1).b[i]);
    if (!hyperplane_inside(h, poly))
      throw PreconditionViolation("hyperplane " + std::to_string(i) + " is not inside the polytope");
  }
  auto hull = affine_hull(poly);
  if (!hull) throw PreconditionViolation("empty polytope");
  RatMat proj = hull->basis.empty() ? RatMat::zero(d, d) : projection_onto_span(hull->basis);

  int best = INT_MAX;
  std::vector<int> alpha(n, -1);
  for (;;) {
    RatMat sum = a;
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] == 0) continue;
      RatVec col = p.layer(2).W.col(i);
      RatVec row = p.layer(1).W.row(i);
      for (std::size_t r = 0; r < sum.rows(); ++r)
        for (std::size_t cidx = 0; cidx < sum.cols(); ++cidx)
          sum(r, cidx) += Rat(alpha[i]) * col[r] * row[cidx];
    }
    best = std::min(best, exact_rank(sum * proj));
    std::size_t i = 0;
    while (i < n && alpha[i] == 1) alpha[i++] = -1;
    if (i == n) break;
    ++alpha[i];
  }
  return static_cast<int>(n) + best;
}

std::string verdict_to_string(const Verdict& v) {
  std::string s = v.property + ": ";
  switch (v.status) {
    case VerdictStatus::Pass: s += "pass"; break;
    case VerdictStatus::ProbabilisticPass: s += "probabilistic-pass"; break;
    case VerdictStatus::Fail: s += "fail"; break;
  }
  if (!v.notes.empty()) s += " (" + v.notes + ")";
  return s;
}

}  // namespace relupoly
