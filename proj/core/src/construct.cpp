#include "relupoly/construct.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace relupoly {

namespace {

// h(Mx + c) as an expression in x
LinExpr pull_expr(const LinExpr& e, const AffinePiece& map) {
  return {map.A.transposed() * e.a, dot(e.a, map.b) + e.b};
}

// min over +- of the normalized-infinity distance between (w',b') and (w,b),
// decided exactly with radical comparisons
bool hyperplane_eps_close(const RatVec& wp, const Rat& bp, const RatVec& w, const Rat& b,
                          const Rat& eps) {
  Rat sp = norm2_squared(wp), s = norm2_squared(w);
  for (int flip : {+1, -1}) {
    bool ok = true;
    for (std::size_t i = 0; i <= w.size() && ok; ++i) {
      Rat a = i < w.size() ? wp[i] : bp;
      Rat c = i < w.size() ? w[i] : b;
      if (flip < 0) c = -c;
      ok = radical_diff_below(a, sp, c, s, eps);
    }
    if (ok) return true;
  }
  return false;
}

// rescale (row, bias) by a power of two so the largest entry sits in [1/2, 1);
// keeps the zero set and all signs, and keeps later layers well conditioned
void normalize_neuron_scale(RatVec& row, Rat& bias) {
  Rat mx(0);
  for (const auto& v : row) {
    Rat a = sgn(v) < 0 ? -v : v;
    if (a > mx) mx = a;
  }
  Rat ab = sgn(bias) < 0 ? -bias : bias;
  if (ab > mx) mx = ab;
  if (sgn(mx) == 0) return;
  Rat scale(1);
  Rat half(1, 2);
  while (mx >= 1) {
    mx /= 2;
    scale /= 2;
  }
  while (mx < half) {
    mx *= 2;
    scale *= 2;
  }
  for (auto& v : row) v *= scale;
  bias *= scale;
}

// expected slab active sets: S(R_i) = {1..i} symmetric-difference {n}, 0-based
std::vector<std::vector<std::size_t>> slab_active_sets(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i <= n; ++i) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k + 1 < n; ++k)
      if (k < i) s.push_back(k);
    if (i < n) s.push_back(n - 1);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

SlabLayer make_slab_layer(const std::vector<ImagePiece>& x, const Polyhedron& p,
                          const Hyperplane& h, std::size_t n, const Rat& eps, Rng& rng) {
  if (sgn(eps) <= 0) throw PreconditionViolation("slab layer needs a positive epsilon");
  if (n < 2) throw PreconditionViolation("slab layer needs at least 2 neurons");
  if (!hyperplane_inside(h, p))
    throw PreconditionViolation("target hyperplane is not inside the polytope");

  const std::size_t dim = p.dim;
  // work at unit scale: the canonical primitive normal can carry huge integer
  // entries, which would make eps and the offset spread geometrically tiny
  RatVec base_n = h.normal;
  Rat base_off = h.offset;
  normalize_neuron_scale(base_n, base_off);

  auto up = lp_maximize(p, base_n);
  RatVec neg = base_n;
  for (auto& v : neg) v = -v;
  auto dn = lp_maximize(p, neg);
  if (up.status != LpStatus::Optimal || dn.status != LpStatus::Optimal)
    throw PreconditionViolation("slab target polytope must be bounded");
  Rat slack_pos = up.value + base_off;     // max h(x)
  Rat slack_neg = -(-dn.value + base_off);  // -min h(x)
  Rat slack = slack_pos < slack_neg ? slack_pos : slack_neg;
  if (sgn(slack) <= 0) throw PreconditionViolation("target hyperplane has no offset slack");

  // start from the widest certifiable spread; the certification loop shrinks
  // it when any condition fails, so robustness costs nothing in correctness
  Rat eps_eff = eps < slack / 2 ? eps : slack / 2;
  auto actives = slab_active_sets(n);
  const bool debug_slab = std::getenv("RELUPOLY_DEBUG_SLAB") != nullptr;
  const char* reject_reason = "";

  for (int halving = 0; halving < 20; ++halving, eps_eff /= 2) {
    for (int attempt = 0; attempt < 12; ++attempt) {
      // offsets b_1 > ... > b_n within eps_eff of the target; the last gap is
      // the widest since the fully active cell R_{n-1} lives between H_{n-1}, H_n
      RatVec offsets(n);
      for (std::size_t i = 0; i + 1 < n; ++i)
        offsets[i] = base_off +
                     eps_eff * Rat(static_cast<long>(n - 1 - i)) / Rat(static_cast<long>(n));
      offsets[n - 1] = base_off - eps_eff;
      // genericity nudge on the normals: the widest certifiable fan-out keeps
      // the next stage's target polytope thick, so try big tilts first
      Rat nudge = eps_eff / rat_from_long(4L << std::min(attempt, 9));
      SlabLayer slab;
      slab.W = RatMat(n, dim);
      slab.b.assign(n, Rat(0));
      slab.hyperplanes.clear();
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        RatVec w = base_n;
        for (std::size_t t = 0; t < dim; ++t) w[t] += rng.rational(nudge);
        if (is_zero_vec(w)) {
          ok = false;
          break;
        }
        // neuron n-1 is the reversed one
        RatVec row = w;
        Rat bias = offsets[i];
        if (i + 1 == n) {
          for (auto& v : row) v = -v;
          bias = -offsets[i];
        }
        normalize_neuron_scale(row, bias);
        slab.W.set_row(i, row);
        slab.b[i] = bias;
        slab.hyperplanes.push_back(Hyperplane::canonical(w, offsets[i]));
      }
      if (!ok) continue;

      // every hyperplane inside P and eps-close to H
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (!hyperplane_inside(slab.hyperplanes[i], p)) {
          ok = false;
          reject_reason = "hyperplane not inside P";
        }
        if (ok && !hyperplane_eps_close(slab.hyperplanes[i].normal, slab.hyperplanes[i].offset,
                                        h.normal, h.offset, eps)) {
          ok = false;
          reject_reason = "eps-closeness";
        }
      }
      if (!ok) continue;

      // pairwise intersections outside X
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i + 1; j < n && ok; ++j)
          for (const auto& piece : x) {
            Polyhedron meet = piece.domain;
            meet.eqs.push_back(pull_expr(slab.hyperplanes[i].expr(), piece.map));
            meet.eqs.push_back(pull_expr(slab.hyperplanes[j].expr(), piece.map));
            if (lp_feasible(meet)) {
              ok = false;
              reject_reason = "pairwise intersection inside X";
              break;
            }
          }
      if (!ok) continue;

      // transparency on X: no point with every preactivation strictly negative
      for (const auto& piece : x) {
        Polyhedron lifted;
        lifted.dim = piece.domain.dim + 1;
        auto lift = [&](const LinExpr& e, const Rat& tc) {
          RatVec a = e.a;
          a.push_back(tc);
          return LinExpr{a, e.b};
        };
        for (const auto& e : piece.domain.ineqs) lifted.ineqs.push_back(lift(e, Rat(0)));
        for (const auto& e : piece.domain.eqs) lifted.eqs.push_back(lift(e, Rat(0)));
        for (std::size_t i = 0; i < n; ++i) {
          LinExpr z = pull_expr({slab.W.row(i), slab.b[i]}, piece.map);
          RatVec a(piece.domain.dim + 1);
          for (std::size_t t = 0; t < piece.domain.dim; ++t) a[t] = -z.a[t];
          a[piece.domain.dim] = -1;
          lifted.ineqs.push_back({a, -z.b});
        }
        RatVec cap(piece.domain.dim + 1, Rat(0));
        cap[piece.domain.dim] = -1;
        lifted.ineqs.push_back({cap, Rat(1)});
        RatVec obj(piece.domain.dim + 1, Rat(0));
        obj[piece.domain.dim] = 1;
        auto lp = lp_maximize(lifted, obj);
        if (lp.status == LpStatus::Optimal && sgn(lp.value) > 0) {
          ok = false;
          reject_reason = "not transparent on X";
          break;
        }
      }
      if (!ok) continue;

      // orientation certificate: the n+1 slab cells exist with the prescribed
      // active sets
      slab.regions.clear();
      for (std::size_t i = 0; i <= n && ok; ++i) {
        Polyhedron cell = p;
        std::vector<bool> act(n, false);
        for (auto k : actives[i]) act[k] = true;
        for (std::size_t k = 0; k < n; ++k) {
          LinExpr z{slab.W.row(k), slab.b[k]};
          if (!act[k]) {
            for (auto& v : z.a) v = -v;
            z.b = -z.b;
          }
          cell.ineqs.push_back(z);
        }
        if (!strictly_feasible_point(cell)) {
          ok = false;
          reject_reason = "orientation cell empty";
          break;
        }
        slab.regions.push_back(std::move(cell));
      }
      if (!ok) continue;

      slab.target = p;
      slab.region_active = actives;
      slab.eps_used = eps_eff;
      return slab;
    }
    if (debug_slab)
      std::fprintf(stderr, "slab: halving eps to %s after: %s\n",
                   rat_to_string(eps_eff / 2).c_str(), reject_reason);
  }
  throw ConstructionFailure("slab layer: certification failed after 20 epsilon halvings");
}

PivotResult pivot_hyperplane(const SlabLayer& slab, const Polyhedron& p) {
  const std::size_t n = slab.hyperplanes.size();
  const std::size_t dim = p.dim;

  // image points of relative-interior points on the slab hyperplanes
  RatMat y(n, n);  // column k = image of x^(k)
  for (std::size_t k = 0; k < n; ++k) {
    auto xk = relint_point(p.with_equality(slab.hyperplanes[k].expr()));
    if (!xk) throw ConstructionFailure("slab hyperplane misses the polytope");
    RatVec z = vec_add(slab.W * *xk, slab.b);
    for (auto& v : z)
      if (sgn(v) < 0) v = 0;
    y.set_col(k, z);
  }
  if (exact_rank(y) != static_cast<int>(n))
    throw ConstructionFailure("slab not generic: image points affinely dependent");

  // H' = affine hull of the image points: nullspace of [y^k^T | 1]
  RatMat aug(n, n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) aug(k, j) = y(j, k);
    aug(k, n) = 1;
  }
  auto ns = null_space(aug);
  if (ns.size() != 1)
    throw ConstructionFailure("slab not generic: pivot hyperplane not unique");
  RatVec normal(ns[0].begin(), ns[0].begin() + n);
  Hyperplane pivot = Hyperplane::canonical(normal, ns[0][n]);

  PivotResult out;
  out.pivot = pivot;
  out.region = slab.regions.at(n - 1);  // fully active cell
  out.region_map = {slab.W, slab.b};

  // certified pullback: nonempty transverse slice in every slab cell,
  // connected through the hyperplane crossings
  const int dim_p = polyhedron_dim(p);
  std::vector<LinExpr> slice(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    RatMat masked = slab.W;
    RatVec mb = slab.b;
    std::vector<bool> act(n, false);
    for (auto k : slab.region_active[i]) act[k] = true;
    for (std::size_t r = 0; r < n; ++r)
      if (!act[r]) {
        for (std::size_t cidx = 0; cidx < dim; ++cidx) masked(r, cidx) = 0;
        mb[r] = 0;
      }
    slice[i] = pull_expr(pivot.expr(), {masked, mb});
    if (is_zero_vec(slice[i].a)) {
      if (sgn(slice[i].b) == 0)
        throw ConstructionFailure("slab not generic: a whole cell maps into the pivot");
      throw ConstructionFailure("pullback misses a slab cell");
    }
    Polyhedron piece = slab.regions[i].with_equality(slice[i]);
    if (polyhedron_dim(piece) != dim_p - 1)
      throw ConstructionFailure("pullback slice is not a hypersurface piece in a cell");
  }
  for (std::size_t k = 0; k < n; ++k) {
    Polyhedron crossing = p.with_equality(slab.hyperplanes[k].expr()).with_equality(slice[k]);
    if (polyhedron_dim(crossing) != dim_p - 2)
      throw ConstructionFailure("pullback does not cross a slab hyperplane transversely");
  }

  try {
    out.image = affine_image(out.region, slab.W, slab.b);
  } catch (const PreconditionViolation&) {
    throw ConstructionFailure("slab not generic: the slab map is degenerate on the active cell");
  }
  if (!hyperplane_inside(pivot, out.image))
    throw ConstructionFailure("pivot hyperplane is not inside the image polytope");
  return out;
}

namespace {

struct SlabChain {
  std::vector<Layer> layers;     // hidden layers 1..upto
  SlabLayer last_slab;
  Polyhedron last_target;        // polytope of the last slab (its image space)
  ConstructionTrail trail;
};

// The truncated network with ReLU output, realized with an identity affine
// output layer so that its facet weights are those of the activation map.
Parameter truncated_param(const std::vector<Layer>& layers, std::size_t d) {
  Parameter p;
  p.arch.widths.push_back(d);
  for (const auto& l : layers) p.arch.widths.push_back(l.W.rows());
  const std::size_t last = layers.back().W.rows();
  p.arch.widths.push_back(last);
  p.layers = layers;
  Layer out;
  out.W = RatMat::identity(last);
  out.b.assign(last, Rat(0));
  p.layers.push_back(out);
  return p;
}

// slab layers 1..upto of the inductive construction
SlabChain build_slab_chain(const Architecture& arch, const WorkingBox& box, const Rat& eps,
                           Rng& rng, std::size_t upto) {
  SlabChain chain;
  const std::size_t d = arch.input_dim();
  Polyhedron p0 = box.polyhedron();
  AffinePiece identity{RatMat::identity(d), RatVec(d, Rat(0))};

  RatVec e1(d, Rat(0));
  e1[0] = 1;
  Hyperplane h0 = Hyperplane::canonical(e1, Rat(0));

  SlabLayer slab = make_slab_layer({{p0, identity}}, p0, h0, arch.width(1), eps, rng);
  chain.layers.push_back({slab.W, slab.b});
  chain.last_slab = slab;
  chain.last_target = p0;
  chain.trail.stages.push_back({1, p0, std::nullopt, slab.eps_used, slab.region_active});

  // pullback chain P >= P^(1) >= ... in input space: preimages of the fully
  // active slab cells, recorded as candidate polytopes for the checks
  Polyhedron chain_poly = p0;
  AffinePiece chain_map = identity;

  for (std::size_t l = 2; l <= upto; ++l) {
    PivotResult piv = pivot_hyperplane(chain.last_slab, chain.last_target);

    Polyhedron pulled = chain_poly;
    for (const auto& e : piv.region.ineqs) pulled.ineqs.push_back(pull_expr(e, chain_map));
    for (const auto& e : piv.region.eqs) {
      LinExpr t = pull_expr(e, chain_map);
      if (!is_zero_vec(t.a) || sgn(t.b) != 0) pulled.eqs.push_back(std::move(t));
    }
    chain_poly = pulled;
    chain_map = {piv.region_map.A * chain_map.A,
                 vec_add(piv.region_map.A * chain_map.b, piv.region_map.b)};
    chain.trail.pullback_polytopes.push_back(chain_poly);

    Parameter trunc = truncated_param(chain.layers, d);
    CanonicalComplex ctrunc = build_complex(trunc, box);
    std::vector<ImagePiece> pieces;
    for (const auto& r : ctrunc.stage_regions.back()) pieces.push_back({r.poly, r.hidden_map});

    SlabLayer next = make_slab_layer(pieces, piv.image, piv.pivot, arch.width(l), eps, rng);
    chain.layers.push_back({next.W, next.b});
    chain.last_slab = next;
    chain.last_target = piv.image;
    ConstructionStage stage{l, piv.image, piv.pivot, next.eps_used, next.region_active};
    chain.trail.stages.push_back(std::move(stage));
  }
  return chain;
}

Layer random_output_layer(const Architecture& arch, Rng& rng) {
  Layer out;
  const std::size_t m = arch.output_dim(), nl = arch.width(arch.depth());
  out.W = RatMat(m, nl);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < nl; ++j) out.W(i, j) = rng.rational();
  for (std::size_t i = 0; i < m; ++i) out.b.push_back(rng.rational());
  return out;
}

}  // namespace

IdentifiableBuild build_identifiable(const Architecture& arch, const WorkingBox& box,
                                     const Rat& eps, std::uint64_t seed) {
  arch.validate();
  const std::size_t L = arch.depth();
  for (std::size_t i = 0; i <= L; ++i)
    if (arch.width(i) < 2)
      throw PreconditionViolation(
          "identifiable construction requires every non-output width >= 2 (width-1 layers are "
          "out of reach)");
  if (sgn(eps) <= 0) throw PreconditionViolation("epsilon must be positive");

  Rng base(seed);
  std::string last_error = "no attempt made";
  for (std::size_t rebuild = 0; rebuild < 8; ++rebuild) {
    Rng rng = base.split(rebuild);
    try {
      SlabChain chain = build_slab_chain(arch, box, eps, rng, L);
      chain.trail.seed = seed;
      chain.trail.stage_rebuilds = rebuild;

      for (std::size_t resample = 0; resample < 12; ++resample) {
        Parameter param;
        param.arch = arch;
        param.layers = chain.layers;
        param.layers.push_back(random_output_layer(arch, rng));
        param.validate();

        CanonicalComplex c = build_complex(param, box);
        BreakpointComplex b = breakpoint_complex(c);
        Verdict gen = genericity_check(c, seed);
        Verdict sup = supertransversality_check(c);
        Verdict can = cancellation_free_check(c, b);
        bool transparent = true;
        for (std::size_t l = 2; l <= L; ++l)
          transparent = transparent && transparency_check(c, l, box.polyhedron()).transparent;
        bool lra = lra_check(c, b, box.polyhedron()).ok;
        bool ctpic = ctpic_check(c, b, box.polyhedron()).verdict.passed();

        if (gen.passed() && sup.passed() && can.passed() && transparent && lra && ctpic) {
          chain.trail.output_resamples = resample;
          return {param, chain.trail};
        }
        // hidden-geometry failures cannot be fixed by the output layer
        bool hidden_failure = !sup.passed() || !transparent ||
                              (!gen.passed() && gen.notes.find("rank condition") == std::string::npos);
        last_error = !gen.passed() ? verdict_to_string(gen)
                     : !sup.passed() ? verdict_to_string(sup)
                     : !can.passed() ? verdict_to_string(can)
                     : !transparent  ? "transparency failed"
                     : !lra          ? "LRA failed on the box"
                                     : "cTPIC failed on the box";
        if (hidden_failure) break;
      }
    } catch (const ConstructionFailure& e) {
      last_error = e.what();
    }
  }
  throw ConstructionFailure("identifiable construction failed after retries: " + last_error);
}

MinimalNonidentifiableBuild build_minimal_nonidentifiable(const Architecture& arch,
                                                          const WorkingBox& box,
                                                          std::uint64_t seed) {
  arch.validate();
  const std::size_t L = arch.depth();
  if (L < 2) throw PreconditionViolation("minimal-nonidentifiable construction needs L >= 2");
  for (std::size_t i = 0; i <= L; ++i)
    if (arch.width(i) < 2) throw PreconditionViolation("all non-output widths must be >= 2");
  if (arch.width(L) < 4)
    throw PreconditionViolation("the last hidden layer needs width >= 4 (two bending, two linear)");
  if (arch.output_dim() < 2) throw PreconditionViolation("output width must be >= 2");

  const std::size_t d = arch.input_dim();
  const std::size_t nl = arch.width(L);
  const std::size_t nprev = arch.width(L - 1);
  Rat eps = rat_from_long(1, 10);

  Rng base(seed);
  std::string last_error = "no attempt made";
  for (std::size_t rebuild = 0; rebuild < 8; ++rebuild) {
    Rng rng = base.split(0xabc ^ rebuild);
    try {
      SlabChain chain = build_slab_chain(arch, box, eps, rng, L - 1);
      chain.trail.seed = seed;
      chain.trail.stage_rebuilds = rebuild;

      PivotResult piv = pivot_hyperplane(chain.last_slab, chain.last_target);
      Parameter trunc = truncated_param(chain.layers, d);
      CanonicalComplex ctrunc = build_complex(trunc, box);
      std::vector<ImagePiece> pieces;
      for (const auto& r : ctrunc.stage_regions.back()) pieces.push_back({r.poly, r.hidden_map});
      SlabLayer slab_j = make_slab_layer(pieces, piv.image, piv.pivot, nl - 2, eps, rng);

      // two always-active linear neurons with strictly positive augmented rows
      RatMat w_lin(2, nprev + 1);
      for (int attempt = 0; attempt < 50; ++attempt) {
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j <= nprev; ++j) w_lin(i, j) = rng.positive_rational();
        if (exact_rank(w_lin) == 2) break;
        if (attempt == 49) throw ConstructionFailure("could not draw a rank-2 positive block");
      }

      Layer layer_l;
      layer_l.W = RatMat(nl, nprev);
      layer_l.b.assign(nl, Rat(0));
      for (std::size_t i = 0; i < nl - 2; ++i) {
        layer_l.W.set_row(i, slab_j.W.row(i));
        layer_l.b[i] = slab_j.b[i];
      }
      for (std::size_t i = 0; i < 2; ++i) {
        RatVec row(nprev);
        for (std::size_t j = 0; j < nprev; ++j) row[j] = w_lin(i, j);
        layer_l.W.set_row(nl - 2 + i, row);
        layer_l.b[nl - 2 + i] = w_lin(i, nprev);
      }

      for (std::size_t resample = 0; resample < 12; ++resample) {
        RatMat v_lin(arch.output_dim(), 2);
        for (int attempt = 0; attempt < 50; ++attempt) {
          for (std::size_t i = 0; i < v_lin.rows(); ++i)
            for (std::size_t j = 0; j < 2; ++j) v_lin(i, j) = rng.rational();
          if (exact_rank(v_lin) == 2) break;
          if (attempt == 49) throw ConstructionFailure("could not draw a rank-2 output block");
        }
        Layer out = random_output_layer(arch, rng);
        for (std::size_t i = 0; i < v_lin.rows(); ++i)
          for (std::size_t j = 0; j < 2; ++j) out.W(i, nl - 2 + j) = v_lin(i, j);

        Parameter param;
        param.arch = arch;
        param.layers = chain.layers;
        param.layers.push_back(layer_l);
        param.layers.push_back(out);
        param.validate();

        // the linear neurons must be strictly positive on the whole prefix
        // image: verified by per-region strict LPs over the prefix complex
        bool positive = true;
        for (const auto& r : ctrunc.stage_regions.back()) {
          for (std::size_t i = 0; i < 2 && positive; ++i) {
            LinExpr z = pull_expr({layer_l.W.row(nl - 2 + i), layer_l.b[nl - 2 + i]},
                                  r.hidden_map);
            RatVec negz = z.a;
            for (auto& v : negz) v = -v;
            auto lp = lp_maximize(r.poly, negz);  // max(-z.a x); min z = z.b - value
            if (lp.status != LpStatus::Optimal || sgn(z.b - lp.value) <= 0) positive = false;
          }
          if (!positive) break;
        }
        if (!positive) {
          last_error = "linear block lost positivity on the prefix image";
          continue;
        }

        CanonicalComplex c = build_complex(param, box);
        BreakpointComplex b = breakpoint_complex(c);
        bool lra = lra_check(c, b, box.polyhedron()).ok;
        Verdict can = cancellation_free_check(c, b);
        // prefix identifiability surface: cTPIC + LRA for the truncated net
        BreakpointComplex btrunc = breakpoint_complex(ctrunc);
        bool prefix_ok = lra_check(ctrunc, btrunc, box.polyhedron()).ok;
        if (prefix_ok && L - 1 >= 2)
          prefix_ok = ctpic_check(ctrunc, btrunc, box.polyhedron()).verdict.passed();

        if (lra && can.passed() && prefix_ok) {
          MinimalNonidentifiableBuild build;
          build.param = param;
          build.trail = chain.trail;
          build.trail.output_resamples = resample;
          build.handle.neurons = {nl - 2, nl - 1};
          build.handle.w_lin = w_lin;
          build.handle.v_lin = v_lin;
          return build;
        }
        last_error = !lra ? "LRA failed on the box" : !can.passed() ? verdict_to_string(can)
                                                                    : "prefix cTPIC failed";
      }
    } catch (const ConstructionFailure& e) {
      last_error = e.what();
    }
  }
  throw ConstructionFailure("minimal-nonidentifiable construction failed: " + last_error);
}

Parameter gl2_fiber_walk(const Parameter& p, const LinearBlockHandle& handle, const RatMat& m) {
  if (m.rows() != 2 || m.cols() != 2) throw PreconditionViolation("M must be 2x2");
  auto minv = inverse(m);
  if (!minv) throw PreconditionViolation("M must be invertible");
  RatMat moved = m * handle.w_lin;
  for (std::size_t i = 0; i < moved.rows(); ++i)
    for (std::size_t j = 0; j < moved.cols(); ++j)
      if (sgn(moved(i, j)) <= 0)
        throw PreconditionViolation("rejected walk: M W_lin loses strict positivity");

  Parameter q = p;
  const std::size_t L = p.arch.depth();
  Layer& hidden = q.layer(L);
  Layer& out = q.layer(L + 1);
  const std::size_t nprev = p.arch.width(L - 1);
  for (std::size_t i = 0; i < 2; ++i) {
    std::size_t row = handle.neurons[i];
    for (std::size_t j = 0; j < nprev; ++j) hidden.W(row, j) = moved(i, j);
    hidden.b[row] = moved(i, nprev);
  }
  RatMat v2 = handle.v_lin * (*minv);
  for (std::size_t i = 0; i < v2.rows(); ++i)
    for (std::size_t j = 0; j < 2; ++j) out.W(i, handle.neurons[j]) = v2(i, j);
  return q;
}

CompressedLayer compress_one_layer(const Parameter& p, const Polyhedron& poly) {
  if (p.arch.depth() != 1) throw PreconditionViolation("compression requires one hidden layer");
  const std::size_t total = p.arch.width(1);
  const std::size_t d = p.arch.input_dim();
  const std::size_t m = p.arch.output_dim();

  auto w_relint = relint_point(poly);
  if (!w_relint) throw PreconditionViolation("empty polytope");

  struct Group {
    Hyperplane h;
    RatVec a;  // [h]_+ coefficient (per output)
    RatVec lin_coeff;  // linear leftover coefficient of h(x)
  };
  std::vector<Group> groups;
  RatMat leftover_lin(m, d);  // linear part of the affine remainder
  RatVec leftover_const(m, Rat(0));

  for (std::size_t i = 0; i < total; ++i) {
    RatVec row = p.layer(1).W.row(i);
    RatVec col = p.layer(2).W.col(i);
    Rat bias = p.layer(1).b[i];
    if (is_zero_vec(row)) {
      // constant preactivation
      Rat v = bias;
      if (sgn(v) > 0)
        for (std::size_t r = 0; r < m; ++r) leftover_const[r] += col[r] * v;
      continue;
    }
    Hyperplane h = Hyperplane::canonical(row, bias);
    std::size_t t = 0;
    while (sgn(h.normal[t]) == 0) ++t;
    Rat lambda = row[t] / h.normal[t];

    Polyhedron cut = poly;
    bool inside = hyperplane_inside(h, poly);
    if (!inside) {
      // constant sign on relint(P): contributes an affine map or nothing
      int s = sgn(dot(row, *w_relint) + bias);
      if (s == 0) {
        // relint witness on the hyperplane despite not crossing: resolve by
        // the side the polytope lies on
        auto up = lp_maximize(poly, row);
        s = up.status == LpStatus::Optimal && sgn(up.value + bias) > 0 ? 1 : -1;
      }
      if (s > 0) {
        for (std::size_t r = 0; r < m; ++r) {
          for (std::size_t cidx = 0; cidx < d; ++cidx) leftover_lin(r, cidx) += col[r] * row[cidx];
          leftover_const[r] += col[r] * bias;
        }
      }
      continue;
    }

    std::size_t gi = groups.size();
    for (std::size_t k = 0; k < groups.size(); ++k)
      if (groups[k].h == h) {
        gi = k;
        break;
      }
    if (gi == groups.size()) groups.push_back({h, RatVec(m, Rat(0)), RatVec(m, Rat(0))});
    Rat abs_lambda = sgn(lambda) < 0 ? -lambda : lambda;
    for (std::size_t r = 0; r < m; ++r) {
      groups[gi].a[r] += abs_lambda * col[r];
      if (sgn(lambda) < 0) groups[gi].lin_coeff[r] -= abs_lambda * col[r];
    }
  }

  // visible groups keep one neuron; cancelled groups fold into the affine part
  std::vector<Group> visible;
  for (auto& g : groups) {
    if (is_zero_vec(g.a)) {
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t cidx = 0; cidx < d; ++cidx)
          leftover_lin(r, cidx) += g.lin_coeff[r] * g.h.normal[cidx];
        leftover_const[r] += g.lin_coeff[r] * g.h.offset;
      }
    } else {
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t cidx = 0; cidx < d; ++cidx)
          leftover_lin(r, cidx) += g.lin_coeff[r] * g.h.normal[cidx];
        leftover_const[r] += g.lin_coeff[r] * g.h.offset;
      }
      visible.push_back(g);
    }
  }
  const std::size_t n = visible.size();
  const std::size_t k = total - n;

  auto terms = rank_one_decomposition(leftover_lin);
  if (terms.size() > k)
    throw PreconditionViolation(
        "leftover affine rank exceeds the spare neuron budget; input contradicts the "
        "compression accounting");

  CompressedLayer out;
  out.visible = n;
  out.param.arch = p.arch;
  Layer l1, l2;
  l1.W = RatMat(total, d);
  l1.b.assign(total, Rat(0));
  l2.W = RatMat(m, total);
  l2.b = p.layer(2).b;
  for (std::size_t r = 0; r < m; ++r) l2.b[r] += leftover_const[r];

  std::size_t idx = 0;
  for (const auto& g : visible) {
    l1.W.set_row(idx, g.h.normal);
    l1.b[idx] = g.h.offset;
    l2.W.set_col(idx, g.a);
    ++idx;
  }
  for (const auto& [cvec, rvec] : terms) {
    // hyperplane pushed beyond the polytope: r.x + beta > 0 everywhere on P
    RatVec neg = rvec;
    for (auto& v : neg) v = -v;
    auto lp = lp_maximize(poly, neg);
    if (lp.status != LpStatus::Optimal)
      throw PreconditionViolation("compression polytope must be bounded");
    Rat beta = lp.value + 1;  // r.x + beta >= 1 on P
    l1.W.set_row(idx, rvec);
    l1.b[idx] = beta;
    l2.W.set_col(idx, cvec);
    for (std::size_t r = 0; r < m; ++r) l2.b[r] -= cvec[r] * beta;
    ++idx;
  }
  // dummies with zero output columns
  RatVec e1(d, Rat(0));
  e1[0] = 1;
  auto lp = lp_maximize(poly, vec_scale(Rat(-1), e1));
  Rat big = lp.status == LpStatus::Optimal ? lp.value + 1 : Rat(1);
  for (; idx < total; ++idx) {
    l1.W.set_row(idx, e1);
    l1.b[idx] = big;
    l2.W.set_col(idx, RatVec(m, Rat(0)));
  }
  out.param.layers = {l1, l2};
  out.param.validate();
  return out;
}

std::vector<int> affine_difference_signature(const Parameter& theta, const Parameter& eta,
                                             const Polyhedron& poly) {
  if (theta.arch.depth() != 1 || eta.arch.depth() != 1)
    throw PreconditionViolation("signature requires one hidden layer on both sides");
  const std::size_t n = theta.arch.width(1);
  if (eta.arch.width(1) != n) throw PreconditionViolation("hidden widths differ");
  const std::size_t m = theta.arch.output_dim();
  const std::size_t d = theta.arch.input_dim();

  struct Side {
    Hyperplane h;
    Rat lambda;
    RatVec col;
  };
  auto decompose = [&](const Parameter& p) {
    std::vector<Side> out;
    for (std::size_t i = 0; i < n; ++i) {
      RatVec row = p.layer(1).W.row(i);
      if (is_zero_vec(row)) throw PreconditionViolation("zero-row neuron has no hyperplane");
      Hyperplane h = Hyperplane::canonical(row, p.layer(1).b[i]);
      if (!hyperplane_inside(h, poly))
        throw PreconditionViolation("a hyperplane is not visible inside the polytope");
      std::size_t t = 0;
      while (sgn(h.normal[t]) == 0) ++t;
      out.push_back({h, row[t] / h.normal[t], p.layer(2).W.col(i)});
    }
    return out;
  };
  auto ts = decompose(theta);
  auto es = decompose(eta);

  std::vector<int> alpha(n, 0);
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t match = SIZE_MAX;
    for (std::size_t j = 0; j < n; ++j)
      if (!used[j] && es[j].h == ts[i].h) {
        match = j;
        break;
      }
    if (match == SIZE_MAX)
      throw PreconditionViolation("visible hyperplanes differ between the parameters");
    used[match] = true;
    // tropical weight equality along the shared hyperplane:
    // |lambda_theta| col_theta == |lambda_eta| col_eta
    Rat lt = sgn(ts[i].lambda) < 0 ? -ts[i].lambda : ts[i].lambda;
    Rat le = sgn(es[match].lambda) < 0 ? -es[match].lambda : es[match].lambda;
    for (std::size_t r = 0; r < m; ++r)
      if (lt * ts[i].col[r] != le * es[match].col[r])
        throw PreconditionViolation("tropical weights differ along a shared hyperplane");
    alpha[i] = sgn(ts[i].lambda) == sgn(es[match].lambda) ? 0 : 1;
  }

  // verify the recovered signature against the exact linear difference on one
  // region (the difference is affine on P once the weights match); the
  // reference point must avoid every hyperplane of both parameters
  Polyhedron cell = poly;
  for (int round = 0; round < static_cast<int>(2 * n) + 2; ++round) {
    auto w0 = relint_point(cell);
    if (!w0) throw PreconditionViolation("empty polytope");
    bool clean = true;
    for (const auto& side : {ts, es})
      for (const auto& sd : side)
        if (sgn(sd.h.expr().eval(*w0)) == 0) {
          cell = cell.with_inequality(sd.h.expr());  // either open side works
          clean = false;
        }
    if (clean) break;
  }
  auto w = relint_point(cell);
  if (!w) throw PreconditionViolation("could not find a reference point off the hyperplanes");
  auto lin_at = [&](const Parameter& p) {
    SignPattern s = activation_pattern(p, *w);
    ActiveSets act = active_sets_from_signs(s);
    return affine_map_for_pattern(p, act).A;
  };
  RatMat diff = lin_at(theta) - lin_at(eta);
  RatMat predicted(m, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0) continue;
    RatVec row = theta.layer(1).W.row(i);
    RatVec col = theta.layer(2).W.col(i);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t cidx = 0; cidx < d; ++cidx)
        predicted(r, cidx) += Rat(alpha[i]) * col[r] * row[cidx];
  }
  if (!(diff == predicted)) {
    // try the opposite orientation per flipped neuron
    bool fixed = false;
    std::function<bool(std::size_t, RatMat)> retry = [&](std::size_t at, RatMat acc) -> bool {
      if (at == n) return acc == diff;
      if (alpha[at] == 0) return retry(at + 1, acc);
      for (int sgn_a : {+1, -1}) {
        RatMat next = acc;
        RatVec row = theta.layer(1).W.row(at);
        RatVec col = theta.layer(2).W.col(at);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t cidx = 0; cidx < d; ++cidx)
            next(r, cidx) += Rat(sgn_a) * col[r] * row[cidx];
        if (retry(at + 1, next)) {
          alpha[at] = sgn_a;
          fixed = true;
          return true;
        }
      }
      return false;
    };
    retry(0, RatMat(m, d));
    if (!fixed)
      throw PreconditionViolation("difference of the networks is not affine on the polytope");
  }
  return alpha;
}

std::string trail_to_json(const ConstructionTrail& t) {
  nlohmann::json j;
  j["seed"] = t.seed;
  j["output_resamples"] = t.output_resamples;
  j["stage_rebuilds"] = t.stage_rebuilds;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : t.stages) {
    nlohmann::json js;
    js["layer"] = s.layer;
    js["eps"] = rat_to_string(s.eps_used);
    if (s.pivot) {
      nlohmann::json n = nlohmann::json::array();
      for (const auto& v : s.pivot->normal) n.push_back(rat_to_string(v));
      js["pivot"] = {{"normal", n}, {"offset", rat_to_string(s.pivot->offset)}};
    }
    nlohmann::json target;
    nlohmann::json ineqs = nlohmann::json::array();
    for (const auto& e : s.target.ineqs) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& v : e.a) a.push_back(rat_to_string(v));
      ineqs.push_back({{"a", a}, {"b", rat_to_string(e.b)}});
    }
    nlohmann::json eqs = nlohmann::json::array();
    for (const auto& e : s.target.eqs) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& v : e.a) a.push_back(rat_to_string(v));
      eqs.push_back({{"a", a}, {"b", rat_to_string(e.b)}});
    }
    target["ineqs"] = ineqs;
    target["eqs"] = eqs;
    js["target"] = target;
    nlohmann::json act = nlohmann::json::array();
    for (const auto& s2 : s.region_active) act.push_back(s2);
    js["region_active_sets"] = act;
    stages.push_back(js);
  }
  j["stages"] = stages;
  return j.dump(2);
}

}  // namespace relupoly
