#include "relupoly/geometry.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace relupoly {

Hyperplane Hyperplane::canonical(const RatVec& normal, const Rat& offset) {
  if (is_zero_vec(normal)) throw PreconditionViolation("hyperplane with zero normal");
  RatVec prim = primitive_integer_vector(normal);
  // scale factor lambda with prim = lambda * normal; apply the same to the offset
  std::size_t p = 0;
  while (sgn(normal[p]) == 0) ++p;
  Rat lambda = prim[p] / normal[p];
  Rat off = lambda * offset;
  std::size_t q = 0;
  while (sgn(prim[q]) == 0) ++q;
  if (sgn(prim[q]) < 0) {
    for (auto& v : prim) v = -v;
    off = -off;
  }
  return Hyperplane{std::move(prim), std::move(off)};
}

bool Hyperplane::operator<(const Hyperplane& o) const {
  if (normal != o.normal) return std::lexicographical_compare(
      normal.begin(), normal.end(), o.normal.begin(), o.normal.end(),
      [](const Rat& a, const Rat& b) { return a < b; });
  return offset < o.offset;
}

std::string Hyperplane::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < normal.size(); ++i) os << (i ? "," : "") << rat_to_string(normal[i]);
  os << "]x + " << rat_to_string(offset) << " = 0";
  return os.str();
}

Polyhedron Polyhedron::box(std::size_t dim, const Rat& radius) {
  Polyhedron p;
  p.dim = dim;
  for (std::size_t i = 0; i < dim; ++i) {
    RatVec pos(dim, Rat(0)), neg(dim, Rat(0));
    pos[i] = 1;
    neg[i] = -1;
    p.ineqs.push_back({pos, radius});   // x_i + R >= 0
    p.ineqs.push_back({neg, radius});   // -x_i + R >= 0
  }
  return p;
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
  if (dim != other.dim) throw InternalError("intersect: dimension mismatch");
  Polyhedron p = *this;
  p.ineqs.insert(p.ineqs.end(), other.ineqs.begin(), other.ineqs.end());
  p.eqs.insert(p.eqs.end(), other.eqs.begin(), other.eqs.end());
  return p;
}

Polyhedron Polyhedron::with_inequality(const LinExpr& e) const {
  Polyhedron p = *this;
  p.ineqs.push_back(e);
  return p;
}

Polyhedron Polyhedron::with_equality(const LinExpr& e) const {
  Polyhedron p = *this;
  p.eqs.push_back(e);
  return p;
}

bool Polyhedron::contains(const RatVec& x) const {
  for (const auto& e : ineqs)
    if (sgn(e.eval(x)) < 0) return false;
  for (const auto& e : eqs)
    if (sgn(e.eval(x)) != 0) return false;
  return true;
}

namespace {

void pack(const Polyhedron& p, RatMat& G, RatVec& g, RatMat& E, RatVec& e) {
  G = RatMat(p.ineqs.size(), p.dim);
  g.assign(p.ineqs.size(), Rat(0));
  for (std::size_t i = 0; i < p.ineqs.size(); ++i) {
    G.set_row(i, p.ineqs[i].a);
    g[i] = p.ineqs[i].b;
  }
  E = RatMat(p.eqs.size(), p.dim);
  e.assign(p.eqs.size(), Rat(0));
  for (std::size_t i = 0; i < p.eqs.size(); ++i) {
    E.set_row(i, p.eqs[i].a);
    e[i] = p.eqs[i].b;
  }
}

}  // namespace

std::optional<RatVec> lp_feasible(const Polyhedron& p) {
  RatMat G, E;
  RatVec g, e;
  pack(p, G, g, E, e);
  auto r = lp_solve(G, g, E, e, RatVec(p.dim, Rat(0)));
  if (r.status == LpStatus::Infeasible) return std::nullopt;
  return r.x;
}

LpResult lp_maximize(const Polyhedron& p, const RatVec& c) {
  RatMat G, E;
  RatVec g, e;
  pack(p, G, g, E, e);
  return lp_solve(G, g, E, e, c);
}

std::optional<RatVec> strictly_feasible_point(const Polyhedron& p) {
  // max t s.t. a_i x + b_i - t >= 0, t <= 1, equalities as given
  const std::size_t d = p.dim;
  RatMat G(p.ineqs.size() + 1, d + 1);
  RatVec g(p.ineqs.size() + 1, Rat(0));
  for (std::size_t i = 0; i < p.ineqs.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) G(i, j) = p.ineqs[i].a[j];
    G(i, d) = -1;
    g[i] = p.ineqs[i].b;
  }
  G(p.ineqs.size(), d) = -1;  // 1 - t >= 0
  g[p.ineqs.size()] = 1;
  RatMat E(p.eqs.size(), d + 1);
  RatVec e(p.eqs.size(), Rat(0));
  for (std::size_t i = 0; i < p.eqs.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) E(i, j) = p.eqs[i].a[j];
    e[i] = p.eqs[i].b;
  }
  RatVec c(d + 1, Rat(0));
  c[d] = 1;
  auto r = lp_solve(G, g, E, e, c);
  if (r.status != LpStatus::Optimal || sgn(r.value) <= 0) return std::nullopt;
  r.x.resize(d);
  return r.x;
}

std::vector<std::size_t> implicit_equalities(const Polyhedron& p) {
  std::vector<std::size_t> out;
  if (strictly_feasible_point(p)) return out;
  for (std::size_t i = 0; i < p.ineqs.size(); ++i) {
    auto r = lp_maximize(p, p.ineqs[i].a);
    if (r.status == LpStatus::Optimal && sgn(r.value + p.ineqs[i].b) == 0) out.push_back(i);
    if (r.status == LpStatus::Infeasible) return {};  // empty polyhedron
  }
  return out;
}

std::optional<RatVec> relint_point(const Polyhedron& p) {
  if (auto x = strictly_feasible_point(p)) return x;
  auto w = lp_feasible(p);
  if (!w) return std::nullopt;
  auto impl = implicit_equalities(p);
  if (impl.empty()) {
    // No strict point but no implicit equalities either can only happen when
    // there are no inequalities at all.
    if (p.ineqs.empty()) return w;
  }
  Polyhedron q;
  q.dim = p.dim;
  q.eqs = p.eqs;
  std::vector<bool> is_impl(p.ineqs.size(), false);
  for (auto i : impl) is_impl[i] = true;
  for (std::size_t i = 0; i < p.ineqs.size(); ++i) {
    if (is_impl[i])
      q.eqs.push_back(p.ineqs[i]);
    else
      q.ineqs.push_back(p.ineqs[i]);
  }
  if (q.ineqs.empty()) return lp_feasible(q);
  return strictly_feasible_point(q);
}

std::optional<AffineHull> affine_hull(const Polyhedron& p) {
  auto w = lp_feasible(p);
  if (!w) return std::nullopt;
  AffineHull hull;
  hull.point = *w;
  std::vector<RatVec> eq_normals;
  for (const auto& e : p.eqs) eq_normals.push_back(e.a);
  for (auto i : implicit_equalities(p)) eq_normals.push_back(p.ineqs[i].a);
  for (const auto& e : p.eqs) hull.equations.push_back(e);
  for (auto i : implicit_equalities(p)) hull.equations.push_back(p.ineqs[i]);
  if (eq_normals.empty()) {
    for (std::size_t j = 0; j < p.dim; ++j) {
      RatVec b(p.dim, Rat(0));
      b[j] = 1;
      hull.basis.push_back(std::move(b));
    }
    return hull;
  }
  hull.basis = null_space(RatMat::from_rows(eq_normals));
  return hull;
}

int polyhedron_dim(const Polyhedron& p) {
  auto hull = affine_hull(p);
  if (!hull) return -1;
  return static_cast<int>(hull->basis.size());
}

std::vector<RatVec> enumerate_vertices(const Polyhedron& p) {
  if (p.dim > 3) throw PreconditionViolation("vertex enumeration supported only up to dimension 3");
  std::vector<LinExpr> all = p.eqs;
  all.insert(all.end(), p.ineqs.begin(), p.ineqs.end());
  const std::size_t n = all.size(), d = p.dim;
  std::vector<RatVec> verts;
  // iterate over all d-subsets of constraints
  std::vector<std::size_t> comb;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (comb.size() == d) {
      RatMat A(d, d);
      RatVec b(d);
      for (std::size_t k = 0; k < d; ++k) {
        A.set_row(k, all[comb[k]].a);
        b[k] = -all[comb[k]].b;
      }
      if (exact_rank(A) != static_cast<int>(d)) return;
      auto x = solve_linear(A, b);
      if (!x || !p.contains(*x)) return;
      if (std::find(verts.begin(), verts.end(), *x) == verts.end()) verts.push_back(*x);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      comb.push_back(i);
      rec(i + 1);
      comb.pop_back();
    }
  };
  if (d == 0) {
    if (lp_feasible(p)) verts.push_back({});
    return verts;
  }
  rec(0);
  return verts;
}

bool meets_relative_interior(const Polyhedron& p, const Polyhedron& q) {
  if (p.dim != q.dim) throw InternalError("meets_relative_interior: dimension mismatch");
  // max t s.t. x in p, q.eqs hold, q.ineqs >= t, t <= 1
  const std::size_t d = p.dim;
  Polyhedron lifted;
  lifted.dim = d + 1;
  auto lift = [&](const LinExpr& e, const Rat& tcoef) {
    RatVec a = e.a;
    a.push_back(tcoef);
    return LinExpr{std::move(a), e.b};
  };
  for (const auto& e : p.ineqs) lifted.ineqs.push_back(lift(e, Rat(0)));
  for (const auto& e : p.eqs) lifted.eqs.push_back(lift(e, Rat(0)));
  for (const auto& e : q.ineqs) lifted.ineqs.push_back(lift(e, Rat(-1)));
  for (const auto& e : q.eqs) lifted.eqs.push_back(lift(e, Rat(0)));
  RatVec tcap(d + 1, Rat(0));
  tcap[d] = -1;
  lifted.ineqs.push_back({tcap, Rat(1)});
  RatVec c(d + 1, Rat(0));
  c[d] = 1;
  auto r = lp_maximize(lifted, c);
  return r.status == LpStatus::Optimal && sgn(r.value) > 0;
}

namespace {

// injective case: rank(m) equals the ambient dimension of p
Polyhedron affine_image_injective(const Polyhedron& p, const RatMat& m, const RatVec& c);

}  // namespace

Polyhedron affine_image(const Polyhedron& p, const RatMat& m, const RatVec& c) {
  const std::size_t d = p.dim, n = m.rows();
  if (m.cols() != d || c.size() != n) throw InternalError("affine_image: shape mismatch");
  if (exact_rank(m) == static_cast<int>(d)) return affine_image_injective(p, m, c);

  // parameterize p by its affine hull and require injectivity there
  auto hull = affine_hull(p);
  if (!hull) throw PreconditionViolation("affine_image: empty polyhedron");
  const std::size_t r = hull->basis.size();
  RatMat bt(d, r);  // columns = hull basis vectors
  for (std::size_t k = 0; k < r; ++k) bt.set_col(k, hull->basis[k]);
  Polyhedron local;
  local.dim = r;
  auto translate = [&](const LinExpr& e) {
    RatVec a = bt.transposed() * e.a;
    return LinExpr{std::move(a), dot(e.a, hull->point) + e.b};
  };
  for (const auto& e : p.ineqs) local.ineqs.push_back(translate(e));
  for (const auto& e : p.eqs) {
    LinExpr t = translate(e);
    if (is_zero_vec(t.a)) continue;  // hull equation, vacuous in local coordinates
    local.eqs.push_back(std::move(t));
  }
  RatMat m_local = m * bt;
  RatVec c_local = vec_add(m * hull->point, c);
  if (exact_rank(m_local) != static_cast<int>(r))
    throw PreconditionViolation("affine_image: map is not injective on the affine hull");
  return affine_image_injective(local, m_local, c_local);
}

namespace {

Polyhedron affine_image_injective(const Polyhedron& p, const RatMat& m, const RatVec& c) {
  const std::size_t d = p.dim, n = m.rows();
  // choose d independent rows B of m
  std::vector<std::size_t> brows;
  std::vector<RatVec> rows;
  for (std::size_t i = 0; i < n && brows.size() < d; ++i) {
    rows.push_back(m.row(i));
    if (exact_rank(RatMat::from_rows(rows)) == static_cast<int>(rows.size()))
      brows.push_back(i);
    else
      rows.pop_back();
  }
  RatMat B(d, d);
  RatVec cB(d);
  for (std::size_t k = 0; k < d; ++k) {
    B.set_row(k, m.row(brows[k]));
    cB[k] = c[brows[k]];
  }
  auto Binv_opt = inverse(B);
  if (!Binv_opt) throw InternalError("affine_image: basis inversion failed");
  const RatMat& Binv = *Binv_opt;

  // x = Binv * (y_B - c_B); translate a.x + b into an expression in y.
  auto pull = [&](const LinExpr& e) {
    RatVec ay(n, Rat(0));
    RatVec aB = Binv.transposed() * e.a;  // coefficients on y_B
    Rat b = e.b - dot(aB, cB);
    for (std::size_t k = 0; k < d; ++k) ay[brows[k]] += aB[k];
    return LinExpr{std::move(ay), std::move(b)};
  };

  Polyhedron img;
  img.dim = n;
  for (const auto& e : p.ineqs) img.ineqs.push_back(pull(e));
  for (const auto& e : p.eqs) img.eqs.push_back(pull(e));
  // consistency equalities for the non-basic rows: y_r = m_r Binv (y_B - c_B) + c_r
  std::vector<bool> isb(n, false);
  for (auto i : brows) isb[i] = true;
  for (std::size_t r = 0; r < n; ++r) {
    if (isb[r]) continue;
    RatVec coefB = Binv.transposed() * m.row(r);
    RatVec ay(n, Rat(0));
    ay[r] = -1;
    for (std::size_t k = 0; k < d; ++k) ay[brows[k]] += coefB[k];
    Rat b = c[r] - dot(coefB, cB);
    img.eqs.push_back({std::move(ay), std::move(b)});
  }
  return img;
}

}  // namespace

bool hyperplane_inside(const Hyperplane& h, const Polyhedron& p) {
  // relint is taken relative to the affine hull: move implicit equalities over
  auto impl = implicit_equalities(p);
  std::vector<bool> is_impl(p.ineqs.size(), false);
  for (auto i : impl) is_impl[i] = true;
  Polyhedron base, strict_part;
  base.dim = strict_part.dim = p.dim;
  base.eqs = p.eqs;
  for (std::size_t i = 0; i < p.ineqs.size(); ++i) {
    if (is_impl[i])
      base.eqs.push_back(p.ineqs[i]);
    else
      strict_part.ineqs.push_back(p.ineqs[i]);
  }
  Polyhedron on_h = base.with_equality(h.expr());
  if (!meets_relative_interior(on_h, strict_part)) return false;
  int dp = polyhedron_dim(p);
  return polyhedron_dim(p.with_equality(h.expr())) == dp - 1;
}

}  // namespace relupoly
