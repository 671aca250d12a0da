#include "relupoly/arrangement.hpp"

#include <functional>

namespace relupoly {

Essentialization essentialize(const Arrangement& arr) {
  if (arr.hyperplanes.empty()) throw PreconditionViolation("essentialize: empty arrangement");
  std::vector<RatVec> normals;
  for (const auto& h : arr.hyperplanes) normals.push_back(h.normal);
  RatMat N = RatMat::from_rows(normals);
  Essentialization ess;
  ess.lineality_basis = null_space(N);
  ess.coord_basis = row_space_basis(N);
  RatMat B = ess.coord_basis.empty() ? RatMat(0, arr.dim) : RatMat::from_rows(ess.coord_basis);
  ess.essential.dim = ess.coord_basis.size();
  for (const auto& h : arr.hyperplanes) {
    RatVec n2 = B * h.normal;
    ess.essential.hyperplanes.push_back(Hyperplane::canonical(n2, h.offset));
  }
  return ess;
}

namespace {

// Stack the subset as equalities and test solvability / emptiness.
bool subset_consistent(const Arrangement& arr, const std::vector<std::size_t>& subset,
                       RatVec* witness) {
  RatMat A(subset.size(), arr.dim);
  RatVec b(subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) {
    A.set_row(k, arr.hyperplanes[subset[k]].normal);
    b[k] = -arr.hyperplanes[subset[k]].offset;
  }
  auto x = solve_linear(A, b);
  if (!x) return false;
  if (witness) *witness = *x;
  return true;
}

int subset_rank(const Arrangement& arr, const std::vector<std::size_t>& subset) {
  std::vector<RatVec> rows;
  for (auto i : subset) rows.push_back(arr.hyperplanes[i].normal);
  return exact_rank(RatMat::from_rows(rows));
}

bool for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> comb;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    if (comb.size() == k) return fn(comb);
    for (std::size_t i = start; i < n; ++i) {
      comb.push_back(i);
      if (!rec(i + 1)) return false;
      comb.pop_back();
    }
    return true;
  };
  return rec(0);
}

}  // namespace

bool arrangement_is_generic(const Arrangement& arr, GenericityFailure* failure) {
  const std::size_t n = arr.hyperplanes.size(), d = arr.dim;
  for (std::size_t k = 1; k <= std::min(n, d); ++k) {
    bool ok = for_each_subset(n, k, [&](const std::vector<std::size_t>& s) {
      if (subset_rank(arr, s) != static_cast<int>(s.size()) || !subset_consistent(arr, s, nullptr)) {
        if (failure) {
          failure->reason = "subset does not meet in codimension " + std::to_string(s.size());
          failure->subset = s;
        }
        return false;
      }
      return true;
    });
    if (!ok) return false;
  }
  if (n >= d + 1) {
    bool ok = for_each_subset(n, d + 1, [&](const std::vector<std::size_t>& s) {
      RatVec w;
      if (subset_consistent(arr, s, &w)) {
        if (failure) {
          failure->reason = "more than dim hyperplanes share a common point";
          failure->subset = s;
          failure->witness = w;
        }
        return false;
      }
      return true;
    });
    if (!ok) return false;
  }
  return true;
}

bool generic_arrangement_in_region(const Arrangement& arr, const Polyhedron& region,
                                   GenericityFailure* failure) {
  auto hull = affine_hull(region);
  if (!hull) throw PreconditionViolation("generic_arrangement_in_region: empty region");
  const std::size_t r = hull->basis.size();

  Arrangement local;
  local.dim = r;
  std::vector<std::size_t> kept;
  RatMat B = r ? RatMat::from_rows(hull->basis) : RatMat(0, region.dim);
  for (std::size_t i = 0; i < arr.hyperplanes.size(); ++i) {
    const auto& h = arr.hyperplanes[i];
    RatVec ln = B * h.normal;
    Rat loff = dot(h.normal, hull->point) + h.offset;
    if (is_zero_vec(ln)) {
      if (sgn(loff) == 0) {
        if (failure) {
          failure->reason = "hyperplane contains aff(region)";
          failure->subset = {i};
        }
        return false;
      }
      continue;  // misses aff(region) entirely
    }
    local.hyperplanes.push_back(Hyperplane::canonical(ln, loff));
    kept.push_back(i);
  }
  if (!local.hyperplanes.empty()) {
    auto ess = essentialize(local);
    GenericityFailure lf;
    if (!arrangement_is_generic(ess.essential, &lf)) {
      if (failure) {
        *failure = lf;
        for (auto& idx : failure->subset) idx = kept[idx];
      }
      return false;
    }
  }

  if (region.dim <= 3) {
    for (const auto& v : enumerate_vertices(region)) {
      for (std::size_t i = 0; i < arr.hyperplanes.size(); ++i) {
        const auto& h = arr.hyperplanes[i];
        if (sgn(dot(h.normal, v) + h.offset) == 0) {
          if (failure) {
            failure->reason = "hyperplane passes through a vertex of the region";
            failure->subset = {i};
            failure->witness = v;
          }
          return false;
        }
      }
    }
  } else {
    throw PreconditionViolation("vertex check requires ambient dimension <= 3");
  }
  return true;
}

}  // namespace relupoly
