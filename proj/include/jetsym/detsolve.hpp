#pragma once

#include "jetsym/pdesys.hpp"

namespace jetsym {

/// Finite pool of candidate terms; solutions are linear combinations
/// with unknown coefficients in the rational-function field of the parameters.
struct Ansatz {
  std::vector<VectorFunction> pool;
};

struct SolutionSpace {
  std::vector<VectorFunction> basis;
  std::vector<std::string> genericity;  // parameter-dependent pivots assumed nonzero
};

namespace detail {

struct LinearSystem {
  // homogeneous rows over integer polynomials in the parameters
  std::vector<std::vector<ParamPoly>> rows;
  size_t ncols{0};
};

/// Split a list of expressions, linear in the given unknown parameters,
/// into homogeneous linear equations keyed by jet monomial.
inline LinearSystem split_by_monomials(const std::vector<DiffExpr>& residuals,
                                       const std::vector<std::string>& unknowns) {
  LinearSystem ls;
  ls.ncols = unknowns.size();
  std::map<std::pair<size_t, Monomial>, std::vector<CoefField>> eqs;
  for (size_t r = 0; r < residuals.size(); ++r)
    for (auto& [m, c] : residuals[r].terms) {
      auto key = std::make_pair(r, m);
      auto it = eqs.find(key);
      if (it == eqs.end()) it = eqs.emplace(key, std::vector<CoefField>(unknowns.size())).first;
      // c is linear homogeneous in the unknowns
      for (size_t k = 0; k < unknowns.size(); ++k) {
        ParamPoly nk = c.num.coeff_of(unknowns[k], 1);
        for (auto& u2 : unknowns)
          if (nk.depends_on(u2)) throw ExprError("residual is not linear in the unknowns");
        if (c.den.depends_on(unknowns[k])) throw ExprError("unknown in denominator");
        it->second[k] = it->second[k] + CoefField(nk, c.den);
      }
      ParamPoly c0 = c.num;
      for (auto& u : unknowns) {
        ParamPoly rest;
        for (auto& [mm, cc] : c0.terms)
          if (!mm.count(u)) rest.terms[mm] = cc;
        c0 = rest;
      }
      if (!c0.is_zero()) throw ExprError("residual has a term free of the unknowns");
    }
  for (auto& [key, coefs] : eqs) {
    // clear denominators
    ParamPoly common(Int(1));
    for (auto& c : coefs)
      if (!c.is_zero()) common = div_exact(common * c.den, poly_gcd(common, c.den));
    std::vector<ParamPoly> row;
    bool nonzero = false;
    for (auto& c : coefs) {
      if (c.is_zero()) {
        row.push_back(ParamPoly());
      } else {
        row.push_back(c.num * div_exact(common, c.den));
        nonzero = true;
      }
    }
    if (nonzero) ls.rows.push_back(std::move(row));
  }
  return ls;
}

/// Fraction-free (Bareiss) elimination; returns nullspace basis over the
/// coefficient field and records parameter-dependent pivots.
inline std::pair<std::vector<std::vector<CoefField>>, std::vector<std::string>> nullspace(
    LinearSystem ls) {
  size_t n = ls.ncols;
  auto& A = ls.rows;
  std::vector<std::string> generic;
  std::vector<size_t> pivot_col;
  ParamPoly prev(Int(1));
  size_t row = 0;
  for (size_t col = 0; col < n && row < A.size(); ++col) {
    // pivot preference: parameter-free entry if available
    size_t best = A.size();
    for (size_t r = row; r < A.size(); ++r) {
      if (A[r][col].is_zero()) continue;
      if (best == A.size()) best = r;
      if (A[r][col].is_constant()) {
        best = r;
        break;
      }
    }
    if (best == A.size()) continue;
    std::swap(A[row], A[best]);
    const ParamPoly piv = A[row][col];
    if (!piv.is_constant()) generic.push_back(format_param_poly(piv));
    for (size_t r = 0; r < A.size(); ++r) {
      if (r == row || A[r][col].is_zero()) continue;
      for (size_t c2 = 0; c2 < n; ++c2) {
        if (c2 == col) continue;
        A[r][c2] = div_exact(piv * A[r][c2] - A[r][col] * A[row][c2], prev);
      }
      A[r][col] = ParamPoly();
    }
    // scale untouched pivot-row bookkeeping: classic Bareiss uses row-ordered
    // elimination; full pivoting on all rows keeps divisions exact with prev = 1
    prev = ParamPoly(Int(1));
    pivot_col.push_back(col);
    ++row;
  }
  // back-substitution for nullspace
  std::vector<int> is_pivot(n, -1);
  for (size_t k = 0; k < pivot_col.size(); ++k) is_pivot[pivot_col[k]] = static_cast<int>(k);
  std::vector<std::vector<CoefField>> basis;
  for (size_t f = 0; f < n; ++f) {
    if (is_pivot[f] >= 0) continue;
    std::vector<CoefField> x(n);
    x[f] = CoefField(1);
    for (int k = static_cast<int>(pivot_col.size()) - 1; k >= 0; --k) {
      size_t pc = pivot_col[k];
      CoefField acc;
      for (size_t c2 = 0; c2 < n; ++c2) {
        if (c2 == pc) continue;
        if (!A[k][c2].is_zero() && !x[c2].is_zero()) acc = acc + CoefField(A[k][c2]) * x[c2];
      }
      x[pc] = CoefField() - acc / CoefField(A[k][pc]);
    }
    // clear denominators and content for a tidy basis vector
    ParamPoly common(Int(1));
    for (auto& c : x)
      if (!c.is_zero()) common = div_exact(common * c.den, poly_gcd(common, c.den));
    for (auto& c : x) c = c * CoefField(common);
    ParamPoly g;
    for (auto& c : x) g = poly_gcd(g, c.num);
    if (!g.is_zero() && !(g == ParamPoly(Int(1))))
      for (auto& c : x) c = c / CoefField(g);
    basis.push_back(std::move(x));
  }
  return {basis, generic};
}

inline SolutionSpace assemble(const Ansatz& ansatz,
                              const std::vector<std::vector<CoefField>>& null_basis,
                              std::vector<std::string> generic) {
  SolutionSpace out;
  out.genericity = std::move(generic);
  for (auto& x : null_basis) {
    VectorFunction v = ansatz.pool.front();
    for (auto& c : v.comps) c = DiffExpr();
    for (size_t k = 0; k < x.size(); ++k) {
      if (x[k].is_zero()) continue;
      v = v + x[k] * ansatz.pool[k];
    }
    out.basis.push_back(std::move(v));
  }
  return out;
}

inline std::vector<std::string> fresh_unknowns(size_t n, const VarTable& vt) {
  std::vector<std::string> u;
  for (size_t k = 0; k < n; ++k) u.push_back("_k" + std::to_string(k));
  for (auto& name : u)
    if (vt.is_param(name)) throw ExprError("reserved unknown name collides with a parameter");
  return u;
}

inline VectorFunction combine(const Ansatz& ansatz, const std::vector<std::string>& unknowns) {
  VectorFunction v = ansatz.pool.front();
  for (auto& c : v.comps) c = DiffExpr();
  for (size_t k = 0; k < ansatz.pool.size(); ++k)
    v = v + CoefField::param(unknowns[k]) * ansatz.pool[k];
  return v;
}

}  // namespace detail

inline SolutionSpace solve_symmetries(const PDESystem& sys, const Ansatz& ansatz) {
  if (ansatz.pool.empty()) return {};
  auto unknowns = detail::fresh_unknowns(ansatz.pool.size(), sys.vt);
  VectorFunction P = detail::combine(ansatz, unknowns);
  std::vector<DiffExpr> residuals;
  for (auto& g : sys.frechet_G(P)) residuals.push_back(sys.restrict(g));
  auto ls = detail::split_by_monomials(residuals, unknowns);
  auto [basis, generic] = detail::nullspace(std::move(ls));
  return detail::assemble(ansatz, basis, std::move(generic));
}

inline SolutionSpace solve_adjoint_symmetries(const PDESystem& sys, const Ansatz& ansatz) {
  if (ansatz.pool.empty()) return {};
  auto unknowns = detail::fresh_unknowns(ansatz.pool.size(), sys.vt);
  VectorFunction Q = detail::combine(ansatz, unknowns);
  std::vector<DiffExpr> residuals;
  for (auto& g : sys.adjoint_frechet_G(Q)) residuals.push_back(sys.restrict(g));
  auto ls = detail::split_by_monomials(residuals, unknowns);
  auto [basis, generic] = detail::nullspace(std::move(ls));
  return detail::assemble(ansatz, basis, std::move(generic));
}

inline SolutionSpace solve_multipliers(const PDESystem& sys, const Ansatz& ansatz) {
  if (ansatz.pool.empty()) return {};
  auto unknowns = detail::fresh_unknowns(ansatz.pool.size(), sys.vt);
  VectorFunction Q = detail::combine(ansatz, unknowns);
  std::vector<DiffExpr> residuals;
  for (auto& g : sys.adjoint_frechet_G(Q)) residuals.push_back(sys.restrict(g));
  DiffExpr s;
  for (size_t A = 0; A < sys.eqs.size(); ++A) s = s + Q.comps[A] * sys.eqs[A];
  for (int a = 0; a < sys.ndep(); ++a) residuals.push_back(euler(s, a));
  auto ls = detail::split_by_monomials(residuals, unknowns);
  auto [basis, generic] = detail::nullspace(std::move(ls));
  return detail::assemble(ansatz, basis, std::move(generic));
}

}  // namespace jetsym
