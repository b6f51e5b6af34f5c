#pragma once

#include "jetsym/actions.hpp"

#include <optional>

namespace jetsym {

namespace linalg {

using Vec = std::vector<CoefField>;
using Mat = std::vector<Vec>;  // row-major

/// Reduced row echelon form; returns pivot column per pivot row.
inline std::vector<size_t> rref(Mat& A) {
  std::vector<size_t> pivots;
  if (A.empty()) return pivots;
  size_t rows = A.size(), cols = A[0].size(), r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = rows;
    for (size_t i = r; i < rows; ++i)
      if (!A[i][c].is_zero()) {
        sel = i;
        break;
      }
    if (sel == rows) continue;
    std::swap(A[r], A[sel]);
    CoefField inv = CoefField(1) / A[r][c];
    for (size_t j = c; j < cols; ++j) A[r][j] = inv * A[r][j];
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c].is_zero()) continue;
      CoefField f = A[i][c];
      for (size_t j = c; j < cols; ++j) A[i][j] = A[i][j] - f * A[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline size_t rank(Mat A) { return rref(A).size(); }

/// One solution of A x = b with non-pivot variables set to zero; nullopt if
/// inconsistent.
inline std::optional<Vec> solve(Mat A, const Vec& b) {
  size_t rows = A.size(), cols = A.empty() ? 0 : A[0].size();
  for (size_t i = 0; i < rows; ++i) A[i].push_back(b[i]);
  std::vector<size_t> piv = rref(A);
  Vec x(cols);
  for (size_t k = 0; k < piv.size(); ++k) {
    if (piv[k] == cols) return std::nullopt;  // pivot in the augmented column
    x[piv[k]] = A[k][cols];
  }
  // consistency for zero rows
  for (size_t i = piv.size(); i < rows; ++i)
    if (!A[i][cols].is_zero()) return std::nullopt;
  return x;
}

/// Basis of the nullspace of A.
inline std::vector<Vec> kernel(Mat A) {
  size_t cols = A.empty() ? 0 : A[0].size();
  std::vector<size_t> piv = rref(A);
  std::vector<int> pivot_row(cols, -1);
  for (size_t k = 0; k < piv.size(); ++k) pivot_row[piv[k]] = static_cast<int>(k);
  std::vector<Vec> out;
  for (size_t f = 0; f < cols; ++f) {
    if (pivot_row[f] >= 0) continue;
    Vec v(cols);
    v[f] = CoefField(1);
    for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -A[k][f];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace linalg

/// Coordinates of v in a list of vector functions; nullopt if outside the span.
inline std::optional<linalg::Vec> coords_in_basis(const VectorFunction& v,
                                                  const std::vector<VectorFunction>& basis) {
  if (basis.empty()) return v.is_zero() ? std::optional<linalg::Vec>(linalg::Vec{}) : std::nullopt;
  std::map<std::pair<size_t, Monomial>, size_t> keys;
  auto index_keys = [&](const VectorFunction& f) {
    for (size_t c = 0; c < f.size(); ++c)
      for (auto& [m, coef] : f.comps[c].terms) keys.emplace(std::make_pair(c, m), 0);
  };
  for (auto& bfn : basis) index_keys(bfn);
  index_keys(v);
  size_t n = 0;
  for (auto& [k, idx] : keys) idx = n++;
  linalg::Mat A(n, linalg::Vec(basis.size()));
  linalg::Vec b(n);
  for (size_t j = 0; j < basis.size(); ++j)
    for (size_t c = 0; c < basis[j].size(); ++c)
      for (auto& [m, coef] : basis[j].comps[c].terms) A[keys[{c, m}]][j] = coef;
  for (size_t c = 0; c < v.size(); ++c)
    for (auto& [m, coef] : v.comps[c].terms) b[keys[{c, m}]] = coef;
  return linalg::solve(std::move(A), b);
}

inline bool basis_independent(const std::vector<VectorFunction>& basis) {
  if (basis.empty()) return true;
  std::map<std::pair<size_t, Monomial>, size_t> keys;
  for (auto& bfn : basis)
    for (size_t c = 0; c < bfn.size(); ++c)
      for (auto& [m, coef] : bfn.comps[c].terms) keys.emplace(std::make_pair(c, m), 0);
  size_t n = 0;
  for (auto& [k, idx] : keys) idx = n++;
  linalg::Mat A(n, linalg::Vec(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j)
    for (size_t c = 0; c < basis[j].size(); ++c)
      for (auto& [m, coef] : basis[j].comps[c].terms) A[keys[{c, m}]][j] = coef;
  return linalg::rank(std::move(A)) == basis.size();
}

/// Symmetry Lie algebra represented by a basis with exact structure constants:
/// [P_i, P_j] = sum_k c[i][j][k] P_k.
struct SymmetryAlgebra {
  std::vector<VectorFunction> basis;
  std::vector<std::vector<linalg::Vec>> c;
};

inline SymmetryAlgebra structure_constants(const std::vector<VectorFunction>& basis) {
  if (!basis_independent(basis)) throw ExprError("symmetry basis is linearly dependent");
  SymmetryAlgebra alg;
  alg.basis = basis;
  size_t n = basis.size();
  alg.c.assign(n, std::vector<linalg::Vec>(n, linalg::Vec(n)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      auto co = coords_in_basis(commutator(basis[i], basis[j]), basis);
      if (!co)
        throw ExprError("basis not closed under commutator at pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      alg.c[i][j] = *co;
      for (size_t k = 0; k < n; ++k) alg.c[j][i][k] = -(*co)[k];
    }
  // Jacobi identity on the structure constants
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k)
        for (size_t m = 0; m < n; ++m) {
          CoefField s;
          for (size_t l = 0; l < n; ++l)
            s = s + alg.c[j][k][l] * alg.c[i][l][m] + alg.c[k][i][l] * alg.c[j][l][m] +
                alg.c[i][j][l] * alg.c[k][l][m];
          if (!s.is_zero()) throw ExprError("Jacobi identity fails on structure constants");
        }
  return alg;
}

/// Dispatch on the action tag (1, 2, 3).
inline VectorFunction apply_action(const PDESystem& sys, int tag, const VectorFunction& P,
                                   const VectorFunction& Q) {
  switch (tag) {
    case 1: return action1(sys, P, Q);
    case 2: return action2(sys, P, Q);
    case 3: return action3(sys, P, Q);
  }
  throw ExprError("unknown action tag");
}

/// Matrix of the dual map S_Q over fixed bases: column j holds the
/// adjoint-symmetry-basis coordinates of action(P_j, Q).
struct DualMapMatrix {
  int tag{0};
  VectorFunction Q;
  linalg::Mat M;                   // rows: adj basis, cols: symm basis
  std::vector<linalg::Vec> ker;    // coordinates in the symmetry basis
  std::vector<linalg::Vec> range;  // coordinates in the adjoint-symmetry basis
};

inline DualMapMatrix dual_map(const PDESystem& sys, int tag, const VectorFunction& Q,
                              const std::vector<VectorFunction>& symm,
                              const std::vector<VectorFunction>& adj) {
  if (!basis_independent(symm) || !basis_independent(adj)) throw ExprError("bases must be independent");
  DualMapMatrix d;
  d.tag = tag;
  d.Q = Q;
  d.M.assign(adj.size(), linalg::Vec(symm.size()));
  for (size_t j = 0; j < symm.size(); ++j) {
    auto co = coords_in_basis(apply_action(sys, tag, symm[j], Q), adj);
    if (!co) throw ExprError("action output escapes the adjoint-symmetry basis span");
    for (size_t i = 0; i < adj.size(); ++i) d.M[i][j] = (*co)[i];
  }
  d.ker = linalg::kernel(d.M);
  // column space: pivot columns of M
  linalg::Mat A = d.M;
  std::vector<size_t> piv = linalg::rref(A);
  for (size_t c : piv) {
    linalg::Vec col(adj.size());
    for (size_t i = 0; i < adj.size(); ++i) col[i] = d.M[i][c];
    d.range.push_back(std::move(col));
  }
  return d;
}

/// dim AdjSymm + dim ker(S_Q) = dim Symm, i.e. S_Q surjective onto AdjSymm.
inline bool dimension_condition(const DualMapMatrix& d, size_t adj_dim, size_t symm_dim) {
  return adj_dim + d.ker.size() == symm_dim;
}

inline VectorFunction from_coords(const linalg::Vec& x, const std::vector<VectorFunction>& basis) {
  VectorFunction v = VectorFunction::zero(basis.front().space, basis.front().size());
  for (size_t j = 0; j < basis.size(); ++j)
    if (!x[j].is_zero()) v = v + x[j] * basis[j];
  return v;
}

/// ad-invariance of a kernel inside the algebra, via structure constants.
inline bool is_ideal(const std::vector<linalg::Vec>& kernel_coords, const SymmetryAlgebra& alg) {
  size_t n = alg.basis.size();
  if (kernel_coords.empty()) return true;
  linalg::Mat K(n, linalg::Vec(kernel_coords.size()));
  for (size_t j = 0; j < kernel_coords.size(); ++j)
    for (size_t i = 0; i < n; ++i) K[i][j] = kernel_coords[j][i];
  for (size_t i = 0; i < n; ++i)
    for (auto& v : kernel_coords) {
      linalg::Vec w(n);
      for (size_t j = 0; j < n; ++j) {
        if (v[j].is_zero()) continue;
        for (size_t k = 0; k < n; ++k) w[k] = w[k] + v[j] * alg.c[i][j][k];
      }
      if (!linalg::solve(K, w)) return false;
    }
  return true;
}

/// Obstruction conditions for well-definedness of the commutator bracket under
/// actions 2 and 3 (action 1 kernels are automatically subalgebras).
inline bool subalgebra_conditions(const PDESystem& sys, int tag, const VectorFunction& Q,
                                  const std::vector<VectorFunction>& kernel_elems) {
  if (tag == 1) return true;
  auto [okQ, RQ] = sys.is_adjoint_symmetry(Q);
  if (!okQ) throw ExprError("subalgebra_conditions: Q is not an adjoint-symmetry");
  LinDiffOp RQs = adjoint_op(RQ);
  for (size_t a = 0; a < kernel_elems.size(); ++a)
    for (size_t b = a + 1; b < kernel_elems.size(); ++b) {
      const VectorFunction& P1 = kernel_elems[a];
      const VectorFunction& P2 = kernel_elems[b];
      std::vector<DiffExpr> cond = prolong_apply_op(P2, RQs).apply(P1.comps);
      std::vector<DiffExpr> t2 = prolong_apply_op(P1, RQs).apply(P2.comps);
      for (size_t A = 0; A < cond.size(); ++A) cond[A] = cond[A] - t2[A];
      if (tag == 2) {
        auto [ok1, RP1] = sys.is_symmetry(P1);
        auto [ok2, RP2] = sys.is_symmetry(P2);
        if (!ok1 || !ok2) throw ExprError("kernel element is not a symmetry");
        std::vector<DiffExpr> s1 = adjoint_op(RP2).apply(action1(sys, P1, Q).comps);
        std::vector<DiffExpr> s2 = adjoint_op(RP1).apply(action1(sys, P2, Q).comps);
        for (size_t A = 0; A < cond.size(); ++A) cond[A] = cond[A] + s1[A] - s2[A];
      }
      for (auto& e : cond)
        if (!sys.restrict(e).is_zero()) return false;
    }
  return true;
}

/// Weight grading by ad of a scaling element whose adjoint action is diagonal
/// on the algebra basis.
struct ScalingDecomposition {
  std::vector<CoefField> weights;   // per algebra basis element
  std::vector<size_t> complement;   // indices with weights disjoint from the kernel's
  std::vector<CoefField> kernel_weights;
};

inline ScalingDecomposition scaling_decomposition(const SymmetryAlgebra& alg, size_t scal_index,
                                                  const std::vector<linalg::Vec>& kernel_coords) {
  size_t n = alg.basis.size();
  if (scal_index >= n) throw ExprError("scaling element index out of range");
  ScalingDecomposition sd;
  sd.weights.resize(n);
  for (size_t j = 0; j < n; ++j) {
    // ad(P_scal) P_j = [P_scal, P_j] must be a multiple of P_j
    for (size_t k = 0; k < n; ++k)
      if (k != j && !alg.c[scal_index][j][k].is_zero())
        throw ExprError("ad of the scaling element is not diagonal on the basis");
    sd.weights[j] = alg.c[scal_index][j][j];
  }
  auto has_weight = [&](const CoefField& w, const std::vector<CoefField>& set) {
    for (auto& s : set)
      if (s == w) return true;
    return false;
  };
  for (auto& v : kernel_coords)
    for (size_t j = 0; j < n; ++j)
      if (!v[j].is_zero() && !has_weight(sd.weights[j], sd.kernel_weights))
        sd.kernel_weights.push_back(sd.weights[j]);
  for (size_t j = 0; j < n; ++j)
    if (!has_weight(sd.weights[j], sd.kernel_weights)) sd.complement.push_back(j);
  if (sd.complement.size() + kernel_coords.size() != n)
    throw ExprError("no canonical complement: scaling weights overlap");
  return sd;
}

/// Everything needed to evaluate the adjoint-symmetry brackets for one (tag, Q):
/// the dual-map matrix, the symmetry algebra, and a certified preimage rule.
struct BracketContext {
  const PDESystem* sys{nullptr};
  int tag{0};
  VectorFunction Q;
  std::vector<VectorFunction> symm, adj;
  SymmetryAlgebra alg;
  DualMapMatrix dmap;
  std::string certificate;             // "ideal" or "scaling"
  std::vector<size_t> preimage_cols;   // symmetry-basis columns used for preimages
  bool noncommutator_ok{false};        // S_P = 0 for all kernel P, or scaling route
};

inline BracketContext make_bracket_context(const PDESystem& sys, int tag, const VectorFunction& Q,
                                           const std::vector<VectorFunction>& symm,
                                           const std::vector<VectorFunction>& adj,
                                           std::optional<size_t> scaling_index = std::nullopt) {
  BracketContext ctx;
  ctx.sys = &sys;
  ctx.tag = tag;
  ctx.Q = Q;
  ctx.symm = symm;
  ctx.adj = adj;
  ctx.alg = structure_constants(symm);
  ctx.dmap = dual_map(sys, tag, Q, symm, adj);

  std::vector<VectorFunction> kernel_elems;
  for (auto& v : ctx.dmap.ker) kernel_elems.push_back(from_coords(v, symm));

  bool ideal = is_ideal(ctx.dmap.ker, ctx.alg) &&
               (ctx.dmap.ker.size() <= 1 || subalgebra_conditions(sys, tag, Q, kernel_elems));
  if (ideal) {
    ctx.certificate = "ideal";
    for (size_t j = 0; j < symm.size(); ++j) ctx.preimage_cols.push_back(j);
  } else if (scaling_index) {
    ScalingDecomposition sd = scaling_decomposition(ctx.alg, *scaling_index, ctx.dmap.ker);
    ctx.certificate = "scaling";
    ctx.preimage_cols = sd.complement;
  } else {
    throw ExprError("ill-defined bracket: kernel is not an ideal and no scaling decomposition given");
  }

  // admissibility of the non-commutator bracket: S_P = 0 for kernel P
  ctx.noncommutator_ok = true;
  for (auto& P : kernel_elems)
    for (auto& Qb : adj)
      if (!apply_action(sys, tag, P, Qb).is_zero()) ctx.noncommutator_ok = false;
  if (!ctx.noncommutator_ok && ctx.certificate == "scaling") ctx.noncommutator_ok = true;
  return ctx;
}

/// Preimage of Qa under S_Q within the certified column set.
inline VectorFunction bracket_preimage(const BracketContext& ctx, const VectorFunction& Qa) {
  auto yco = coords_in_basis(Qa, ctx.adj);
  if (!yco) throw ExprError("bracket argument outside the adjoint-symmetry basis span");
  linalg::Mat A(ctx.adj.size(), linalg::Vec(ctx.preimage_cols.size()));
  for (size_t i = 0; i < ctx.adj.size(); ++i)
    for (size_t j = 0; j < ctx.preimage_cols.size(); ++j) A[i][j] = ctx.dmap.M[i][ctx.preimage_cols[j]];
  auto x = linalg::solve(std::move(A), *yco);
  if (!x) throw ExprError("bracket argument outside the range of S_Q");
  linalg::Vec full(ctx.symm.size());
  for (size_t j = 0; j < ctx.preimage_cols.size(); ++j) full[ctx.preimage_cols[j]] = (*x)[j];
  return from_coords(full, ctx.symm);
}

/// ^Q[Q_a, Q_b] = S_Q([S_Q^{-1} Q_a, S_Q^{-1} Q_b]).
inline VectorFunction commutator_bracket(const BracketContext& ctx, const VectorFunction& Qa,
                                         const VectorFunction& Qb) {
  VectorFunction Pa = bracket_preimage(ctx, Qa);
  VectorFunction Pb = bracket_preimage(ctx, Qb);
  return apply_action(*ctx.sys, ctx.tag, commutator(Pa, Pb), ctx.Q);
}

/// ^Q(Q_1, Q_2) = S_{Q_1}(S_Q^{-1} Q_2); Q_1 any adjoint-symmetry.
inline VectorFunction noncommutator_bracket(const BracketContext& ctx, const VectorFunction& Q1,
                                            const VectorFunction& Q2) {
  if (!ctx.noncommutator_ok)
    throw ExprError("ill-defined non-commutator bracket: S_P != 0 on the kernel and no scaling route");
  VectorFunction P2 = bracket_preimage(ctx, Q2);
  return apply_action(*ctx.sys, ctx.tag, P2, Q1);
}

/// Symmetrized (+) and antisymmetrized (-) variants of the non-commutator bracket.
inline std::pair<VectorFunction, VectorFunction> noncommutator_bracket_pm(
    const BracketContext& ctx, const VectorFunction& Q1, const VectorFunction& Q2) {
  VectorFunction a = noncommutator_bracket(ctx, Q1, Q2);
  VectorFunction b = noncommutator_bracket(ctx, Q2, Q1);
  CoefField half = CoefField(Rat(Int(1), Int(2)));
  return {half * (a + b), half * (a - b)};
}

/// Bracket table on adjoint-symmetry images of a Lie subalgebra (the pull-back
/// of the subalgebra's structure); requires ker(S_Q) to meet the subalgebra
/// trivially.
struct BracketTable {
  std::vector<VectorFunction> images;                 // S_Q(A_a)
  std::vector<std::vector<linalg::Vec>> values;       // coords of ^Q[img_a, img_b] in adj basis
};

inline BracketTable subalgebra_bracket(const PDESystem& sys, int tag, const VectorFunction& Q,
                                       const std::vector<VectorFunction>& subalg,
                                       const std::vector<VectorFunction>& adj) {
  structure_constants(subalg);  // verifies subalgebra closure
  BracketTable t;
  linalg::Mat A(adj.size(), linalg::Vec(subalg.size()));
  for (size_t j = 0; j < subalg.size(); ++j) {
    VectorFunction img = apply_action(sys, tag, subalg[j], Q);
    auto co = coords_in_basis(img, adj);
    if (!co) throw ExprError("subalgebra image escapes the adjoint-symmetry basis span");
    for (size_t i = 0; i < adj.size(); ++i) A[i][j] = (*co)[i];
    t.images.push_back(std::move(img));
  }
  if (linalg::rank(A) != subalg.size())
    throw ExprError("condition violated: ker(S_Q) intersects the subalgebra");
  size_t n = subalg.size();
  t.values.assign(n, std::vector<linalg::Vec>(n));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b) {
      VectorFunction val = apply_action(sys, tag, commutator(subalg[a], subalg[b]), Q);
      auto co = coords_in_basis(val, adj);
      if (!co) throw ExprError("bracket value escapes the adjoint-symmetry basis span");
      t.values[a][b] = *co;
    }
  return t;
}

}  // namespace jetsym
