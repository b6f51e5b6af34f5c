#pragma once

#include "jetsym/pdesys.hpp"

namespace jetsym {

/// Spatial functional F = int f dx in one spatial variable, stored via the
/// deterministic integration-by-parts canonical form of the density.
/// Equality is decided by the Euler operator (densities modulo total
/// x-derivatives; boundary terms discarded).
struct Functional {
  int x{0};
  DiffExpr density;  // canonical representative
  DiffExpr witness;  // original = density + D_x(witness)

  Functional() = default;
  Functional(const DiffExpr& d, int xvar) : x(xvar) {
    auto [canon, w] = ibp_canonical(d, xvar);
    density = canon;
    witness = w;
  }

  bool is_zero(int ndep) const {
    for (int a = 0; a < ndep; ++a)
      if (!euler(density, a).is_zero()) return false;
    return true;
  }
  bool equals(const Functional& o, int ndep) const {
    if (x != o.x) return false;
    DiffExpr d = density - o.density;
    for (int a = 0; a < ndep; ++a)
      if (!euler(d, a).is_zero()) return false;
    return true;
  }
  friend Functional operator+(const Functional& a, const Functional& b) {
    return Functional(a.density + b.density, a.x);
  }
  friend Functional operator-(const Functional& a, const Functional& b) {
    return Functional(a.density - b.density, a.x);
  }
  friend Functional operator*(const CoefField& s, const Functional& a) {
    return Functional(s * a.density, a.x);
  }
};

/// Noether operator from the third symmetry action: J_3 = Q' + R_Q^*.
/// Maps symmetries to adjoint-symmetries.
inline LinDiffOp noether_J3(const PDESystem& sys, const VectorFunction& Q) {
  auto [ok, RQ] = sys.is_adjoint_symmetry(Q);
  if (!ok) throw ExprError("noether_J3: Q is not an adjoint-symmetry");
  return frechet_op(Q.comps, sys.ndep()) + adjoint_op(RQ);
}

/// Evolution-form Noether operator J = Q' - Q'^* (skew by construction);
/// Q evolutionary and dep-var indexed.
inline LinDiffOp evol_noether(const EvolutionSystem& es, const VectorFunction& Q) {
  if (Q.space != VectorFunction::DepVars) throw ExprError("evol_noether: Q must be dep-var indexed");
  for (auto& c : Q.comps)
    for (auto& v : c.jet_vars())
      if (v.kind == JetVar::Dep)
        for (int i : v.deriv)
          if (i == es.t_index) throw ExprError("evol_noether: Q contains a time derivative");
  LinDiffOp Qp = frechet_op(Q.comps, es.sys.ndep());
  return Qp - adjoint_op(Qp);
}

/// Structure relation G'^*(J_3(P)) = J_3^*(G'(P)) on the solution space.
inline bool structure_relation_check(const PDESystem& sys, const VectorFunction& Q,
                                     const VectorFunction& P) {
  LinDiffOp J3 = noether_J3(sys, Q);
  auto [okP, RP] = sys.is_symmetry(P);
  if (!okP) throw ExprError("structure_relation_check: P is not a symmetry");
  std::vector<DiffExpr> lhs = adjoint_frechet(sys.eqs, sys.ndep(), J3.apply(P.comps));
  std::vector<DiffExpr> rhs = adjoint_op(J3).apply(sys.frechet_G(P));
  for (size_t a = 0; a < lhs.size(); ++a)
    if (!sys.restrict(lhs[a] - rhs[a]).is_zero()) return false;
  return true;
}

namespace detail {

inline int spatial_index(const EvolutionSystem& es) {
  if (es.sys.nindep() != 2) throw ExprError("one spatial variable required");
  return es.t_index == 0 ? 1 : 0;
}

inline void require_evolutionary(const EvolutionSystem& es, const VectorFunction& F,
                                 const std::string& what) {
  for (auto& c : F.comps)
    for (auto& v : c.jet_vars())
      if (v.kind == JetVar::Dep)
        for (int i : v.deriv)
          if (i == es.t_index) throw ExprError(what + " contains a time derivative");
}

}  // namespace detail

/// Integral pairing <Q, P> = int Q_alpha P^alpha dx.
inline Functional pairing(const EvolutionSystem& es, const VectorFunction& Q,
                          const VectorFunction& P) {
  detail::require_evolutionary(es, Q, "Q");
  detail::require_evolutionary(es, P, "P");
  if (Q.size() != P.size()) throw ExprError("pairing size mismatch");
  DiffExpr d;
  for (size_t a = 0; a < Q.size(); ++a) d = d + Q.comps[a] * P.comps[a];
  return Functional(d, detail::spatial_index(es));
}

/// Symplectic 2-form omega_Q(P1, P2) = int (P1.Q'(P2) - P2.Q'(P1)) dx.
inline Functional symplectic_form(const EvolutionSystem& es, const VectorFunction& Q,
                                  const VectorFunction& P1, const VectorFunction& P2) {
  detail::require_evolutionary(es, Q, "Q");
  detail::require_evolutionary(es, P1, "P1");
  detail::require_evolutionary(es, P2, "P2");
  DiffExpr d;
  for (size_t a = 0; a < Q.size(); ++a)
    d = d + P1.comps[a] * frechet(Q.comps[a], P2) - P2.comps[a] * frechet(Q.comps[a], P1);
  return Functional(d, detail::spatial_index(es));
}

/// Closure of omega_Q as the exterior derivative on vertical vector fields:
/// pr X_{f1} omega_Q(f2, f3) - omega_Q([f1, f2], f3) + cyclic = 0 as
/// functionals. The bracket terms vanish for u-independent arguments but are
/// required for general ones.
inline bool closure_check(const EvolutionSystem& es, const VectorFunction& Q,
                          const VectorFunction& f1, const VectorFunction& f2,
                          const VectorFunction& f3) {
  auto density = [&](const VectorFunction& a, const VectorFunction& b) {
    DiffExpr d;
    for (size_t al = 0; al < Q.size(); ++al)
      d = d + a.comps[al] * frechet(Q.comps[al], b) - b.comps[al] * frechet(Q.comps[al], a);
    return d;
  };
  DiffExpr cyc = prolong_apply(f3, density(f1, f2)) + prolong_apply(f1, density(f2, f3)) +
                 prolong_apply(f2, density(f3, f1)) - density(commutator(f1, f2), f3) -
                 density(commutator(f2, f3), f1) - density(commutator(f3, f1), f2);
  for (int a = 0; a < es.sys.ndep(); ++a)
    if (!euler(cyc, a).is_zero()) return false;
  return true;
}

/// Inverse-free Hamiltonian check: u_t = -D^{-1}(delta H / delta u) holds iff
/// D(g) = -E_u(H density) identically.
inline bool hamiltonian_check(const EvolutionSystem& es, const Functional& H, const LinDiffOp& D) {
  for (auto& [I, m] : D.coef)
    for (auto& row : m)
      for (auto& e : row)
        if (!e.jet_vars().empty()) throw ExprError("hamiltonian_check: D must have constant coefficients");
  if (D.rows != es.sys.ndep() || D.cols != es.sys.ndep())
    throw ExprError("hamiltonian_check: operator shape mismatch");
  std::vector<DiffExpr> lhs = D.apply(es.g);
  for (int a = 0; a < es.sys.ndep(); ++a)
    if (!(lhs[a] + euler(H.density, a)).is_zero()) return false;
  return true;
}

namespace detail {

/// Polynomial preimage of D_x^k with constant scale: J = c D_x^k.
/// Throws when the argument is not an exact k-fold x-derivative.
inline DiffExpr jop_preimage(const LinDiffOp& J, const DiffExpr& e, int x) {
  if (J.rows != 1 || J.cols != 1) throw ExprError("preimage supports scalar operators only");
  LinDiffOp Jn = J;
  Jn.normalize();
  if (Jn.coef.size() != 1) throw ExprError("not computable: operator is not a single c*D_x^k term");
  auto& [I, m] = *Jn.coef.begin();
  for (int i : I)
    if (i != x) throw ExprError("not computable: non-spatial derivatives in the operator");
  const DiffExpr& cexpr = m[0][0];
  if (cexpr.terms.size() != 1 || !cexpr.terms.begin()->first.empty())
    throw ExprError("not computable: operator coefficient is not constant");
  CoefField c = cexpr.terms.begin()->second;
  DiffExpr r = (CoefField(1) / c) * e;
  for (size_t k = 0; k < I.size(); ++k) {
    auto [canon, W] = ibp_canonical(r, x);
    if (!canon.is_zero()) throw ExprError("not computable: no polynomial preimage exists");
    r = W;
  }
  return r;
}

}  // namespace detail

/// Poisson bracket {F1, F2} = int E_u(f1) J^{-1} E_u(f2) dx with an explicit
/// polynomial preimage for J^{-1} (scalar case).
inline Functional poisson_bracket(const EvolutionSystem& es, const LinDiffOp& J,
                                  const Functional& F1, const Functional& F2) {
  if (es.sys.ndep() != 1) throw ExprError("poisson_bracket implemented for scalar systems");
  int x = detail::spatial_index(es);
  DiffExpr e1 = euler(F1.density, 0);
  DiffExpr e2 = euler(F2.density, 0);
  DiffExpr pre = detail::jop_preimage(J, e2, x);
  return Functional(e1 * pre, x);
}

/// Skewness of {.,.} and the Jacobi identity on three functionals, computed
/// with explicit preimages (functional-zero residuals).
inline bool poisson_skew_jacobi_check(const EvolutionSystem& es, const LinDiffOp& J,
                                      const Functional& F1, const Functional& F2,
                                      const Functional& F3) {
  int m = es.sys.ndep();
  auto pb = [&](const Functional& A, const Functional& B) { return poisson_bracket(es, J, A, B); };
  if (!(pb(F1, F2) + pb(F2, F1)).is_zero(m)) return false;
  if (!(pb(F1, F3) + pb(F3, F1)).is_zero(m)) return false;
  if (!(pb(F2, F3) + pb(F3, F2)).is_zero(m)) return false;
  Functional jac = pb(F1, pb(F2, F3)) + pb(F2, pb(F3, F1)) + pb(F3, pb(F1, F2));
  return jac.is_zero(m);
}

}  // namespace jetsym
