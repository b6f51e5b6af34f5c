#pragma once

#include "jetsym/pdesys.hpp"

#include <array>
#include <utility>

namespace jetsym {

/// First symmetry action on adjoint-symmetries: Q'(P) + R_P^*(Q).
/// Inputs are verified (fail-fast); the result is again an adjoint-symmetry.
inline VectorFunction action1(const PDESystem& sys, const VectorFunction& P, const VectorFunction& Q) {
  auto [okP, RP] = sys.is_symmetry(P);
  if (!okP) throw ExprError("action1: P is not a symmetry");
  auto [okQ, RQ] = sys.is_adjoint_symmetry(Q);
  if (!okQ) throw ExprError("action1: Q is not an adjoint-symmetry");
  std::vector<DiffExpr> out = adjoint_op(RP).apply(Q.comps);
  for (size_t A = 0; A < out.size(); ++A) out[A] = out[A] + frechet(Q.comps[A], P);
  return VectorFunction(VectorFunction::Equations, std::move(out));
}

/// Second symmetry action: R_P^*(Q) - R_Q^*(P); lands in multipliers.
inline VectorFunction action2(const PDESystem& sys, const VectorFunction& P, const VectorFunction& Q) {
  auto [okP, RP] = sys.is_symmetry(P);
  if (!okP) throw ExprError("action2: P is not a symmetry");
  auto [okQ, RQ] = sys.is_adjoint_symmetry(Q);
  if (!okQ) throw ExprError("action2: Q is not an adjoint-symmetry");
  std::vector<DiffExpr> a = adjoint_op(RP).apply(Q.comps);
  std::vector<DiffExpr> b = adjoint_op(RQ).apply(P.comps);
  for (size_t A = 0; A < a.size(); ++A) a[A] = a[A] - b[A];
  return VectorFunction(VectorFunction::Equations, std::move(a));
}

/// Third symmetry action: Q'(P) + R_Q^*(P) = action1 - action2.
inline VectorFunction action3(const PDESystem& sys, const VectorFunction& P, const VectorFunction& Q) {
  auto [okP, RP] = sys.is_symmetry(P);
  if (!okP) throw ExprError("action3: P is not a symmetry");
  auto [okQ, RQ] = sys.is_adjoint_symmetry(Q);
  if (!okQ) throw ExprError("action3: Q is not an adjoint-symmetry");
  std::vector<DiffExpr> out = adjoint_op(RQ).apply(P.comps);
  for (size_t A = 0; A < out.size(); ++A) out[A] = out[A] + frechet(Q.comps[A], P);
  return VectorFunction(VectorFunction::Equations, std::move(out));
}

/// Classical action on conservation-law multipliers; coincides with action1.
inline VectorFunction multiplier_action(const PDESystem& sys, const VectorFunction& P,
                                        const VectorFunction& Lambda) {
  if (!sys.is_multiplier(Lambda)) throw ExprError("multiplier_action: not a multiplier");
  return action1(sys, P, Lambda);
}

/// Lie point symmetry Y = xi^i d/dx^i + eta^alpha d/du^alpha with
/// coefficients depending only on (x, u).
struct PointSymmetry {
  std::vector<DiffExpr> xi;   // one per independent variable
  std::vector<DiffExpr> eta;  // one per dependent variable

  void validate(const PDESystem& sys) const {
    if (static_cast<int>(xi.size()) != sys.nindep() || static_cast<int>(eta.size()) != sys.ndep())
      throw ExprError("point symmetry component count mismatch");
    auto order0 = [](const DiffExpr& e) {
      for (auto& v : e.jet_vars())
        if (v.kind == JetVar::Dep && !v.deriv.empty()) return false;
      return true;
    };
    for (auto& c : xi)
      if (!order0(c)) throw ExprError("point symmetry xi depends on derivatives");
    for (auto& c : eta)
      if (!order0(c)) throw ExprError("point symmetry eta depends on derivatives");
  }

  /// Characteristic form P^alpha = eta^alpha - xi^i u^alpha_i.
  VectorFunction characteristic(const PDESystem& sys) const {
    validate(sys);
    std::vector<DiffExpr> P(sys.ndep());
    for (int a = 0; a < sys.ndep(); ++a) {
      P[a] = eta[a];
      for (int i = 0; i < sys.nindep(); ++i)
        P[a] = P[a] - xi[i] * DiffExpr::var(JetVar::dep(a, {i}));
    }
    return VectorFunction(VectorFunction::DepVars, std::move(P));
  }
};

/// pr Y_p f = xi^i D_i f + pr X_P f for the canonical vector field of ps.
inline DiffExpr prolong_point(const PDESystem& sys, const PointSymmetry& ps, const DiffExpr& f) {
  DiffExpr r = frechet(f, ps.characteristic(sys));
  for (int i = 0; i < sys.nindep(); ++i) r = r + ps.xi[i] * total_derivative(f, i);
  return r;
}

/// First action via the point-symmetry formula
/// pr Y_p(Q) + R_p^*(Q) + (D_i xi^i) Q, with pr Y_p(G) = R_p(G).
inline VectorFunction point_action1(const PDESystem& sys, const PointSymmetry& ps,
                                    const VectorFunction& Q) {
  ps.validate(sys);
  if (Q.space != VectorFunction::Equations || Q.size() != sys.eqs.size())
    throw ExprError("point_action1: Q must be equation-indexed");
  std::vector<DiffExpr> YG;
  for (auto& G : sys.eqs) YG.push_back(prolong_point(sys, ps, G));
  LinDiffOp Rp = sys.hadamard_factor(YG);
  std::vector<DiffExpr> out = adjoint_op(Rp).apply(Q.comps);
  DiffExpr divxi;
  for (int i = 0; i < sys.nindep(); ++i) divxi = divxi + total_derivative(ps.xi[i], i);
  for (size_t A = 0; A < out.size(); ++A)
    out[A] = out[A] + prolong_point(sys, ps, Q.comps[A]) + divxi * Q.comps[A];
  return VectorFunction(VectorFunction::Equations, std::move(out));
}

/// Adjoint-symmetry of the special form Q_A = kappa_A(x,u) + rho^i_{A alpha}(x,u) u^alpha_i,
/// together with the verified factorization G'^*(Q) = rho^i D_i G + K G.
struct FirstOrderLinearAdjointSymmetry {
  VectorFunction Q;
  std::vector<DiffExpr> kappa;                          // [A]
  std::vector<std::vector<std::vector<DiffExpr>>> rho;  // [i][A][alpha]
  std::vector<std::vector<DiffExpr>> K;                 // [A][alpha]

  static FirstOrderLinearAdjointSymmetry make(const PDESystem& sys, const VectorFunction& Qin) {
    if (Qin.space != VectorFunction::Equations || Qin.size() != sys.eqs.size())
      throw ExprError("first-order linear form: Q must be equation-indexed");
    FirstOrderLinearAdjointSymmetry f;
    f.Q = Qin;
    int n = sys.nindep(), m = sys.ndep(), ne = sys.neq();
    f.kappa.assign(ne, DiffExpr());
    f.rho.assign(n, std::vector<std::vector<DiffExpr>>(ne, std::vector<DiffExpr>(m)));
    for (int A = 0; A < ne; ++A) {
      for (auto& [mono, c] : Qin.comps[A].terms) {
        std::optional<JetVar> first_order;
        for (auto& [v, e] : mono) {
          if (v.kind != JetVar::Dep || v.deriv.empty()) continue;
          if (v.deriv.size() != 1 || !(e == AffineExponent(1)) || first_order)
            throw ExprError("Q is not first-order linear");
          first_order = v;
        }
        if (!first_order) {
          f.kappa[A] = f.kappa[A] + DiffExpr::mono(mono, c);
        } else {
          Monomial rest = mono;
          rest.erase(*first_order);
          f.rho[first_order->deriv[0]][A][first_order->idx] =
              f.rho[first_order->deriv[0]][A][first_order->idx] + DiffExpr::mono(rest, c);
        }
      }
    }
    // verified factorization G'^*(Q) = rho^i D_i G + K G
    LinDiffOp R = sys.hadamard_factor(sys.adjoint_frechet_G(Qin));
    f.K.assign(ne, std::vector<DiffExpr>(m));
    for (auto& [I, mat] : R.coef) {
      if (I.size() > 1) throw ExprError("first-order linear factorization has order > 1");
      for (int a = 0; a < m; ++a)
        for (int A = 0; A < ne; ++A) {
          if (I.empty())
            f.K[A][a] = mat[a][A];
          else if (!(mat[a][A] == f.rho[I[0]][A][a]))
            throw ExprError("first-order linear factorization does not match rho");
        }
    }
    return f;
  }
};

/// Second and third actions via the explicit point-symmetry formulas for a
/// first-order linear adjoint-symmetry. Returns (action2, action3).
inline std::pair<VectorFunction, VectorFunction> point_action23(
    const PDESystem& sys, const PointSymmetry& ps, const FirstOrderLinearAdjointSymmetry& fq) {
  ps.validate(sys);
  int n = sys.nindep(), m = sys.ndep(), ne = sys.neq();
  std::vector<DiffExpr> YG;
  for (auto& G : sys.eqs) YG.push_back(prolong_point(sys, ps, G));
  LinDiffOp Rp = sys.hadamard_factor(YG);
  std::vector<DiffExpr> RpsQ = adjoint_op(Rp).apply(fq.Q.comps);
  DiffExpr divxi;
  for (int i = 0; i < n; ++i) divxi = divxi + total_derivative(ps.xi[i], i);

  std::vector<DiffExpr> a2(ne), a3(ne);
  for (int A = 0; A < ne; ++A) {
    // middle = u^alpha_j D_i(2 xi^[i rho^j]) + D_i(xi^i kappa + rho^i eta)
    DiffExpr middle;
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < n; ++j) {
        DiffExpr d;
        for (int i = 0; i < n; ++i)
          d = d + total_derivative(ps.xi[i] * fq.rho[j][A][a] - ps.xi[j] * fq.rho[i][A][a], i);
        middle = middle + DiffExpr::var(JetVar::dep(a, {j})) * d;
      }
    for (int i = 0; i < n; ++i) {
      DiffExpr s = ps.xi[i] * fq.kappa[A];
      for (int a = 0; a < m; ++a) s = s + fq.rho[i][A][a] * ps.eta[a];
      middle = middle + total_derivative(s, i);
    }
    // KP = K_{A alpha} (eta^alpha - xi^i u^alpha_i)
    DiffExpr KP;
    for (int a = 0; a < m; ++a) {
      DiffExpr P = ps.eta[a];
      for (int i = 0; i < n; ++i) P = P - ps.xi[i] * DiffExpr::var(JetVar::dep(a, {i}));
      KP = KP + fq.K[A][a] * P;
    }
    a2[A] = RpsQ[A] + middle - KP;
    a3[A] = prolong_point(sys, ps, fq.Q.comps[A]) + divxi * fq.Q.comps[A] - middle + KP;
  }
  return {VectorFunction(VectorFunction::Equations, std::move(a2)),
          VectorFunction(VectorFunction::Equations, std::move(a3))};
}

namespace detail {

/// Constant lambda with e = lambda * base, or throw.
inline CoefField proportionality(const DiffExpr& e, const DiffExpr& base, const std::string& what) {
  if (base.is_zero()) {
    if (!e.is_zero()) throw ExprError(what + ": not proportional (zero base)");
    return CoefField();
  }
  auto& [m0, c0] = *base.terms.begin();
  CoefField lam;
  auto it = e.terms.find(m0);
  if (it != e.terms.end()) lam = it->second / c0;
  if (!(e == lam * base)) throw ExprError(what + ": homogeneity hypothesis fails");
  return lam;
}

}  // namespace detail

/// Translation actions (Cor. of the point-symmetry formulas): direction a^i.
/// Requires Q and G free of explicit x^i-dependence along a. The first action
/// is identically zero; actions 2/3 use the first-order linear closed form
/// when it applies and the general route otherwise.
inline std::array<VectorFunction, 3> translation_actions(const PDESystem& sys,
                                                         const std::vector<CoefField>& a,
                                                         const VectorFunction& Q) {
  if (static_cast<int>(a.size()) != sys.nindep()) throw ExprError("one direction component per independent variable");
  auto invariant = [&](const DiffExpr& e, const std::string& what) {
    DiffExpr d;
    for (int i = 0; i < sys.nindep(); ++i) d = d + a[i] * e.partial(JetVar::indep(i));
    if (!d.is_zero()) throw ExprError(what + ": translation invariance fails");
  };
  for (size_t A = 0; A < sys.eqs.size(); ++A) invariant(sys.eqs[A], "G^" + std::to_string(A));
  for (size_t A = 0; A < Q.size(); ++A) invariant(Q.comps[A], "Q_" + std::to_string(A));

  std::array<VectorFunction, 3> out;
  out[0] = VectorFunction::zero(VectorFunction::Equations, Q.size());
  int n = sys.nindep(), m = sys.ndep(), ne = sys.neq();
  bool fol_ok = true;
  try {
    FirstOrderLinearAdjointSymmetry fq = FirstOrderLinearAdjointSymmetry::make(sys, Q);
    std::vector<DiffExpr> a2(ne);
    for (int A = 0; A < ne; ++A) {
      DiffExpr s;
      for (int al = 0; al < m; ++al)
        for (int j = 0; j < n; ++j) {
          DiffExpr d;
          for (int i = 0; i < n; ++i)
            d = d + a[i] * total_derivative(fq.rho[j][A][al], i) - a[j] * total_derivative(fq.rho[i][A][al], i);
          s = s + DiffExpr::var(JetVar::dep(al, {j})) * d;
        }
      for (int i = 0; i < n; ++i) s = s + a[i] * total_derivative(fq.kappa[A], i);
      for (int al = 0; al < m; ++al)
        for (int i = 0; i < n; ++i)
          s = s + a[i] * DiffExpr::var(JetVar::dep(al, {i})) * fq.K[A][al];
      a2[A] = s;
    }
    out[1] = VectorFunction(VectorFunction::Equations, a2);
    out[2] = -out[1];
  } catch (const ExprError&) {
    fol_ok = false;
  }
  if (!fol_ok) {
    std::vector<DiffExpr> P(m);
    for (int al = 0; al < m; ++al)
      for (int i = 0; i < n; ++i) P[al] = P[al] - a[i] * DiffExpr::var(JetVar::dep(al, {i}));
    VectorFunction Pc(VectorFunction::DepVars, P);
    out[1] = action2(sys, Pc, Q);
    out[2] = action3(sys, Pc, Q);
  }
  return out;
}

/// Scaling actions for weights w^(i) on x^i and w^(alpha) on u^alpha.
/// Requires pr Y(Q_A) = w^(A) Q_A and pr Y(G^A) = omega^(A) G^A identically.
inline std::array<VectorFunction, 3> scaling_actions(const PDESystem& sys,
                                                     const std::vector<CoefField>& wi,
                                                     const std::vector<CoefField>& wa,
                                                     const VectorFunction& Q) {
  int n = sys.nindep(), m = sys.ndep(), ne = sys.neq();
  if (static_cast<int>(wi.size()) != n || static_cast<int>(wa.size()) != m)
    throw ExprError("scaling weight count mismatch");
  PointSymmetry ps;
  for (int i = 0; i < n; ++i) ps.xi.push_back(wi[i] * DiffExpr::var(JetVar::indep(i)));
  for (int a = 0; a < m; ++a) ps.eta.push_back(wa[a] * DiffExpr::var(JetVar::dep(a)));
  std::vector<CoefField> omega(ne), wQ(ne);
  for (int A = 0; A < ne; ++A)
    omega[A] = detail::proportionality(prolong_point(sys, ps, sys.eqs[A]), sys.eqs[A],
                                       "G^" + std::to_string(A));
  for (int A = 0; A < ne; ++A)
    wQ[A] = detail::proportionality(prolong_point(sys, ps, Q.comps[A]), Q.comps[A],
                                    "Q_" + std::to_string(A));
  CoefField wsum;
  for (auto& w : wi) wsum = wsum + w;

  std::array<VectorFunction, 3> out;
  std::vector<DiffExpr> a1(ne);
  for (int A = 0; A < ne; ++A) a1[A] = (omega[A] + wQ[A] + wsum) * Q.comps[A];
  out[0] = VectorFunction(VectorFunction::Equations, a1);
  bool fol_ok = true;
  try {
    FirstOrderLinearAdjointSymmetry fq = FirstOrderLinearAdjointSymmetry::make(sys, Q);
    std::vector<DiffExpr> YG;
    for (auto& G : sys.eqs) YG.push_back(prolong_point(sys, ps, G));
    std::vector<DiffExpr> RpsQ = adjoint_op(sys.hadamard_factor(YG)).apply(fq.Q.comps);
    std::vector<DiffExpr> a2(ne), a3(ne);
    for (int A = 0; A < ne; ++A) {
      DiffExpr middle;  // as in the point-symmetry formulas with xi = w^(i) x^i
      for (int al = 0; al < m; ++al)
        for (int j = 0; j < n; ++j) {
          DiffExpr d;
          for (int i = 0; i < n; ++i)
            d = d + total_derivative(ps.xi[i] * fq.rho[j][A][al] - ps.xi[j] * fq.rho[i][A][al], i);
          middle = middle + DiffExpr::var(JetVar::dep(al, {j})) * d;
        }
      for (int i = 0; i < n; ++i) {
        DiffExpr s = ps.xi[i] * fq.kappa[A];
        for (int al = 0; al < m; ++al) s = s + fq.rho[i][A][al] * ps.eta[al];
        middle = middle + total_derivative(s, i);
      }
      DiffExpr KP;
      for (int al = 0; al < m; ++al) {
        DiffExpr P = ps.eta[al];
        for (int i = 0; i < n; ++i) P = P - ps.xi[i] * DiffExpr::var(JetVar::dep(al, {i}));
        KP = KP + fq.K[A][al] * P;
      }
      a2[A] = RpsQ[A] + middle - KP;
      a3[A] = prolong_point(sys, ps, fq.Q.comps[A]) + wsum * fq.Q.comps[A] - middle + KP;
    }
    out[1] = VectorFunction(VectorFunction::Equations, a2);
    out[2] = VectorFunction(VectorFunction::Equations, a3);
  } catch (const ExprError&) {
    fol_ok = false;
  }
  if (!fol_ok) {
    VectorFunction Pc = ps.characteristic(sys);
    out[1] = action2(sys, Pc, Q);
    out[2] = action3(sys, Pc, Q);
  }
  return out;
}

/// Evolution-form actions (both arguments dep-var indexed, free of
/// t-derivatives): Q'(P) + P'^*(Q), E_u(P.Q), Q'(P) - Q'^*(P).
inline std::array<VectorFunction, 3> evol_actions(const EvolutionSystem& es,
                                                  const VectorFunction& P, const VectorFunction& Q) {
  int m = es.sys.ndep();
  if (P.space != VectorFunction::DepVars || Q.space != VectorFunction::DepVars)
    throw ExprError("evol_actions: dep-var indexed arguments required");
  auto no_t = [&](const VectorFunction& F, const std::string& what) {
    for (auto& c : F.comps)
      for (auto& v : c.jet_vars())
        if (v.kind == JetVar::Dep)
          for (int i : v.deriv)
            if (i == es.t_index) throw ExprError(what + " contains a time derivative");
  };
  no_t(P, "P");
  no_t(Q, "Q");
  std::vector<DiffExpr> a1 = adjoint_frechet(P.comps, m, Q.comps);
  std::vector<DiffExpr> a3 = adjoint_frechet(Q.comps, m, P.comps);
  DiffExpr s;
  for (int a = 0; a < m; ++a) s = s + P.comps[a] * Q.comps[a];
  std::vector<DiffExpr> a2(m);
  for (int a = 0; a < m; ++a) {
    DiffExpr QP = frechet(Q.comps[a], P);
    a1[a] = QP + a1[a];
    a3[a] = QP - a3[a];
    a2[a] = euler(s, a);
  }
  return {VectorFunction(VectorFunction::DepVars, a1), VectorFunction(VectorFunction::DepVars, a2),
          VectorFunction(VectorFunction::DepVars, a3)};
}

}  // namespace jetsym
