#pragma once

#include "jetsym/jetops.hpp"

namespace jetsym {

/// PDE system in solved form: each equation is G^A = (leading derivative) - h^A
/// where h^A is free of every leading derivative and their derivatives.
class PDESystem {
 public:
  VarTable vt;
  std::vector<DiffExpr> eqs;      // G^A
  std::vector<JetVar> leading;    // one leading derivative per equation
  std::vector<DiffExpr> solved;   // h^A with G^A = leading^A - h^A
  bool no_differential_identities{true};

  PDESystem() = default;
  PDESystem(VarTable table, std::vector<DiffExpr> G, std::vector<JetVar> lead)
      : vt(std::move(table)), eqs(std::move(G)), leading(std::move(lead)) {
    if (eqs.size() != leading.size()) throw ExprError("one leading derivative per equation required");
    for (size_t A = 0; A < eqs.size(); ++A) {
      DiffExpr h = DiffExpr::var(leading[A]) - eqs[A];
      if (h.depends_on(leading[A])) throw ExprError("equation is not solved for its leading derivative");
      solved.push_back(h);
    }
    for (auto& h : solved)
      for (auto& v : h.jet_vars())
        if (leading_of(v)) throw ExprError("solved form contains a leading derivative consequence");
  }

  int ndep() const { return static_cast<int>(vt.dep.size()); }
  int nindep() const { return static_cast<int>(vt.indep.size()); }
  int neq() const { return static_cast<int>(eqs.size()); }

  /// If v is D_J applied to a leading derivative, return (A, J).
  std::optional<std::pair<int, MultiIndex>> leading_of(const JetVar& v) const {
    if (v.kind != JetVar::Dep) return std::nullopt;
    for (size_t A = 0; A < leading.size(); ++A)
      if (v.idx == leading[A].idx && mi_contains(v.deriv, leading[A].deriv))
        return std::make_pair(static_cast<int>(A), mi_minus(v.deriv, leading[A].deriv));
    return std::nullopt;
  }

  /// Eliminate all leading derivatives and their differential consequences
  /// using the solved form; a projection with restrict(G^A) = 0.
  DiffExpr restrict(DiffExpr e) const {
    int guard = 0;
    while (true) {
      if (++guard > 100000) throw ExprError("restrict failed to terminate");
      std::optional<JetVar> found;
      std::pair<int, MultiIndex> aj;
      for (auto& v : e.jet_vars())
        if (auto r = leading_of(v)) {
          found = v;
          aj = *r;
          break;
        }
      if (!found) return e;
      e = e.substitute(*found, total_derivative(solved[aj.first], aj.second));
    }
  }

  VectorFunction restrict(const VectorFunction& F) const {
    VectorFunction r = F;
    for (auto& c : r.comps) c = restrict(c);
    return r;
  }

 private:
  // fresh jet variable standing for D_J G^A during factorization
  JetVar gvar(int A, const MultiIndex& J) const { return JetVar::dep(ndep() + A, J); }

 public:
  /// Hadamard factorization: for f vanishing on the solution space, produce
  /// the operator R_f with R_f(G) = f as an exact identity.
  LinDiffOp hadamard_factor(const std::vector<DiffExpr>& f) const {
    for (auto& fc : f)
      if (!restrict(fc).is_zero()) throw ExprError("hadamard_factor: function does not vanish on solutions");
    LinDiffOp R(static_cast<int>(f.size()), neq());
    for (size_t r = 0; r < f.size(); ++r) {
      // rewrite every leading consequence u_{L+J} as D_J(h) + gvar(A,J)
      DiffExpr lifted = f[r];
      int guard = 0;
      while (true) {
        if (++guard > 100000) throw ExprError("hadamard_factor failed to terminate");
        std::optional<JetVar> found;
        std::pair<int, MultiIndex> aj;
        for (auto& v : lifted.jet_vars())
          if (auto q = leading_of(v)) {
            found = v;
            aj = *q;
            break;
          }
        if (!found) break;
        lifted = lifted.substitute(
            *found, total_derivative(solved[aj.first], aj.second) + DiffExpr::var(gvar(aj.first, aj.second)));
      }
      // split by total degree in the gvars; fold degree >= 2 back onto one factor
      for (auto& [m, c] : lifted.terms) {
        std::vector<std::pair<JetVar, AffineExponent>> gfactors;
        Monomial rest;
        for (auto& [v, e] : m) {
          if (v.kind == JetVar::Dep && v.idx >= ndep())
            gfactors.emplace_back(v, e);
          else
            rest[v] = e;
        }
        if (gfactors.empty()) {
          if (!DiffExpr::mono(m, c).is_zero()) throw ExprError("hadamard_factor: nonzero restricted part");
          continue;
        }
        // keep the largest gvar as the operator slot, push the rest back to G
        auto [keep, ke] = gfactors.back();
        if (!ke.is_integer()) throw ExprError("hadamard_factor: parameter power of an equation");
        DiffExpr coefexpr = DiffExpr::mono(rest, c);
        for (size_t s = 0; s + 1 < gfactors.size(); ++s) {
          auto& [v, e] = gfactors[s];
          if (!e.is_integer() || e.constant < 0) throw ExprError("hadamard_factor: bad equation power");
          DiffExpr gexpr = total_derivative(eqs[v.idx - ndep()], v.deriv);
          coefexpr = coefexpr * gexpr.pow(e.constant);
        }
        if (ke.constant < 1) throw ExprError("hadamard_factor: bad equation power");
        if (ke.constant > 1) {
          DiffExpr gexpr = total_derivative(eqs[keep.idx - ndep()], keep.deriv);
          coefexpr = coefexpr * gexpr.pow(ke.constant - 1);
        }
        R.add(keep.deriv, static_cast<int>(r), keep.idx - ndep(), coefexpr);
      }
    }
    R.normalize();
    // soundness: re-expansion must reproduce f exactly
    std::vector<DiffExpr> back = R.apply(eqs);
    for (size_t r = 0; r < f.size(); ++r)
      if (!(back[r] == f[r])) throw ExprError("hadamard_factor verification failed");
    return R;
  }
  LinDiffOp hadamard_factor(const DiffExpr& f) const { return hadamard_factor(std::vector<DiffExpr>{f}); }

  /// G'(P) componentwise, unrestricted.
  std::vector<DiffExpr> frechet_G(const VectorFunction& P) const {
    if (P.space != VectorFunction::DepVars) throw ExprError("symmetry characteristic must be dep-var indexed");
    std::vector<DiffExpr> r;
    for (auto& G : eqs) r.push_back(frechet(G, P));
    return r;
  }

  /// G'^*(Q) componentwise, unrestricted.
  std::vector<DiffExpr> adjoint_frechet_G(const VectorFunction& Q) const {
    if (Q.space != VectorFunction::Equations) throw ExprError("adjoint object must be equation-indexed");
    if (Q.size() != eqs.size()) throw ExprError("adjoint object size mismatch");
    return adjoint_frechet(eqs, ndep(), Q.comps);
  }

  std::pair<bool, LinDiffOp> is_symmetry(const VectorFunction& P) const {
    std::vector<DiffExpr> GP = frechet_G(P);
    for (auto& g : GP)
      if (!restrict(g).is_zero()) return {false, LinDiffOp()};
    return {true, hadamard_factor(GP)};
  }

  std::pair<bool, LinDiffOp> is_adjoint_symmetry(const VectorFunction& Q) const {
    std::vector<DiffExpr> GQ = adjoint_frechet_G(Q);
    for (auto& g : GQ)
      if (!restrict(g).is_zero()) return {false, LinDiffOp()};
    return {true, hadamard_factor(GQ)};
  }

  bool is_multiplier(const VectorFunction& Q) const {
    if (Q.space != VectorFunction::Equations || Q.size() != eqs.size())
      throw ExprError("multiplier must be equation-indexed");
    DiffExpr s;
    for (size_t A = 0; A < eqs.size(); ++A) s = s + Q.comps[A] * eqs[A];
    for (int a = 0; a < ndep(); ++a)
      if (!euler(s, a).is_zero()) return false;
    return true;
  }

  /// Does D_i Psi^i = Lambda_A G^A hold identically?
  bool conservation_law_check(const VectorFunction& Lambda, const std::vector<DiffExpr>& Psi) const {
    if (static_cast<int>(Psi.size()) != nindep()) throw ExprError("one flux per independent variable required");
    DiffExpr lhs;
    for (int i = 0; i < nindep(); ++i) lhs = lhs + total_derivative(Psi[i], i);
    for (size_t A = 0; A < eqs.size(); ++A) lhs = lhs - Lambda.comps[A] * eqs[A];
    return lhs.is_zero();
  }

  /// Lambda' = -R_Lambda^* for multipliers (no differential identities).
  bool multiplier_operator_relation_check(const VectorFunction& Lambda) const {
    if (!no_differential_identities) throw ExprError("system has differential identities");
    for (auto& c : Lambda.comps)
      if (!(restrict(c) == c)) throw ExprError("multiplier contains leading derivatives");
    if (!is_multiplier(Lambda)) throw ExprError("not a multiplier");
    auto [ok, RL] = is_adjoint_symmetry(Lambda);
    if (!ok) throw ExprError("multiplier fails the adjoint-symmetry equation");
    LinDiffOp lhs = frechet_op(Lambda.comps, ndep());
    LinDiffOp rhs = -adjoint_op(RL);
    return lhs == rhs;
  }
};

/// Evolution system u^alpha_t = g^alpha with g free of t-derivatives.
class EvolutionSystem {
 public:
  PDESystem sys;
  int t_index{0};
  std::vector<DiffExpr> g;

  static EvolutionSystem from(const PDESystem& base) {
    EvolutionSystem es;
    es.sys = base;
    if (base.neq() != base.ndep()) throw ExprError("evolution form needs one equation per dependent variable");
    std::optional<int> t;
    std::vector<int> seen(base.ndep(), 0);
    for (int A = 0; A < base.neq(); ++A) {
      const JetVar& L = base.leading[A];
      if (L.deriv.size() != 1) throw ExprError("evolution form needs first-order time leading derivatives");
      if (!t)
        t = L.deriv[0];
      else if (*t != L.deriv[0])
        throw ExprError("evolution form needs a common time variable");
      seen[L.idx]++;
    }
    for (int s : seen)
      if (s != 1) throw ExprError("evolution form needs exactly one equation per dependent variable");
    es.t_index = *t;
    es.g.assign(base.ndep(), DiffExpr());
    for (int A = 0; A < base.neq(); ++A) es.g[base.leading[A].idx] = base.solved[A];
    for (auto& ga : es.g)
      for (auto& v : ga.jet_vars())
        if (v.kind == JetVar::Dep)
          for (int i : v.deriv)
            if (i == es.t_index) throw ExprError("flux contains a time derivative");
    return es;
  }

  /// Reorder an equation-indexed object into dep-var order (Q_A -> Q_alpha).
  std::vector<DiffExpr> by_dep(const std::vector<DiffExpr>& byeq) const {
    std::vector<DiffExpr> out(sys.ndep());
    for (int A = 0; A < sys.neq(); ++A) out[sys.leading[A].idx] = byeq[A];
    return out;
  }

  /// Fast path R_P = P' for evolution symmetries in evolutionary form.
  LinDiffOp RP_fast(const VectorFunction& P) const { return frechet_op(P.comps, sys.ndep()); }
  /// Fast path R_Q = -Q'.
  LinDiffOp RQ_fast(const VectorFunction& Q) const {
    return -frechet_op(by_dep(Q.comps), sys.ndep());
  }
};

}  // namespace jetsym
