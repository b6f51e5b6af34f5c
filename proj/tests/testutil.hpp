#pragma once

#include "jetsym/jetsym.hpp"

#include <random>

namespace tu {

using namespace jetsym;

/// Deterministic random generator for jet-space polynomial expressions.
struct Gen {
  std::mt19937 rng;
  VarTable vt;

  explicit Gen(unsigned seed, int ndep = 1, bool with_param = false) : rng(seed) {
    vt.indep = {"t", "x"};
    vt.dep.assign(static_cast<size_t>(ndep), "u");
    if (ndep > 1) {
      vt.dep[0] = "u";
      vt.dep[1] = "v";
    }
    if (with_param) vt.params = {"p"};
  }

  int irand(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  CoefField coef() {
    Int n = irand(-5, 5);
    if (n == 0) n = 1;
    if (!vt.params.empty() && irand(0, 4) == 0) return CoefField(n) * CoefField::param(vt.params[0]);
    if (irand(0, 4) == 0) return CoefField(Rat(n, Int(irand(2, 4))));
    return CoefField(n);
  }

  JetVar jetvar(int max_order) {
    if (irand(0, 5) == 0) return JetVar::indep(irand(0, 1));
    int a = vt.dep.size() > 1 ? irand(0, static_cast<int>(vt.dep.size()) - 1) : 0;
    MultiIndex I;
    int ord = irand(0, max_order);
    for (int k = 0; k < ord; ++k) I.push_back(irand(0, 1));
    return JetVar::dep(a, mi_sorted(I));
  }

  DiffExpr expr(int nterms = 3, int max_order = 2, int max_factors = 2) {
    DiffExpr e;
    for (int k = 0; k < nterms; ++k) {
      Monomial m;
      int nf = irand(1, max_factors);
      for (int f = 0; f < nf; ++f) {
        JetVar v = jetvar(max_order);
        AffineExponent ex(irand(1, 2));
        auto it = m.find(v);
        if (it == m.end())
          m[v] = ex;
        else
          it->second = AffineExponent(it->second.constant + ex.constant);
      }
      e = e + DiffExpr::mono(m, coef());
    }
    return e;
  }

  /// Expression whose dependent-variable derivatives are all spatial (x only).
  DiffExpr expr_x(int nterms = 3, int max_order = 2, int max_factors = 2) {
    DiffExpr e = expr(nterms, max_order, max_factors);
    DiffExpr out;
    for (auto& [m, c] : e.terms) {
      Monomial nm;
      for (auto& [v, ex] : m) {
        JetVar w = v;
        if (v.kind == JetVar::Dep)
          w = JetVar::dep(v.idx, MultiIndex(v.deriv.size(), 1));
        auto it = nm.find(w);
        if (it == nm.end())
          nm[w] = ex;
        else
          it->second = it->second + ex;
      }
      out = out + DiffExpr::mono(nm, c);
    }
    return out;
  }

  VectorFunction vec(VectorFunction::Space sp, size_t n, int nterms = 2, int max_order = 2) {
    std::vector<DiffExpr> comps;
    for (size_t i = 0; i < n; ++i) comps.push_back(expr(nterms, max_order));
    return VectorFunction(sp, std::move(comps));
  }
};

inline SystemDefinition load_pgkdv() {
  return SystemDefinition::parse_file(std::string(PGKDV_SYS));
}

}  // namespace tu
