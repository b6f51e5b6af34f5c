#pragma once

#include "jetsym/parse.hpp"

namespace jetsym {

inline DiffExpr total_derivative(const DiffExpr& e, int i) {
  DiffExpr r = e.partial(JetVar::indep(i));
  for (auto& v : e.jet_vars()) {
    if (v.kind != JetVar::Dep) continue;
    r = r + e.partial(v) * DiffExpr::var(JetVar::dep(v.idx, mi_append(v.deriv, i)));
  }
  return r;
}

inline DiffExpr total_derivative(DiffExpr e, const MultiIndex& I) {
  for (int i : I) e = total_derivative(e, i);
  return e;
}

/// Tuple of differential expressions indexed either by dependent variables
/// (symmetry characteristics P^alpha) or by equations (adjoint objects Q_A).
struct VectorFunction {
  enum Space { DepVars, Equations } space{DepVars};
  std::vector<DiffExpr> comps;

  VectorFunction() = default;
  VectorFunction(Space s, std::vector<DiffExpr> c) : space(s), comps(std::move(c)) {}
  static VectorFunction zero(Space s, size_t n) { return VectorFunction(s, std::vector<DiffExpr>(n)); }

  size_t size() const { return comps.size(); }
  bool is_zero() const {
    for (auto& c : comps)
      if (!c.is_zero()) return false;
    return true;
  }
  friend VectorFunction operator+(const VectorFunction& a, const VectorFunction& b) {
    if (a.space != b.space || a.size() != b.size()) throw ExprError("vector function mismatch");
    VectorFunction r = a;
    for (size_t i = 0; i < r.size(); ++i) r.comps[i] = r.comps[i] + b.comps[i];
    return r;
  }
  friend VectorFunction operator-(const VectorFunction& a) {
    VectorFunction r = a;
    for (auto& c : r.comps) c = -c;
    return r;
  }
  friend VectorFunction operator-(const VectorFunction& a, const VectorFunction& b) { return a + (-b); }
  friend VectorFunction operator*(const CoefField& s, const VectorFunction& a) {
    VectorFunction r = a;
    for (auto& c : r.comps) c = s * c;
    return r;
  }
  friend bool operator==(const VectorFunction& a, const VectorFunction& b) {
    return a.space == b.space && a.comps == b.comps;
  }
};

/// Linear operator in total derivatives, sum over multi-indices I of
/// (matrix of DiffExpr coefficients) * D_I. Rows index the result space,
/// columns the operand space.
struct LinDiffOp {
  int rows{1}, cols{1};
  std::map<MultiIndex, std::vector<std::vector<DiffExpr>>> coef;

  LinDiffOp() = default;
  LinDiffOp(int r, int c) : rows(r), cols(c) {}

  static LinDiffOp zero(int r, int c) { return LinDiffOp(r, c); }
  static LinDiffOp scalar(const DiffExpr& a, MultiIndex I = {}) {
    LinDiffOp op(1, 1);
    op.add(mi_sorted(std::move(I)), 0, 0, a);
    return op;
  }
  static LinDiffOp identity(int n) {
    LinDiffOp op(n, n);
    for (int i = 0; i < n; ++i) op.add({}, i, i, DiffExpr(1));
    return op;
  }

  DiffExpr& slot(const MultiIndex& I, int r, int c) {
    auto it = coef.find(I);
    if (it == coef.end()) {
      it = coef.emplace(I, std::vector<std::vector<DiffExpr>>(rows, std::vector<DiffExpr>(cols))).first;
    }
    return it->second[r][c];
  }
  void add(const MultiIndex& I, int r, int c, const DiffExpr& a) {
    if (a.is_zero()) return;
    DiffExpr& s = slot(I, r, c);
    s = s + a;
  }
  DiffExpr entry(const MultiIndex& I, int r, int c) const {
    auto it = coef.find(I);
    if (it == coef.end()) return DiffExpr();
    return it->second[r][c];
  }
  void normalize() {
    for (auto it = coef.begin(); it != coef.end();) {
      bool all_zero = true;
      for (auto& row : it->second)
        for (auto& e : row)
          if (!e.is_zero()) all_zero = false;
      if (all_zero)
        it = coef.erase(it);
      else
        ++it;
    }
  }
  bool is_zero() const {
    for (auto& [I, m] : coef)
      for (auto& row : m)
        for (auto& e : row)
          if (!e.is_zero()) return false;
    return true;
  }
  int max_order() const {
    int n = 0;
    for (auto& [I, m] : coef)
      for (auto& row : m)
        for (auto& e : row)
          if (!e.is_zero()) n = std::max(n, static_cast<int>(I.size()));
    return n;
  }

  std::vector<DiffExpr> apply(const std::vector<DiffExpr>& arg) const {
    if (static_cast<int>(arg.size()) != cols) throw ExprError("operator/operand size mismatch");
    std::vector<DiffExpr> out(rows);
    for (auto& [I, m] : coef) {
      std::vector<DiffExpr> darg(cols);
      for (int c = 0; c < cols; ++c) darg[c] = total_derivative(arg[c], I);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          if (!m[r][c].is_zero()) out[r] = out[r] + m[r][c] * darg[c];
    }
    return out;
  }
  DiffExpr apply1(const DiffExpr& a) const {
    if (rows != 1 || cols != 1) throw ExprError("apply1 on non-scalar operator");
    return apply({a})[0];
  }

  friend LinDiffOp operator+(const LinDiffOp& a, const LinDiffOp& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw ExprError("operator shape mismatch");
    LinDiffOp r = a;
    for (auto& [I, m] : b.coef)
      for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j) r.add(I, i, j, m[i][j]);
    r.normalize();
    return r;
  }
  friend LinDiffOp operator-(const LinDiffOp& a) {
    LinDiffOp r = a;
    for (auto& [I, m] : r.coef)
      for (auto& row : m)
        for (auto& e : row) e = -e;
    return r;
  }
  friend LinDiffOp operator-(const LinDiffOp& a, const LinDiffOp& b) { return a + (-b); }
  friend LinDiffOp operator*(const CoefField& s, const LinDiffOp& a) {
    LinDiffOp r = a;
    for (auto& [I, m] : r.coef)
      for (auto& row : m)
        for (auto& e : row) e = s * e;
    r.normalize();
    return r;
  }
  friend bool operator==(LinDiffOp a, LinDiffOp b) {
    a.normalize();
    b.normalize();
    return a.rows == b.rows && a.cols == b.cols && a.coef == b.coef;
  }
};

/// Render an operator as a sum of coefficient * D_I terms (entry-wise for
/// non-scalar shapes); round-trips through the expression grammar per entry.
inline std::string format_op(const LinDiffOp& L, const VarTable& vt) {
  std::ostringstream os;
  bool any = false;
  auto dname = [&](const MultiIndex& I) {
    std::string s;
    for (int i : I) s += "D" + vt.indep[i] + " ";
    if (!s.empty()) s.pop_back();
    return s;
  };
  for (auto& [I, m] : L.coef)
    for (int r = 0; r < L.rows; ++r)
      for (int c = 0; c < L.cols; ++c) {
        if (m[r][c].is_zero()) continue;
        if (any) os << " + ";
        any = true;
        if (L.rows != 1 || L.cols != 1) os << "[" << r << "][" << c << "] ";
        os << "(" << format_expr(m[r][c], vt) << ")";
        if (!I.empty()) os << "*" << dname(I);
      }
  if (!any) return "0";
  return os.str();
}

/// Standard-form expansion of D_I composed with multiplication by a matrix:
/// D_I (b . ) = sum over K contained in I of binom(I,K) (D_{I-K} b) D_K.
inline LinDiffOp derivative_compose(const MultiIndex& I, const LinDiffOp& b_mult) {
  LinDiffOp out(b_mult.rows, b_mult.cols);
  // enumerate sub-multi-indices K of I
  std::map<int, int> counts;
  for (int i : I) counts[i]++;
  std::vector<std::pair<int, int>> cv(counts.begin(), counts.end());
  std::vector<int> pick(cv.size(), 0);
  while (true) {
    MultiIndex K;
    for (size_t s = 0; s < cv.size(); ++s)
      for (int k = 0; k < pick[s]; ++k) K.push_back(cv[s].first);
    K = mi_sorted(K);
    MultiIndex IK = mi_minus(I, K);
    Int bin = mi_binom(I, K);
    CoefField bc{bin};
    for (auto& [J, m] : b_mult.coef) {
      if (!J.empty()) throw ExprError("derivative_compose expects a multiplication operator");
      for (int r = 0; r < b_mult.rows; ++r)
        for (int c = 0; c < b_mult.cols; ++c)
          if (!m[r][c].is_zero()) out.add(K, r, c, bc * total_derivative(m[r][c], IK));
    }
    // next selection
    size_t s = 0;
    for (; s < cv.size(); ++s) {
      if (pick[s] < cv[s].second) {
        pick[s]++;
        break;
      }
      pick[s] = 0;
    }
    if (s == cv.size()) break;
  }
  out.normalize();
  return out;
}

inline LinDiffOp compose(const LinDiffOp& a, const LinDiffOp& b) {
  if (a.cols != b.rows) throw ExprError("operator composition shape mismatch");
  LinDiffOp out(a.rows, b.cols);
  for (auto& [I, am] : a.coef) {
    for (auto& [J, bm] : b.coef) {
      LinDiffOp bmul(b.rows, b.cols);
      for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c) bmul.add({}, r, c, bm[r][c]);
      LinDiffOp expanded = derivative_compose(I, bmul);  // D_I (b.) = sum coeff D_K
      for (auto& [K, em] : expanded.coef) {
        MultiIndex KJ = K;
        for (int j : J) KJ.push_back(j);
        KJ = mi_sorted(KJ);
        // matrix product a_I * em
        for (int r = 0; r < a.rows; ++r)
          for (int c = 0; c < b.cols; ++c) {
            DiffExpr acc;
            for (int k = 0; k < a.cols; ++k)
              if (!am[r][k].is_zero() && !em[k][c].is_zero()) acc = acc + am[r][k] * em[k][c];
            out.add(KJ, r, c, acc);
          }
      }
    }
  }
  out.normalize();
  return out;
}

/// Formal adjoint: (a D_I)^* = (-1)^{|I|} D_I (a^T . ), expanded to standard
/// form. Involution; anti-homomorphism under composition.
inline LinDiffOp adjoint_op(const LinDiffOp& L) {
  LinDiffOp out(L.cols, L.rows);
  for (auto& [I, m] : L.coef) {
    LinDiffOp at(L.cols, L.rows);
    for (int r = 0; r < L.rows; ++r)
      for (int c = 0; c < L.cols; ++c) at.add({}, c, r, m[r][c]);
    LinDiffOp expanded = derivative_compose(I, at);
    CoefField sign{(I.size() % 2 == 0) ? 1 : -1};
    for (auto& [K, em] : expanded.coef)
      for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c) out.add(K, r, c, sign * em[r][c]);
  }
  out.normalize();
  return out;
}

/// Frechet derivative operator of a vector of expressions:
/// coefficient of D_I in column alpha, row r is d f_r / d u^alpha_I.
inline LinDiffOp frechet_op(const std::vector<DiffExpr>& f, int ndep) {
  LinDiffOp op(static_cast<int>(f.size()), ndep);
  for (size_t r = 0; r < f.size(); ++r)
    for (auto& v : f[r].jet_vars()) {
      if (v.kind != JetVar::Dep) continue;
      op.add(v.deriv, static_cast<int>(r), v.idx, f[r].partial(v));
    }
  op.normalize();
  return op;
}
inline LinDiffOp frechet_op(const DiffExpr& f, int ndep) { return frechet_op(std::vector<DiffExpr>{f}, ndep); }

inline DiffExpr frechet(const DiffExpr& f, const VectorFunction& F) {
  if (F.space != VectorFunction::DepVars) throw ExprError("frechet direction must be dep-var indexed");
  DiffExpr r;
  for (auto& v : f.jet_vars()) {
    if (v.kind != JetVar::Dep) continue;
    if (v.idx >= static_cast<int>(F.size())) throw ExprError("frechet direction too short");
    r = r + f.partial(v) * total_derivative(F.comps[v.idx], v.deriv);
  }
  return r;
}

/// pr X_F f, the prolonged vector field action; equals f'(F).
inline DiffExpr prolong_apply(const VectorFunction& F, const DiffExpr& f) { return frechet(f, F); }

inline VectorFunction prolong_apply_vec(const VectorFunction& F, const VectorFunction& f) {
  VectorFunction r = f;
  for (auto& c : r.comps) c = prolong_apply(F, c);
  return r;
}

/// Apply pr X_F to every coefficient of an operator.
inline LinDiffOp prolong_apply_op(const VectorFunction& F, const LinDiffOp& L) {
  LinDiffOp r = L;
  for (auto& [I, m] : r.coef)
    for (auto& row : m)
      for (auto& e : row) e = prolong_apply(F, e);
  r.normalize();
  return r;
}

/// Adjoint Frechet derivative applied to a vector: f'^*(Q).
inline std::vector<DiffExpr> adjoint_frechet(const std::vector<DiffExpr>& f, int ndep,
                                             const std::vector<DiffExpr>& Q) {
  return adjoint_op(frechet_op(f, ndep)).apply(Q);
}

/// Second Frechet derivative f''(F1,F2); symmetric in the directions.
inline DiffExpr frechet2(const DiffExpr& f, const VectorFunction& F1, const VectorFunction& F2) {
  if (F1.space != VectorFunction::DepVars || F2.space != VectorFunction::DepVars)
    throw ExprError("frechet2 directions must be dep-var indexed");
  DiffExpr r;
  for (auto& v : f.jet_vars()) {
    if (v.kind != JetVar::Dep) continue;
    DiffExpr fv = f.partial(v);
    DiffExpr dF1 = total_derivative(F1.comps[v.idx], v.deriv);
    for (auto& w : fv.jet_vars()) {
      if (w.kind != JetVar::Dep) continue;
      r = r + fv.partial(w) * dF1 * total_derivative(F2.comps[w.idx], w.deriv);
    }
  }
  return r;
}

/// Euler operator (variational derivative) with respect to u^alpha.
inline DiffExpr euler(const DiffExpr& f, int alpha) {
  DiffExpr r;
  for (auto& v : f.jet_vars()) {
    if (v.kind != JetVar::Dep || v.idx != alpha) continue;
    CoefField sign{(v.deriv.size() % 2 == 0) ? 1 : -1};
    r = r + sign * total_derivative(f.partial(v), v.deriv);
  }
  return r;
}

/// Higher Euler operator E^J_{u^alpha}(f) = sum over I containing J of
/// binom(I,J) (-D)_{I-J} df/du^alpha_I.
inline DiffExpr higher_euler(const DiffExpr& f, int alpha, const MultiIndex& Jraw) {
  MultiIndex J = mi_sorted(Jraw);
  DiffExpr r;
  for (auto& v : f.jet_vars()) {
    if (v.kind != JetVar::Dep || v.idx != alpha) continue;
    if (!mi_contains(v.deriv, J)) continue;
    MultiIndex IJ = mi_minus(v.deriv, J);
    CoefField c = CoefField(mi_binom(v.deriv, J)) * CoefField((IJ.size() % 2 == 0) ? 1 : -1);
    r = r + c * total_derivative(f.partial(v), IJ);
  }
  return r;
}

/// Lie bracket of characteristics: [P1,P2] = P2'(P1) - P1'(P2).
inline VectorFunction commutator(const VectorFunction& P1, const VectorFunction& P2) {
  if (P1.space != VectorFunction::DepVars || P2.space != VectorFunction::DepVars)
    throw ExprError("commutator needs dep-var indexed arguments");
  if (P1.size() != P2.size()) throw ExprError("commutator size mismatch");
  VectorFunction r(VectorFunction::DepVars, std::vector<DiffExpr>(P1.size()));
  for (size_t a = 0; a < P1.size(); ++a)
    r.comps[a] = frechet(P2.comps[a], P1) - frechet(P1.comps[a], P2);
  return r;
}

namespace detail {

/// Accumulates witnesses for a . D_I b = (-1)^{|I|} (D_I a) . b + sum_i D_i W^i.
inline void move_derivs(const DiffExpr& a, const DiffExpr& b, const MultiIndex& I,
                        std::map<int, DiffExpr>& W, bool negate = false) {
  if (I.empty()) return;
  MultiIndex Ip(I.begin(), I.end() - 1);
  int i = I.back();
  DiffExpr w = a * total_derivative(b, Ip);
  auto it = W.find(i);
  if (it == W.end())
    W[i] = negate ? -w : w;
  else
    it->second = negate ? it->second - w : it->second + w;
  move_derivs(total_derivative(a, i), b, Ip, W, !negate);
}

}  // namespace detail

/// Witness Psi^i for the adjoint pairing identity
/// H f'(F) - F . f'^*(H) = sum_i D_i Psi^i, returned indexed by independent
/// variable. The residual is re-verified to vanish identically.
inline std::map<int, DiffExpr> divergence_pair_witness(const DiffExpr& H, const VectorFunction& F,
                                                       const DiffExpr& f) {
  std::map<int, DiffExpr> W;
  for (auto& v : f.jet_vars()) {
    if (v.kind != JetVar::Dep) continue;
    detail::move_derivs(H * f.partial(v), F.comps[v.idx], v.deriv, W);
  }
  // verify
  int ndep = 0;
  for (auto& v : f.jet_vars())
    if (v.kind == JetVar::Dep) ndep = std::max(ndep, v.idx + 1);
  ndep = std::max<int>(ndep, static_cast<int>(F.size()));
  DiffExpr lhs = H * frechet(f, F);
  std::vector<DiffExpr> Hv{H};
  std::vector<DiffExpr> fstar = adjoint_frechet({f}, ndep, Hv);
  for (int a = 0; a < ndep && a < static_cast<int>(F.size()); ++a) lhs = lhs - F.comps[a] * fstar[a];
  for (auto& [i, w] : W) lhs = lhs - total_derivative(w, i);
  if (!lhs.is_zero()) throw ExprError("divergence witness residual is nonzero");
  return W;
}

/// Witness Gamma^i for f'(F) - F . E_u(f) = sum_i D_i Gamma^i.
inline std::map<int, DiffExpr> gamma_witness(const VectorFunction& F, const DiffExpr& f) {
  std::map<int, DiffExpr> W;
  for (auto& v : f.jet_vars()) {
    if (v.kind != JetVar::Dep) continue;
    detail::move_derivs(f.partial(v), F.comps[v.idx], v.deriv, W);
  }
  DiffExpr lhs = frechet(f, F);
  for (size_t a = 0; a < F.size(); ++a) lhs = lhs - F.comps[a] * euler(f, static_cast<int>(a));
  for (auto& [i, w] : W) lhs = lhs - total_derivative(w, i);
  if (!lhs.is_zero()) throw ExprError("gamma witness residual is nonzero");
  return W;
}

/// Integration-by-parts normal form in one spatial variable x:
/// returns (canonical, W) with e = canonical + D_x W, canonical deterministic,
/// and canonical = 0 exactly when e is a total x-derivative plus x,t terms.
inline std::pair<DiffExpr, DiffExpr> ibp_canonical(const DiffExpr& e, int x) {
  for (auto& v : e.jet_vars())
    if (v.kind == JetVar::Dep)
      for (int i : v.deriv)
        if (i != x) throw ExprError("ibp_canonical supports one spatial variable");
  DiffExpr rem = e, W;
  int guard = 0;
  bool changed = true;
  while (changed) {
    if (++guard > 100000) throw ExprError("ibp_canonical failed to terminate");
    changed = false;
    for (auto it = rem.terms.rbegin(); it != rem.terms.rend(); ++it) {
      const Monomial& m = it->first;
      const CoefField& c = it->second;
      bool has_dep = !m.empty() && m.rbegin()->first.kind == JetVar::Dep;
      if (!has_dep) {
        // pure (t,x) monomial: integrate the x power
        Monomial nm = m;
        JetVar xv = JetVar::indep(x);
        AffineExponent ex(0);
        auto jt = nm.find(xv);
        if (jt != nm.end()) ex = jt->second;
        AffineExponent ex1 = ex + AffineExponent(1);
        nm[xv] = ex1;
        DiffExpr B = DiffExpr::mono(nm, c / ex1.as_coef());
        W = W + B;
        rem = rem - total_derivative(B, x);
        changed = true;
        break;
      }
      JetVar v = m.rbegin()->first;
      if (v.deriv.empty()) continue;  // order-0 factor: canonical
      if (!(m.rbegin()->second == AffineExponent(1))) continue;  // nonlinear top: canonical
      JetVar w = JetVar::dep(v.idx, MultiIndex(v.deriv.begin(), v.deriv.end() - 1));
      Monomial nm = m;
      nm.erase(v);
      AffineExponent ew(0);
      auto jt = nm.find(w);
      if (jt != nm.end()) ew = jt->second;
      AffineExponent ew1 = ew + AffineExponent(1);
      nm[w] = ew1;
      DiffExpr B = DiffExpr::mono(nm, c / ew1.as_coef());
      W = W + B;
      rem = rem - total_derivative(B, x);
      changed = true;
      break;
    }
  }
  return {rem, W};
}

}  // namespace jetsym
