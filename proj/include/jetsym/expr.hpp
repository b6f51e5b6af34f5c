#pragma once

#include "jetsym/coef.hpp"

#include <algorithm>
#include <vector>

namespace jetsym {

/// Exponent of a jet variable: an integer plus an integer combination of
/// parameters, e.g. p+1. Structural comparison; zero coefficients absent.
struct AffineExponent {
  long constant{0};
  std::map<std::string, long> coeffs;

  AffineExponent() = default;
  AffineExponent(long c) : constant(c) {}
  static AffineExponent param(const std::string& name, long k = 1) {
    AffineExponent e;
    if (k != 0) e.coeffs[name] = k;
    return e;
  }

  bool is_zero() const { return constant == 0 && coeffs.empty(); }
  bool is_integer() const { return coeffs.empty(); }

  friend AffineExponent operator+(const AffineExponent& a, const AffineExponent& b) {
    AffineExponent r = a;
    r.constant += b.constant;
    for (auto& [v, k] : b.coeffs) {
      r.coeffs[v] += k;
      if (r.coeffs[v] == 0) r.coeffs.erase(v);
    }
    return r;
  }
  friend AffineExponent operator-(const AffineExponent& a, const AffineExponent& b) {
    AffineExponent nb = b;
    nb.constant = -nb.constant;
    for (auto& [v, k] : nb.coeffs) k = -k;
    return a + nb;
  }
  friend AffineExponent operator*(const AffineExponent& a, long s) {
    AffineExponent r;
    r.constant = a.constant * s;
    if (s != 0)
      for (auto& [v, k] : a.coeffs) r.coeffs[v] = k * s;
    return r;
  }
  friend bool operator==(const AffineExponent& a, const AffineExponent& b) {
    return a.constant == b.constant && a.coeffs == b.coeffs;
  }
  friend bool operator!=(const AffineExponent& a, const AffineExponent& b) { return !(a == b); }
  friend bool operator<(const AffineExponent& a, const AffineExponent& b) {
    if (a.constant != b.constant) return a.constant < b.constant;
    return a.coeffs < b.coeffs;
  }

  /// As a field coefficient (for the power rule).
  CoefField as_coef() const {
    ParamPoly p{Int(constant)};
    for (auto& [v, k] : coeffs) p = p + ParamPoly(Int(k)) * ParamPoly::var(v);
    return CoefField(p);
  }

  /// Substitute a parameter by a rational value; must yield an integer.
  AffineExponent eval_param(const std::string& name, const Rat& val) const {
    auto it = coeffs.find(name);
    if (it == coeffs.end()) return *this;
    Rat v = Rat(Int(constant), Int(1)) + Rat(Int(it->second), Int(1)) * val;
    if (!v.is_integer()) throw ExprError("exponent does not specialize to an integer");
    if (v.num > 1000000 || v.num < -1000000) throw ExprError("exponent out of range");
    AffineExponent r;
    r.constant = static_cast<long>(v.num);
    r.coeffs = coeffs;
    r.coeffs.erase(name);
    return r;
  }
};

/// Derivative multi-index over independent variables, stored sorted.
using MultiIndex = std::vector<int>;

inline MultiIndex mi_sorted(MultiIndex I) {
  std::sort(I.begin(), I.end());
  return I;
}
inline MultiIndex mi_append(MultiIndex I, int i) {
  I.push_back(i);
  std::sort(I.begin(), I.end());
  return I;
}
inline bool mi_contains(const MultiIndex& I, const MultiIndex& J) {
  // multiset inclusion J <= I
  auto it = I.begin();
  for (int j : J) {
    it = std::find(it, I.end(), j);
    if (it == I.end()) return false;
    ++it;
  }
  return true;
}
inline MultiIndex mi_minus(const MultiIndex& I, const MultiIndex& J) {
  MultiIndex r = I;
  for (int j : J) {
    auto it = std::find(r.begin(), r.end(), j);
    if (it == r.end()) throw ExprError("multi-index subtraction underflow");
    r.erase(it);
  }
  return r;
}
inline Int mi_binom(const MultiIndex& I, const MultiIndex& J) {
  // product over independent variables of C(count_I, count_J)
  std::map<int, int> ci, cj;
  for (int i : I) ci[i]++;
  for (int j : J) cj[j]++;
  Int r = 1;
  for (auto& [v, k] : cj) {
    int n = ci.count(v) ? ci[v] : 0;
    if (k > n) return 0;
    Int b = 1;
    for (int s = 0; s < k; ++s) b = b * Int(n - s) / Int(s + 1);
    r *= b;
  }
  return r;
}

/// A jet coordinate: an independent variable x^i or a derivative u^alpha_I.
struct JetVar {
  enum Kind { Indep, Dep } kind{Dep};
  int idx{0};        // independent-variable index or dependent-variable index
  MultiIndex deriv;  // sorted; empty means u^alpha itself; unused for Indep

  static JetVar indep(int i) { return JetVar{Indep, i, {}}; }
  static JetVar dep(int alpha, MultiIndex I = {}) { return JetVar{Dep, alpha, mi_sorted(std::move(I))}; }

  int order() const { return kind == Indep ? 0 : static_cast<int>(deriv.size()); }

  friend bool operator==(const JetVar& a, const JetVar& b) {
    return a.kind == b.kind && a.idx == b.idx && a.deriv == b.deriv;
  }
  friend bool operator<(const JetVar& a, const JetVar& b) {
    if (a.kind != b.kind) return a.kind < b.kind;  // independents first
    if (a.kind == JetVar::Indep) return a.idx < b.idx;
    if (a.deriv.size() != b.deriv.size()) return a.deriv.size() < b.deriv.size();
    if (a.idx != b.idx) return a.idx < b.idx;
    return a.deriv < b.deriv;
  }
};

/// Power product of jet variables with affine exponents. No zero exponents.
using Monomial = std::map<JetVar, AffineExponent>;

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (auto& [v, e] : b) {
    auto it = r.find(v);
    if (it == r.end()) {
      r[v] = e;
    } else {
      it->second = it->second + e;
      if (it->second.is_zero()) r.erase(it);
    }
  }
  return r;
}

/// Canonical polynomial differential function: sum of monomials with
/// coefficients in the rational-function field of the parameters.
class DiffExpr {
 public:
  std::map<Monomial, CoefField> terms;

  DiffExpr() = default;
  DiffExpr(long c) {
    if (c != 0) terms[Monomial{}] = CoefField(c);
  }
  explicit DiffExpr(const CoefField& c) {
    if (!c.is_zero()) terms[Monomial{}] = c;
  }
  static DiffExpr var(const JetVar& v, AffineExponent e = AffineExponent(1)) {
    DiffExpr r;
    Monomial m;
    if (!e.is_zero()) m[v] = e;
    r.terms[m] = CoefField(1);
    return r;
  }
  static DiffExpr mono(Monomial m, CoefField c) {
    DiffExpr r;
    if (!c.is_zero()) r.terms[std::move(m)] = std::move(c);
    return r;
  }

  bool is_zero() const { return terms.empty(); }

  void add_term(const Monomial& m, const CoefField& c) {
    if (c.is_zero()) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms[m] = c;
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  friend DiffExpr operator+(const DiffExpr& a, const DiffExpr& b) {
    DiffExpr r = a;
    for (auto& [m, c] : b.terms) r.add_term(m, c);
    return r;
  }
  friend DiffExpr operator-(const DiffExpr& a) {
    DiffExpr r = a;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
  }
  friend DiffExpr operator-(const DiffExpr& a, const DiffExpr& b) { return a + (-b); }
  friend DiffExpr operator*(const DiffExpr& a, const DiffExpr& b) {
    DiffExpr r;
    for (auto& [ma, ca] : a.terms)
      for (auto& [mb, cb] : b.terms) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
  }
  friend DiffExpr operator*(const CoefField& c, const DiffExpr& a) {
    DiffExpr r;
    for (auto& [m, cc] : a.terms) r.add_term(m, c * cc);
    return r;
  }
  friend bool operator==(const DiffExpr& a, const DiffExpr& b) { return a.terms == b.terms; }
  friend bool operator!=(const DiffExpr& a, const DiffExpr& b) { return !(a == b); }
  friend bool operator<(const DiffExpr& a, const DiffExpr& b) { return a.terms < b.terms; }

  DiffExpr pow(long e) const {
    if (e < 0) throw ExprError("negative power of differential expression");
    DiffExpr r(1), base = *this;
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  /// Raise to an affine exponent; requires a single monomial with unit
  /// coefficient when the exponent involves parameters.
  DiffExpr pow_affine(const AffineExponent& e) const {
    if (e.is_integer()) return pow(e.constant);
    if (terms.size() != 1 || !terms.begin()->second.is_one())
      throw ExprError("parameter exponent requires a single unit-coefficient monomial base");
    const Monomial& base = terms.begin()->first;
    Monomial m;
    for (auto& [v, ve] : base) {
      if (!ve.is_integer()) throw ExprError("nested parameter exponent unsupported");
      AffineExponent ne = e * ve.constant;
      if (!ne.is_zero()) m[v] = ne;
    }
    DiffExpr r;
    r.terms[m] = CoefField(1);
    return r;
  }

  bool depends_on(const JetVar& v) const {
    for (auto& [m, c] : terms)
      if (m.count(v)) return true;
    return false;
  }

  std::vector<JetVar> jet_vars() const {
    std::map<JetVar, int> seen;
    for (auto& [m, c] : terms)
      for (auto& [v, e] : m) seen[v] = 1;
    std::vector<JetVar> out;
    for (auto& [v, k] : seen) out.push_back(v);
    return out;
  }

  int max_order() const {
    int n = 0;
    for (auto& [m, c] : terms)
      for (auto& [v, e] : m) n = std::max(n, v.order());
    return n;
  }

  /// Partial derivative with respect to a jet coordinate (power rule;
  /// affine exponents decrement with the exponent promoted to a coefficient).
  DiffExpr partial(const JetVar& v) const {
    DiffExpr r;
    for (auto& [m, c] : terms) {
      auto it = m.find(v);
      if (it == m.end()) continue;
      const AffineExponent& e = it->second;
      Monomial rest = m;
      AffineExponent ne = e - AffineExponent(1);
      if (ne.is_zero())
        rest.erase(v);
      else
        rest[v] = ne;
      r.add_term(rest, c * e.as_coef());
    }
    return r;
  }

  /// Replace every occurrence of a jet variable by a differential expression.
  /// Parameter-dependent exponents on the target require the replacement to be
  /// a single unit-coefficient monomial.
  DiffExpr substitute(const JetVar& target, const DiffExpr& repl) const {
    DiffExpr r;
    for (auto& [m, c] : terms) {
      auto it = m.find(target);
      if (it == m.end()) {
        r.add_term(m, c);
        continue;
      }
      Monomial rest = m;
      rest.erase(target);
      DiffExpr piece = DiffExpr::mono(rest, c) * repl.pow_affine(it->second);
      r = r + piece;
    }
    return r;
  }

  /// Specialize one parameter to a rational value.
  DiffExpr eval_param(const std::string& name, const Rat& val) const {
    DiffExpr r;
    for (auto& [m, c] : terms) {
      Monomial nm;
      for (auto& [v, e] : m) {
        AffineExponent ne = e.eval_param(name, val);
        if (ne.is_integer() && ne.constant < 0) throw ExprError("exponent specializes to a negative integer");
        if (ne.is_zero()) continue;
        auto it = nm.find(v);
        if (it == nm.end())
          nm[v] = ne;
        else {
          it->second = it->second + ne;
          if (it->second.is_zero()) nm.erase(it);
        }
      }
      r.add_term(nm, c.eval_param(name, val));
    }
    return r;
  }

  bool depends_on_param(const std::string& name) const {
    for (auto& [m, c] : terms) {
      if (c.depends_on(name)) return true;
      for (auto& [v, e] : m)
        if (e.coeffs.count(name)) return true;
    }
    return false;
  }
};

inline DiffExpr operator*(long s, const DiffExpr& a) { return CoefField(s) * a; }

}  // namespace jetsym
