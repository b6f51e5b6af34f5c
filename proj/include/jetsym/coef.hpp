#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetsym {

using Int = boost::multiprecision::cpp_int;

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact rational number, always reduced with positive denominator.
struct Rat {
  Int num{0};
  Int den{1};

  Rat() = default;
  Rat(long n) : num(n), den(1) {}
  Rat(Int n, Int d) : num(std::move(n)), den(std::move(d)) { reduce(); }

  void reduce() {
    if (den == 0) throw ExprError("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    Int g = boost::multiprecision::gcd(num < 0 ? Int(-num) : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num * b.num, a.den * b.den); }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw ExprError("division by zero rational");
    return Rat(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  bool is_integer() const { return den == 1; }
};

/// Monomial in the parameters: map name -> positive exponent.
using ParamMono = std::map<std::string, int>;

/// Sparse multivariate polynomial in the parameters with exact integer
/// coefficients. The term map keeps a fixed deterministic order.
class ParamPoly {
 public:
  std::map<ParamMono, Int> terms;

  ParamPoly() = default;
  explicit ParamPoly(Int c) {
    if (c != 0) terms[ParamMono{}] = std::move(c);
  }
  explicit ParamPoly(long c) : ParamPoly(Int(c)) {}
  static ParamPoly var(const std::string& name, int exp = 1) {
    ParamPoly p;
    if (exp < 0) throw ExprError("negative parameter exponent");
    if (exp == 0) return ParamPoly(Int(1));
    p.terms[ParamMono{{name, exp}}] = 1;
    return p;
  }

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty()); }
  Int constant_value() const {
    if (terms.empty()) return 0;
    if (!is_constant()) throw ExprError("ParamPoly not constant");
    return terms.begin()->second;
  }
  bool depends_on(const std::string& name) const {
    for (auto& [m, c] : terms)
      if (m.count(name)) return true;
    return false;
  }
  std::vector<std::string> vars() const {
    std::map<std::string, int> seen;
    for (auto& [m, c] : terms)
      for (auto& [v, e] : m) seen[v] = 1;
    std::vector<std::string> out;
    for (auto& [v, e] : seen) out.push_back(v);
    return out;
  }

  friend ParamPoly operator+(const ParamPoly& a, const ParamPoly& b) {
    ParamPoly r = a;
    for (auto& [m, c] : b.terms) {
      auto it = r.terms.find(m);
      if (it == r.terms.end()) {
        r.terms[m] = c;
      } else {
        it->second += c;
        if (it->second == 0) r.terms.erase(it);
      }
    }
    return r;
  }
  friend ParamPoly operator-(const ParamPoly& a) {
    ParamPoly r = a;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
  }
  friend ParamPoly operator-(const ParamPoly& a, const ParamPoly& b) { return a + (-b); }
  friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
    ParamPoly r;
    for (auto& [ma, ca] : a.terms)
      for (auto& [mb, cb] : b.terms) {
        ParamMono m = ma;
        for (auto& [v, e] : mb) m[v] += e;
        Int c = ca * cb;
        auto it = r.terms.find(m);
        if (it == r.terms.end()) {
          r.terms[m] = c;
        } else {
          it->second += c;
          if (it->second == 0) r.terms.erase(it);
        }
      }
    return r;
  }
  friend bool operator==(const ParamPoly& a, const ParamPoly& b) { return a.terms == b.terms; }
  friend bool operator<(const ParamPoly& a, const ParamPoly& b) { return a.terms < b.terms; }

  ParamPoly pow(int e) const {
    if (e < 0) throw ExprError("negative power of polynomial");
    ParamPoly r(Int(1)), base = *this;
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  int degree(const std::string& v) const {
    int d = -1;
    for (auto& [m, c] : terms) {
      auto it = m.find(v);
      d = std::max(d, it == m.end() ? 0 : it->second);
    }
    return d;  // -1 for zero polynomial
  }

  /// Coefficient of v^k, as a polynomial free of v.
  ParamPoly coeff_of(const std::string& v, int k) const {
    ParamPoly r;
    for (auto& [m, c] : terms) {
      auto it = m.find(v);
      int e = it == m.end() ? 0 : it->second;
      if (e != k) continue;
      ParamMono rest = m;
      rest.erase(v);
      r.terms[rest] = c;
    }
    return r;
  }

  Int int_content() const {
    Int g = 0;
    for (auto& [m, c] : terms) g = boost::multiprecision::gcd(g, c < 0 ? Int(-c) : c);
    return g;
  }

  /// Sign of the leading (largest key) term; 0 for the zero polynomial.
  int lead_sign() const {
    if (terms.empty()) return 0;
    return terms.rbegin()->second < 0 ? -1 : 1;
  }

  /// Exact division; throws if the division is not exact.
  friend ParamPoly div_exact(const ParamPoly& a, const ParamPoly& b);
  friend ParamPoly poly_gcd(const ParamPoly& a, const ParamPoly& b);

  /// Substitute one parameter by an exact rational; returns num/den pair
  /// scaled so that the result stays an integer polynomial: value = num / den.
  std::pair<ParamPoly, Int> eval_param(const std::string& v, const Rat& val) const {
    int d = degree(v);
    if (d <= 0) return {*this, Int(1)};
    // common denominator val.den^d
    ParamPoly out;
    for (auto& [m, c] : terms) {
      auto it = m.find(v);
      int e = it == m.end() ? 0 : it->second;
      ParamMono rest = m;
      rest.erase(v);
      Int scale = c;
      for (int k = 0; k < e; ++k) scale *= val.num;
      for (int k = e; k < d; ++k) scale *= val.den;
      if (scale == 0) continue;
      auto jt = out.terms.find(rest);
      if (jt == out.terms.end()) {
        out.terms[rest] = scale;
      } else {
        jt->second += scale;
        if (jt->second == 0) out.terms.erase(jt);
      }
    }
    Int den = 1;
    for (int k = 0; k < d; ++k) den *= val.den;
    return {out, den};
  }
};

namespace detail {

// Pseudo-remainder of a by b with respect to variable v (b nonzero in v):
// the remainder of lc(b)^(deg a - deg b + 1) * a divided by b, so that the
// subresultant divisions stay exact.
inline ParamPoly prem(ParamPoly a, const ParamPoly& b, const std::string& v) {
  int db = b.degree(v);
  ParamPoly lb = b.coeff_of(v, db);
  int e = a.degree(v) - db + 1;
  int da;
  while (!a.is_zero() && (da = a.degree(v)) >= db) {
    ParamPoly la = a.coeff_of(v, da);
    ParamPoly shift = ParamPoly::var(v, da - db);
    a = lb * a - la * shift * b;
    --e;
    if (a.degree(v) == da) throw ExprError("pseudo-division failed to reduce degree");
  }
  while (e-- > 0) a = lb * a;
  return a;
}

}  // namespace detail

inline ParamPoly div_exact(const ParamPoly& a, const ParamPoly& b) {
  if (b.is_zero()) throw ExprError("polynomial division by zero");
  if (a.is_zero()) return ParamPoly();
  if (b.is_constant()) {
    ParamPoly r = a;
    Int c = b.constant_value();
    for (auto& [m, cc] : r.terms) {
      if (cc % c != 0) throw ExprError("inexact polynomial division");
      cc /= c;
    }
    return r;
  }
  auto vs = b.vars();
  const std::string& v = vs.front();
  ParamPoly rem = a, quot;
  int db = b.degree(v);
  ParamPoly lb = b.coeff_of(v, db);
  while (!rem.is_zero()) {
    int da = rem.degree(v);
    if (da < db) throw ExprError("inexact polynomial division");
    ParamPoly la = rem.coeff_of(v, da);
    ParamPoly q = div_exact(la, lb);  // recursive; must be exact for exact division
    ParamPoly t = q * ParamPoly::var(v, da - db);
    quot = quot + t;
    rem = rem - t * b;
    if (!rem.is_zero() && rem.degree(v) >= da) throw ExprError("inexact polynomial division");
  }
  return quot;
}

inline ParamPoly poly_gcd(const ParamPoly& a, const ParamPoly& b) {
  if (a.is_zero() && b.is_zero()) return ParamPoly();
  auto norm = [](ParamPoly p) {
    Int c = p.int_content();
    if (c > 1) p = div_exact(p, ParamPoly(c));
    if (p.lead_sign() < 0) p = -p;
    return p;
  };
  if (a.is_zero()) return norm(b);
  if (b.is_zero()) return norm(a);
  if (a.is_constant() || b.is_constant()) {
    Int g = boost::multiprecision::gcd(a.int_content(), b.int_content());
    return ParamPoly(g);
  }
  // main variable: first variable appearing in either
  auto va = a.vars(), vb = b.vars();
  std::string v = va.empty() ? vb.front() : (vb.empty() ? va.front() : std::min(va.front(), vb.front()));
  auto content_wrt = [&](const ParamPoly& p) {
    ParamPoly c;
    for (int k = 0; k <= p.degree(v); ++k) c = poly_gcd(c, p.coeff_of(v, k));
    return c;
  };
  if (!a.depends_on(v)) {
    // v appears only in b: gcd divides content of b wrt v
    return poly_gcd(a, content_wrt(b));
  }
  if (!b.depends_on(v)) return poly_gcd(content_wrt(a), b);
  ParamPoly ca = content_wrt(a), cb = content_wrt(b);
  ParamPoly pa = div_exact(a, ca), pb = div_exact(b, cb);
  // subresultant PRS: dividing each pseudo-remainder by g*h^d keeps
  // coefficient growth polynomial instead of exponential
  if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
  ParamPoly sg(Int(1)), sh(Int(1));
  while (true) {
    int d = pa.degree(v) - pb.degree(v);
    ParamPoly r = detail::prem(pa, pb, v);
    if (r.is_zero()) break;
    ParamPoly lc = pb.coeff_of(v, pb.degree(v));
    pa = pb;
    pb = div_exact(r, sg * sh.pow(d));
    sg = lc;
    if (d == 1)
      sh = sg;
    else if (d > 1)
      sh = div_exact(sg.pow(d), sh.pow(d - 1));
    if (pb.degree(v) == 0) { pb = ParamPoly(Int(1)); break; }
  }
  if (pb.degree(v) > 0) pb = div_exact(pb, content_wrt(pb));
  ParamPoly g = poly_gcd(ca, cb) * pb;
  return norm(g);
}

/// Element of the field of rational functions in the parameters over Q.
/// Canonical form: gcd(num, den) = 1 (polynomial and integer content) and
/// the leading coefficient of den is positive; zero is 0/1.
class CoefField {
 public:
  ParamPoly num;
  ParamPoly den{Int(1)};

  CoefField() = default;
  CoefField(long c) : num(Int(c)) {}
  explicit CoefField(Int c) : num(std::move(c)) {}
  CoefField(const Rat& r) : num(r.num), den(r.den) {}
  CoefField(ParamPoly n, ParamPoly d) : num(std::move(n)), den(std::move(d)) { canonicalize(); }
  explicit CoefField(ParamPoly n) : num(std::move(n)) {}
  static CoefField param(const std::string& name) { return CoefField(ParamPoly::var(name)); }

  void canonicalize() {
    if (den.is_zero()) throw ExprError("coefficient with zero denominator");
    if (num.is_zero()) { den = ParamPoly(Int(1)); return; }
    ParamPoly g = poly_gcd(num, den);
    if (!(g == ParamPoly(Int(1)))) {
      num = div_exact(num, g);
      den = div_exact(den, g);
    }
    Int c = boost::multiprecision::gcd(num.int_content(), den.int_content());
    if (c > 1) {
      num = div_exact(num, ParamPoly(c));
      den = div_exact(den, ParamPoly(c));
    }
    if (den.lead_sign() < 0) { num = -num; den = -den; }
  }

  bool is_zero() const { return num.is_zero(); }
  bool is_one() const { return num == ParamPoly(Int(1)) && den == ParamPoly(Int(1)); }

  friend CoefField operator+(const CoefField& a, const CoefField& b) {
    return CoefField(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend CoefField operator-(const CoefField& a) {
    CoefField r = a;
    r.num = -r.num;
    return r;
  }
  friend CoefField operator-(const CoefField& a, const CoefField& b) { return a + (-b); }
  friend CoefField operator*(const CoefField& a, const CoefField& b) {
    return CoefField(a.num * b.num, a.den * b.den);
  }
  friend CoefField operator/(const CoefField& a, const CoefField& b) {
    if (b.is_zero()) throw ExprError("division by zero coefficient");
    return CoefField(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const CoefField& a, const CoefField& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(const CoefField& a, const CoefField& b) {
    if (a.num == b.num) return a.den < b.den;
    return a.num < b.num;
  }

  bool depends_on(const std::string& name) const { return num.depends_on(name) || den.depends_on(name); }

  /// Specialize one parameter to an exact rational; throws on a pole.
  CoefField eval_param(const std::string& name, const Rat& val) const {
    auto [n, dn] = num.eval_param(name, val);
    auto [d, dd] = den.eval_param(name, val);
    if (d.is_zero()) throw ExprError("pole: denominator vanishes at parameter value");
    return CoefField(n * ParamPoly(dd), d * ParamPoly(dn));
  }

  /// Value as exact rational when parameter-free.
  Rat rat_value() const {
    if (!num.is_constant() || !den.is_constant()) throw ExprError("coefficient is not a constant");
    return Rat(num.constant_value(), den.constant_value());
  }
};

}  // namespace jetsym
