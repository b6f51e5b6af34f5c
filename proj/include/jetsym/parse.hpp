#pragma once

#include "jetsym/expr.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <string>

namespace jetsym {

/// Declared variable names. Independent variables must be single letters
/// (they appear concatenated in derivative subscripts like u_txx).
struct VarTable {
  std::vector<std::string> indep;
  std::vector<std::string> dep;
  std::vector<std::string> params;

  std::optional<int> indep_index(const std::string& s) const {
    for (size_t i = 0; i < indep.size(); ++i)
      if (indep[i] == s) return static_cast<int>(i);
    return std::nullopt;
  }
  std::optional<int> dep_index(const std::string& s) const {
    for (size_t i = 0; i < dep.size(); ++i)
      if (dep[i] == s) return static_cast<int>(i);
    return std::nullopt;
  }
  bool is_param(const std::string& s) const {
    for (auto& p : params)
      if (p == s) return true;
    return false;
  }
};

namespace detail {

class Parser {
 public:
  Parser(const std::string& src, const VarTable& vt) : s_(src), vt_(vt) {}

  DiffExpr parse() {
    DiffExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  const std::string& s_;
  const VarTable& vt_;
  size_t pos_{0};

  [[noreturn]] void fail(const std::string& msg) {
    std::ostringstream os;
    os << "parse error at position " << pos_ << ": " << msg;
    throw ExprError(os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  DiffExpr expr() {
    skip_ws();
    bool neg = false;
    if (accept('-'))
      neg = true;
    else
      accept('+');
    DiffExpr e = term();
    if (neg) e = -e;
    while (true) {
      skip_ws();
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        break;
    }
    return e;
  }

  DiffExpr term() {
    DiffExpr e = factor();
    while (true) {
      skip_ws();
      if (accept('*')) {
        e = e * factor();
      } else if (accept('/')) {
        DiffExpr d = factor();
        e = (CoefField(1) / as_coef(d)) * e;
      } else {
        break;
      }
    }
    return e;
  }

  CoefField as_coef(const DiffExpr& d) {
    if (d.is_zero()) throw ExprError("division by zero");
    CoefField c;
    for (auto& [m, cc] : d.terms) {
      if (!m.empty()) fail("division only by parameter expressions");
      c = cc;
    }
    return c;
  }

  DiffExpr factor() {
    DiffExpr base = atom();
    skip_ws();
    if (accept('^')) {
      AffineExponent e = exponent();
      base = base.pow_affine(e);
    }
    return base;
  }

  AffineExponent exponent() {
    skip_ws();
    if (accept('(')) {
      AffineExponent e = affine_expr();
      expect(')');
      return e;
    }
    bool neg = accept('-');
    long n = integer();
    return AffineExponent(neg ? -n : n);
  }

  AffineExponent affine_expr() {
    skip_ws();
    bool neg = accept('-');
    AffineExponent e = affine_term();
    if (neg) e = e * -1;
    while (true) {
      skip_ws();
      if (accept('+'))
        e = e + affine_term();
      else if (accept('-'))
        e = e - affine_term();
      else
        break;
    }
    return e;
  }

  AffineExponent affine_term() {
    skip_ws();
    long k = 1;
    bool have_num = false;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      k = integer();
      have_num = true;
      skip_ws();
      if (!accept('*')) {
        // allow "2p" as well as "2*p"
      }
      skip_ws();
    }
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      std::string id = identifier();
      if (!vt_.is_param(id)) fail("exponents may involve only parameters, got '" + id + "'");
      return AffineExponent::param(id, k);
    }
    if (!have_num) fail("expected exponent term");
    return AffineExponent(k);
  }

  long integer() {
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected integer");
    long n = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      n = n * 10 + (s_[pos_] - '0');
      if (n > 1000000000L) fail("integer literal too large");
      ++pos_;
    }
    return n;
  }

  std::string identifier() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  DiffExpr atom() {
    skip_ws();
    if (accept('(')) {
      DiffExpr e = expr();
      expect(')');
      return e;
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      long num = integer();
      if (peek('/')) {
        // rational literal a/b only when followed directly by digits
        size_t save = pos_;
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          long den = integer();
          return DiffExpr(CoefField(Rat(Int(num), Int(den))));
        }
        pos_ = save;
      }
      return DiffExpr(num);
    }
    std::string id = identifier();
    // derivative form name_subscript
    auto us = id.find('_');
    std::string head = us == std::string::npos ? id : id.substr(0, us);
    if (auto d = vt_.dep_index(head)) {
      MultiIndex I;
      if (us != std::string::npos) {
        std::string sub = id.substr(us + 1);
        if (sub.empty()) fail("empty derivative subscript");
        for (char c : sub) {
          auto ii = vt_.indep_index(std::string(1, c));
          if (!ii) fail(std::string("unknown independent variable '") + c + "' in subscript");
          I.push_back(*ii);
        }
      }
      return DiffExpr::var(JetVar::dep(*d, I));
    }
    if (us != std::string::npos) fail("subscript on non-dependent name '" + id + "'");
    if (auto i = vt_.indep_index(id)) return DiffExpr::var(JetVar::indep(*i));
    if (vt_.is_param(id)) return DiffExpr(CoefField::param(id));
    fail("unknown name '" + id + "'");
  }
};

}  // namespace detail

inline DiffExpr parse_expr(const std::string& src, const VarTable& vt) {
  return detail::Parser(src, vt).parse();
}

// ---- printing ----

inline std::string format_int(const Int& n) { return n.str(); }

inline std::string format_param_poly(const ParamPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  // print highest-degree-style order: reverse map order for readability
  for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
    const auto& [m, c] = *it;
    Int a = c;
    bool neg = a < 0;
    if (neg) a = -a;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string body;
    for (auto& [v, e] : m) {
      if (!body.empty()) body += "*";
      body += v;
      if (e != 1) body += "^" + std::to_string(e);
    }
    if (body.empty())
      out += format_int(a);
    else if (a == 1)
      out += body;
    else
      out += format_int(a) + "*" + body;
  }
  return out;
}

inline std::string format_coef(const CoefField& c) {
  std::string n = format_param_poly(c.num);
  if (c.den == ParamPoly(Int(1))) return n;
  std::string d = format_param_poly(c.den);
  bool np = c.num.terms.size() > 1;
  bool dp = c.den.terms.size() > 1 || c.den.terms.begin()->first.size() > 0;
  return (np ? "(" + n + ")" : n) + "/" + (dp ? "(" + d + ")" : d);
}

inline std::string format_affine(const AffineExponent& e) {
  if (e.is_integer()) return std::to_string(e.constant);
  std::string out;
  bool first = true;
  for (auto& [v, k] : e.coeffs) {
    long a = k;
    bool neg = a < 0;
    if (neg) a = -a;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? "-" : "+";
    }
    first = false;
    if (a != 1) out += std::to_string(a) + "*";
    out += v;
  }
  if (e.constant != 0) {
    out += e.constant < 0 ? "-" : "+";
    out += std::to_string(e.constant < 0 ? -e.constant : e.constant);
  }
  return "(" + out + ")";
}

inline std::string format_jetvar(const JetVar& v, const VarTable& vt) {
  if (v.kind == JetVar::Indep) return vt.indep[v.idx];
  std::string out = vt.dep[v.idx];
  if (!v.deriv.empty()) {
    out += "_";
    for (int i : v.deriv) out += vt.indep[i];
  }
  return out;
}

inline std::string format_expr(const DiffExpr& e, const VarTable& vt) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = e.terms.rbegin(); it != e.terms.rend(); ++it) {
    const auto& [m, c] = *it;
    CoefField a = c;
    bool neg = false;
    // pull a leading minus when the numerator's leading term is negative
    if (a.num.lead_sign() < 0) {
      neg = true;
      a = -a;
    }
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string body;
    for (auto& [v, ex] : m) {
      if (!body.empty()) body += "*";
      body += format_jetvar(v, vt);
      if (!(ex == AffineExponent(1))) {
        if (ex.is_integer())
          body += "^" + std::to_string(ex.constant);
        else
          body += "^" + format_affine(ex);
      }
    }
    std::string cs = format_coef(a);
    bool cpar = a.num.terms.size() > 1 && a.den == ParamPoly(Int(1));
    if (body.empty()) {
      // a negated multi-term coefficient needs parentheses to keep its sign
      out += (neg && cpar) ? "(" + cs + ")" : cs;
    } else if (a.is_one()) {
      out += body;
    } else {
      out += (cpar ? "(" + cs + ")" : cs) + "*" + body;
    }
  }
  return out;
}

}  // namespace jetsym
