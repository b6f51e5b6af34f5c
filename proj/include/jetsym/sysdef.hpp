#pragma once

#include "jetsym/pdesys.hpp"

#include <fstream>
#include <sstream>

namespace jetsym {

/// Parse a coefficient (no jet variables) from text.
inline CoefField parse_coef(const std::string& src, const VarTable& vt) {
  DiffExpr e = parse_expr(src, vt);
  if (e.is_zero()) return CoefField();
  if (e.terms.size() != 1 || !e.terms.begin()->first.empty())
    throw ExprError("expected a coefficient expression, got '" + src + "'");
  return e.terms.begin()->second;
}

/// Named definition of a PDE system and its associated objects, read from a
/// line-oriented keyed text format with sections [system], [objects], [ansatz].
struct SystemDefinition {
  VarTable vt;
  PDESystem sys;

  std::vector<std::pair<std::string, VectorFunction>> symmetries;
  std::vector<std::pair<std::string, VectorFunction>> adjsymmetries;
  std::vector<std::pair<std::string, VectorFunction>> multipliers;

  struct Current {
    VectorFunction lambda;
    std::vector<DiffExpr> flux;  // one per independent variable
  };
  std::vector<std::pair<std::string, Current>> currents;

  struct Scaling {
    std::vector<CoefField> wi;  // weights of the independent variables
    std::vector<CoefField> wa;  // weights of the dependent variables
  };
  std::vector<std::pair<std::string, Scaling>> scalings;

  struct Pool {
    std::string space;  // symmetry | adjsymmetry | multiplier
    std::vector<VectorFunction> entries;
  };
  std::vector<std::pair<std::string, Pool>> pools;

  std::vector<std::pair<std::string, DiffExpr>> functionals;  // spatial densities

  const VectorFunction* find_symmetry(const std::string& n) const {
    for (auto& [k, v] : symmetries)
      if (k == n) return &v;
    return nullptr;
  }
  const VectorFunction* find_adjsymmetry(const std::string& n) const {
    for (auto& [k, v] : adjsymmetries)
      if (k == n) return &v;
    return nullptr;
  }

  static SystemDefinition parse(const std::string& text);
  static SystemDefinition parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ExprError("cannot open system file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  /// Specialize the parameter to a rational value throughout.
  SystemDefinition specialized(const std::string& name, const Rat& val) const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace detail

inline SystemDefinition SystemDefinition::parse(const std::string& text) {
  SystemDefinition def;
  std::string section;
  std::vector<DiffExpr> eqs;
  std::vector<JetVar> leads;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  auto parse_vec = [&](const std::string& payload, VectorFunction::Space sp, size_t n) {
    auto parts = detail::split_on(payload, ';');
    if (parts.size() != n) throw ExprError("expected " + std::to_string(n) + " components");
    std::vector<DiffExpr> comps;
    for (auto& p : parts) comps.push_back(parse_expr(p, def.vt));
    return VectorFunction(sp, std::move(comps));
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ExprError("malformed section header");
        section = line.substr(1, line.size() - 2);
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ExprError("expected 'key = value'");
      std::string key = detail::trim(line.substr(0, eq));
      std::string val = detail::trim(line.substr(eq + 1));

      if (section == "system") {
        if (key == "indep") {
          def.vt.indep = detail::split_ws(val);
          for (auto& n : def.vt.indep)
            if (n.size() != 1) throw ExprError("independent variable names must be single letters");
        } else if (key == "dep") {
          def.vt.dep = detail::split_ws(val);
        } else if (key == "param") {
          def.vt.params = detail::split_ws(val);
        } else {
          auto words = detail::split_ws(key);
          if (words.size() == 2 && words[0] == "equation") {
            DiffExpr lead = parse_expr(words[1], def.vt);
            if (lead.terms.size() != 1 || lead.terms.begin()->first.size() != 1 ||
                !lead.terms.begin()->second.is_one())
              throw ExprError("leading derivative must be a single jet variable");
            leads.push_back(lead.terms.begin()->first.begin()->first);
            eqs.push_back(parse_expr(val, def.vt));
          } else {
            throw ExprError("unknown [system] key '" + key + "'");
          }
        }
      } else if (section == "objects") {
        auto words = detail::split_ws(key);
        if (words.size() != 2) throw ExprError("expected '<kind> <name> = ...'");
        const std::string& kind = words[0];
        const std::string& name = words[1];
        size_t neq = eqs.size(), nd = def.vt.dep.size(), ni = def.vt.indep.size();
        if (kind == "symmetry") {
          def.symmetries.emplace_back(name, parse_vec(val, VectorFunction::DepVars, nd));
        } else if (kind == "adjsymmetry") {
          def.adjsymmetries.emplace_back(name, parse_vec(val, VectorFunction::Equations, neq));
        } else if (kind == "multiplier") {
          def.multipliers.emplace_back(name, parse_vec(val, VectorFunction::Equations, neq));
        } else if (kind == "current") {
          auto halves = detail::split_on(val, '|');
          if (halves.size() != 2) throw ExprError("current needs 'multipliers | fluxes'");
          Current cur;
          cur.lambda = parse_vec(halves[0], VectorFunction::Equations, neq);
          for (auto& f : detail::split_on(halves[1], ';')) cur.flux.push_back(parse_expr(f, def.vt));
          if (cur.flux.size() != ni) throw ExprError("one flux per independent variable required");
          def.currents.emplace_back(name, std::move(cur));
        } else if (kind == "scaling") {
          auto halves = detail::split_on(val, '|');
          if (halves.size() != 2) throw ExprError("scaling needs 'indep weights | dep weights'");
          Scaling sc;
          for (auto& w : detail::split_on(halves[0], ';')) sc.wi.push_back(parse_coef(w, def.vt));
          for (auto& w : detail::split_on(halves[1], ';')) sc.wa.push_back(parse_coef(w, def.vt));
          if (sc.wi.size() != ni || sc.wa.size() != nd) throw ExprError("scaling weight count mismatch");
          def.scalings.emplace_back(name, std::move(sc));
        } else if (kind == "functional") {
          def.functionals.emplace_back(name, parse_expr(val, def.vt));
        } else {
          throw ExprError("unknown object kind '" + kind + "'");
        }
      } else if (section == "ansatz") {
        auto words = detail::split_ws(key);
        if (words.size() != 4 || words[0] != "pool" || words[2] != ":")
          throw ExprError("expected 'pool <name> : <space> = e1, e2, ...'");
        Pool pool;
        pool.space = words[3];
        VectorFunction::Space sp;
        size_t n;
        if (pool.space == "symmetry") {
          sp = VectorFunction::DepVars;
          n = def.vt.dep.size();
        } else if (pool.space == "adjsymmetry" || pool.space == "multiplier") {
          sp = VectorFunction::Equations;
          n = eqs.size();
        } else {
          throw ExprError("unknown pool space '" + pool.space + "'");
        }
        for (auto& e : detail::split_on(val, ',')) pool.entries.push_back(parse_vec(e, sp, n));
        def.pools.emplace_back(words[1], std::move(pool));
      } else {
        throw ExprError("content outside a known section");
      }
      if (section == "objects" && !eqs.empty() && def.sys.eqs.empty())
        def.sys = PDESystem(def.vt, eqs, leads);
    } catch (const ExprError& ex) {
      throw ExprError("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (def.sys.eqs.empty()) {
    if (eqs.empty()) throw ExprError("no equations defined");
    def.sys = PDESystem(def.vt, eqs, leads);
  }
  return def;
}

inline SystemDefinition SystemDefinition::specialized(const std::string& name, const Rat& val) const {
  SystemDefinition d;
  d.vt = vt;
  d.vt.params.erase(std::remove(d.vt.params.begin(), d.vt.params.end(), name), d.vt.params.end());
  std::vector<DiffExpr> eqs;
  for (auto& e : sys.eqs) eqs.push_back(e.eval_param(name, val));
  d.sys = PDESystem(d.vt, eqs, sys.leading);
  auto sv = [&](const VectorFunction& v) {
    VectorFunction r = v;
    for (auto& c : r.comps) c = c.eval_param(name, val);
    return r;
  };
  for (auto& [k, v] : symmetries) d.symmetries.emplace_back(k, sv(v));
  for (auto& [k, v] : adjsymmetries) d.adjsymmetries.emplace_back(k, sv(v));
  for (auto& [k, v] : multipliers) d.multipliers.emplace_back(k, sv(v));
  for (auto& [k, c] : currents) {
    Current nc;
    nc.lambda = sv(c.lambda);
    for (auto& f : c.flux) nc.flux.push_back(f.eval_param(name, val));
    d.currents.emplace_back(k, std::move(nc));
  }
  for (auto& [k, s] : scalings) {
    Scaling ns;
    for (auto& w : s.wi) ns.wi.push_back(w.eval_param(name, val));
    for (auto& w : s.wa) ns.wa.push_back(w.eval_param(name, val));
    d.scalings.emplace_back(k, std::move(ns));
  }
  for (auto& [k, p] : pools) {
    Pool np;
    np.space = p.space;
    for (auto& e : p.entries) np.entries.push_back(sv(e));
    d.pools.emplace_back(k, std::move(np));
  }
  for (auto& [k, f] : functionals) d.functionals.emplace_back(k, f.eval_param(name, val));
  return d;
}

/// Deterministic report: ordered key/value items plus a command tag.
/// The records form round-trips through parse_report.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> items;
  bool ok{true};

  void add(const std::string& k, const std::string& v) { items.emplace_back(k, v); }

  std::string to_text() const {
    std::ostringstream os;
    os << "== " << command << " ==\n";
    for (auto& [k, v] : items) os << k << ": " << v << "\n";
    os << (ok ? "status: pass" : "status: FAIL") << "\n";
    return os.str();
  }
  std::string to_records() const {
    std::ostringstream os;
    os << "jetsym-report\t1\n";
    os << "command\t" << command << "\n";
    for (auto& [k, v] : items) os << "item\t" << k << "\t" << v << "\n";
    os << "status\t" << (ok ? "pass" : "fail") << "\n";
    return os.str();
  }
};

inline Report parse_report(const std::string& text) {
  Report r;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split_on(line, '\t');
    if (!header) {
      if (fields.size() != 2 || fields[0] != "jetsym-report" || fields[1] != "1")
        throw ExprError("not a jetsym report");
      header = true;
    } else if (fields[0] == "command" && fields.size() == 2) {
      r.command = fields[1];
    } else if (fields[0] == "item" && fields.size() == 3) {
      r.items.emplace_back(fields[1], fields[2]);
    } else if (fields[0] == "status" && fields.size() == 2) {
      r.ok = fields[1] == "pass";
    } else {
      throw ExprError("malformed report line: " + line);
    }
  }
  if (!header) throw ExprError("not a jetsym report");
  return r;
}

}  // namespace jetsym
