#include "jetsym/jetsym.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace jetsym;

namespace {

struct Common {
  std::string system;
  std::string param;  // "p=<rational>"
  std::string format{"text"};
  std::string golden;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SystemDefinition load(const Common& c) {
  SystemDefinition def = SystemDefinition::parse_file(c.system);
  if (!c.param.empty()) {
    auto eq = c.param.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects name=value");
    std::string name = c.param.substr(0, eq);
    std::string val = c.param.substr(eq + 1);
    Int num, den = 1;
    auto slash = val.find('/');
    num = Int(slash == std::string::npos ? val : val.substr(0, slash));
    if (slash != std::string::npos) den = Int(val.substr(slash + 1));
    def = def.specialized(name, Rat(num, den));
  }
  return def;
}

std::string format_vf(const VectorFunction& v, const VarTable& vt) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += " ; ";
    out += format_expr(v.comps[i], vt);
  }
  return out;
}

/// Linear combination string over named objects; falls back to the raw
/// expression when the value is outside the span.
std::string combo_string(const VectorFunction& v,
                         const std::vector<std::pair<std::string, VectorFunction>>& basis,
                         const VarTable& vt) {
  if (v.is_zero()) return "0";
  std::vector<VectorFunction> b;
  for (auto& [n, f] : basis) b.push_back(f);
  auto co = coords_in_basis(v, b);
  if (!co) return format_vf(v, vt);
  std::string out;
  for (size_t i = 0; i < co->size(); ++i) {
    if ((*co)[i].is_zero()) continue;
    if (!out.empty()) out += " + ";
    if ((*co)[i].is_one())
      out += basis[i].first;
    else
      out += "(" + format_coef((*co)[i]) + ")*" + basis[i].first;
  }
  return out.empty() ? "0" : out;
}

/// Q selector: a named adjoint-symmetry or a combination like "Q1 + 2*Q3".
VectorFunction resolve_Q(const SystemDefinition& def, const std::string& spec) {
  if (auto* q = def.find_adjsymmetry(spec)) return *q;
  VectorFunction acc = VectorFunction::zero(VectorFunction::Equations, def.sys.eqs.size());
  std::string s = spec;
  size_t pos = 0;
  bool any = false;
  while (pos < s.size()) {
    int sign = 1;
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') sign = -sign;
      ++pos;
    }
    size_t end = pos;
    int depth = 0;
    while (end < s.size() && (depth > 0 || (s[end] != '+' && s[end] != '-'))) {
      if (s[end] == '(') ++depth;
      if (s[end] == ')') --depth;
      ++end;
    }
    std::string term = detail::trim(s.substr(pos, end - pos));
    pos = end;
    if (term.empty()) break;
    CoefField coef(1);
    std::string name = term;
    auto star = term.rfind('*');
    if (star != std::string::npos) {
      coef = parse_coef(term.substr(0, star), def.vt);
      name = detail::trim(term.substr(star + 1));
    }
    auto* q = def.find_adjsymmetry(name);
    if (!q) throw UsageError("unknown adjoint-symmetry '" + name + "' in --Q");
    acc = acc + (CoefField(sign) * coef) * *q;
    any = true;
  }
  if (!any) throw UsageError("empty --Q selector");
  return acc;
}

Report cmd_check(const SystemDefinition& def, const std::vector<std::string>& names) {
  Report r;
  r.command = "check";
  for (auto& name : names) {
    bool found = false;
    for (auto& [n, P] : def.symmetries) {
      if (n != name) continue;
      found = true;
      auto [ok, RP] = def.sys.is_symmetry(P);
      r.ok = r.ok && ok;
      r.add("symmetry " + name, ok ? "ok R_P = " + format_op(RP, def.vt) : "FAIL");
    }
    for (auto& [n, Q] : def.adjsymmetries) {
      if (n != name) continue;
      found = true;
      auto [ok, RQ] = def.sys.is_adjoint_symmetry(Q);
      r.ok = r.ok && ok;
      r.add("adjsymmetry " + name, ok ? "ok R_Q = " + format_op(RQ, def.vt) : "FAIL");
    }
    for (auto& [n, L] : def.multipliers) {
      if (n != name) continue;
      found = true;
      VectorFunction Lr = L;
      for (auto& c : Lr.comps) c = def.sys.restrict(c);
      bool ok = def.sys.is_multiplier(L) && def.sys.is_multiplier(Lr) &&
                def.sys.multiplier_operator_relation_check(Lr);
      r.ok = r.ok && ok;
      r.add("multiplier " + name, ok ? "ok" : "FAIL");
    }
    for (auto& [n, c] : def.currents) {
      if (n != name) continue;
      found = true;
      bool ok = def.sys.conservation_law_check(c.lambda, c.flux);
      r.ok = r.ok && ok;
      r.add("current " + name, ok ? "ok" : "FAIL");
    }
    if (!found) throw UsageError("unknown object '" + name + "'");
  }
  return r;
}

Report cmd_solve(const SystemDefinition& def, const std::string& which, const std::string& poolname) {
  Report r;
  r.command = "solve " + which;
  const SystemDefinition::Pool* pool = nullptr;
  for (auto& [n, p] : def.pools)
    if (n == poolname) pool = &p;
  if (!pool) throw UsageError("unknown pool '" + poolname + "'");
  Ansatz an;
  an.pool = pool->entries;
  SolutionSpace sol;
  if (which == "symm")
    sol = solve_symmetries(def.sys, an);
  else if (which == "adjsymm")
    sol = solve_adjoint_symmetries(def.sys, an);
  else if (which == "multiplier")
    sol = solve_multipliers(def.sys, an);
  else
    throw UsageError("--which must be symm|adjsymm|multiplier");
  r.add("dimension", std::to_string(sol.basis.size()));
  for (size_t i = 0; i < sol.basis.size(); ++i)
    r.add("basis[" + std::to_string(i) + "]", format_vf(sol.basis[i], def.vt));
  for (size_t i = 0; i < sol.genericity.size(); ++i)
    r.add("genericity[" + std::to_string(i) + "]", sol.genericity[i] + " != 0");
  return r;
}

Report cmd_actions(const SystemDefinition& def) {
  Report r;
  r.command = "actions";
  const char* tags[] = {"table1a", "table1b", "table1c"};
  for (int tag = 1; tag <= 3; ++tag)
    for (auto& [qn, Q] : def.adjsymmetries)
      for (auto& [pn, P] : def.symmetries) {
        VectorFunction v = apply_action(def.sys, tag, P, Q);
        r.add(std::string(tags[tag - 1]) + "[" + qn + "][" + pn + "]",
              combo_string(v, def.adjsymmetries, def.vt));
      }
  // dual-map table with a symbolic combination Q = c1 Q1 + ... + cn Qn
  VectorFunction Qc = VectorFunction::zero(VectorFunction::Equations, def.sys.eqs.size());
  for (size_t i = 0; i < def.adjsymmetries.size(); ++i)
    Qc = Qc + CoefField::param("c" + std::to_string(i + 1)) * def.adjsymmetries[i].second;
  for (int tag = 1; tag <= 3; ++tag)
    for (auto& [pn, P] : def.symmetries) {
      VectorFunction v = apply_action(def.sys, tag, P, Qc);
      r.add("table2[S" + std::to_string(tag) + "][" + pn + "]",
            combo_string(v, def.adjsymmetries, def.vt));
    }
  return r;
}

Report cmd_brackets(const SystemDefinition& def, int tag, const std::string& qspec,
                    const std::string& scaling_name) {
  Report r;
  r.command = "brackets S" + std::to_string(tag);
  VectorFunction Q = resolve_Q(def, qspec);
  std::vector<VectorFunction> symm, adj;
  for (auto& [n, v] : def.symmetries) symm.push_back(v);
  for (auto& [n, v] : def.adjsymmetries) adj.push_back(v);
  std::optional<size_t> scal;
  if (!scaling_name.empty()) {
    for (size_t i = 0; i < def.symmetries.size(); ++i)
      if (def.symmetries[i].first == scaling_name) scal = i;
    if (!scal) throw UsageError("unknown scaling symmetry '" + scaling_name + "'");
  }
  BracketContext ctx;
  try {
    ctx = make_bracket_context(def.sys, tag, Q, symm, adj, scal);
  } catch (const ExprError& e) {
    r.add("error", e.what());
    r.ok = false;
    return r;
  }
  r.add("certificate", ctx.certificate);
  r.add("kernel dimension", std::to_string(ctx.dmap.ker.size()));
  for (size_t i = 0; i < ctx.dmap.ker.size(); ++i)
    r.add("kernel[" + std::to_string(i) + "]",
          combo_string(from_coords(ctx.dmap.ker[i], symm), def.symmetries, def.vt));
  r.add("dimension condition",
        dimension_condition(ctx.dmap, adj.size(), symm.size()) ? "holds" : "fails");
  // commutator bracket on adjoint-symmetry basis elements inside the range
  for (size_t a = 0; a < adj.size(); ++a)
    for (size_t b = 0; b < adj.size(); ++b) {
      std::string key = "[" + def.adjsymmetries[a].first + "," + def.adjsymmetries[b].first + "]";
      try {
        VectorFunction v = commutator_bracket(ctx, adj[a], adj[b]);
        r.add(key, combo_string(v, def.adjsymmetries, def.vt));
      } catch (const ExprError&) {
        r.add(key, "outside range");
      }
    }
  // non-commutator bracket variants
  if (ctx.noncommutator_ok) {
    for (size_t a = 0; a < adj.size(); ++a)
      for (size_t b = 0; b < adj.size(); ++b) {
        std::string key = "(" + def.adjsymmetries[a].first + "," + def.adjsymmetries[b].first + ")";
        try {
          auto [plus, minus] = noncommutator_bracket_pm(ctx, adj[a], adj[b]);
          r.add(key + "+", combo_string(plus, def.adjsymmetries, def.vt));
          r.add(key + "-", combo_string(minus, def.adjsymmetries, def.vt));
        } catch (const ExprError&) {
          r.add(key, "outside range");
        }
      }
  } else {
    r.add("non-commutator bracket", "not admissible (S_P != 0 on the kernel)");
  }
  return r;
}

Report cmd_noether(const SystemDefinition& def, const std::string& qspec) {
  Report r;
  r.command = "noether";
  VectorFunction Q = resolve_Q(def, qspec);
  LinDiffOp J3 = noether_J3(def.sys, Q);
  r.add("J3", format_op(J3, def.vt));
  EvolutionSystem es = EvolutionSystem::from(def.sys);
  VectorFunction Qe(VectorFunction::DepVars, es.by_dep(def.sys.restrict(Q).comps));
  LinDiffOp J = evol_noether(es, Qe);
  r.add("evolution J", format_op(J, def.vt));
  bool skew = adjoint_op(J) == -J;
  r.ok = r.ok && skew;
  r.add("skew", skew ? "yes" : "NO");
  // symplectic 2-form table over evolutionary symmetry representatives
  std::vector<std::pair<std::string, VectorFunction>> evsym;
  for (auto& [n, P] : def.symmetries) evsym.emplace_back(n, def.sys.restrict(P));
  for (auto& [n1, P1] : evsym)
    for (auto& [n2, P2] : evsym) {
      Functional w = symplectic_form(es, Qe, P1, P2);
      r.add("omega[" + n1 + "][" + n2 + "]", format_expr(w.density, def.vt));
    }
  if (evsym.size() >= 3) {
    bool cl = closure_check(es, Qe, evsym[evsym.size() - 3].second, evsym[evsym.size() - 2].second,
                            evsym[evsym.size() - 1].second);
    r.ok = r.ok && cl;
    r.add("closure (last three symmetries)", cl ? "holds" : "FAILS");
  }
  int x = es.t_index == 0 ? 1 : 0;
  for (auto& [n, dens] : def.functionals) {
    if (n != "H") continue;
    LinDiffOp Dx = LinDiffOp::scalar(DiffExpr(1), {x});
    bool h = hamiltonian_check(es, Functional(dens, x), Dx);
    r.ok = r.ok && h;
    r.add("hamiltonian (H, Dx)", h ? "holds" : "FAILS");
  }
  if (def.functionals.size() >= 2 && !J.is_zero()) {
    Functional F1(def.functionals[0].second, x), F2(def.functionals[1].second, x);
    try {
      bool pj = poisson_skew_jacobi_check(es, J, F1, F2, F1 + F2);
      r.ok = r.ok && pj;
      r.add("poisson skew+jacobi", pj ? "holds" : "FAILS");
    } catch (const ExprError& e) {
      r.add("poisson skew+jacobi", std::string("not computable: ") + e.what());
    }
  }
  return r;
}

int emit(const Report& r, const Common& c) {
  std::string out = c.format == "records" ? r.to_records() : r.to_text();
  std::cout << out;
  if (!c.golden.empty()) {
    std::ifstream in(c.golden);
    if (!in) throw UsageError("cannot open golden file '" + c.golden + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    Report g = parse_report(ss.str());
    Report mine = parse_report(r.to_records());
    bool same = g.command == mine.command && g.items == mine.items && g.ok == mine.ok;
    if (!same) {
      std::cerr << "golden mismatch\n";
      size_t n = std::max(g.items.size(), mine.items.size());
      for (size_t i = 0; i < n; ++i) {
        std::string a = i < g.items.size() ? g.items[i].first + ": " + g.items[i].second : "<absent>";
        std::string b =
            i < mine.items.size() ? mine.items[i].first + ": " + mine.items[i].second : "<absent>";
        if (a != b) std::cerr << "- " << a << "\n+ " << b << "\n";
      }
      return 1;
    }
  }
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact adjoint-symmetry toolkit for polynomial PDE systems"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--system", common.system, "system definition file")->required();
  app.add_option("--param", common.param, "specialize a parameter, e.g. p=3");
  app.add_option("--format", common.format, "text|records")->check(CLI::IsMember({"text", "records"}));
  app.add_option("--golden", common.golden, "diff the records output against this file");

  std::vector<std::string> names;
  auto* c_check = app.add_subcommand("check", "verify named objects");
  c_check->add_option("names", names, "object names");

  std::string which, pool;
  auto* c_solve = app.add_subcommand("solve", "solve determining equations over an ansatz pool");
  c_solve->add_option("--which", which, "symm|adjsymm|multiplier")->required();
  c_solve->add_option("--pool", pool, "pool name from the [ansatz] section")->required();

  auto* c_actions = app.add_subcommand("actions", "emit the symmetry-action tables");

  int tag = 3;
  std::string qspec, scaling;
  auto* c_brackets = app.add_subcommand("brackets", "adjoint-symmetry brackets for one (action, Q)");
  c_brackets->add_option("--action", tag, "action tag 1|2|3")->check(CLI::Range(1, 3));
  c_brackets->add_option("--Q", qspec, "adjoint-symmetry name or combination")->required();
  c_brackets->add_option("--scaling", scaling, "symmetry name used for the scaling decomposition");

  std::string nq;
  auto* c_noether = app.add_subcommand("noether", "Noether operator, symplectic form, and checks");
  c_noether->add_option("--Q", nq, "adjoint-symmetry name or combination")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    SystemDefinition def = load(common);
    Report r;
    if (c_check->parsed())
      r = cmd_check(def, names);
    else if (c_solve->parsed())
      r = cmd_solve(def, which, pool);
    else if (c_actions->parsed())
      r = cmd_actions(def);
    else if (c_brackets->parsed())
      r = cmd_brackets(def, tag, qspec, scaling);
    else
      r = cmd_noether(def, nq);
    return emit(r, common);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ExprError& e) {
    std::cerr << "error: " << e.what() << "\n";
    // parse errors in inputs are usage errors; math failures inside commands
    // are reported through Report::ok instead of exceptions
    return 2;
  }
}
