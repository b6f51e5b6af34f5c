#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"

using namespace jetsym;

namespace {

CoefField P() { return CoefField::param("p"); }

struct Fixture {
  SystemDefinition def = tu::load_pgkdv();
  std::vector<VectorFunction> symm, adj;
  Fixture() {
    for (auto& [n, v] : def.symmetries) symm.push_back(v);
    for (auto& [n, v] : def.adjsymmetries) adj.push_back(v);
  }
};

}  // namespace

TEST_CASE("exact linear algebra: rref, rank, solve, kernel") {
  using namespace linalg;
  CoefField p = P();
  Mat A = {{CoefField(1), p, CoefField(0)},
           {CoefField(2), CoefField(2) * p, CoefField(1)},
           {CoefField(0), CoefField(0), CoefField(1)}};
  CHECK(rank(A) == 2);
  auto ker = kernel(A);
  REQUIRE(ker.size() == 1);
  // kernel vector satisfies A k = 0
  for (auto& row : A) {
    CoefField s;
    for (size_t j = 0; j < row.size(); ++j) s = s + row[j] * ker[0][j];
    CHECK(s.is_zero());
  }
  Vec b = {p, CoefField(2) * p + CoefField(1), CoefField(1)};
  auto x = solve(A, b);
  REQUIRE(x.has_value());
  for (size_t i = 0; i < A.size(); ++i) {
    CoefField s;
    for (size_t j = 0; j < A[i].size(); ++j) s = s + A[i][j] * (*x)[j];
    CHECK(s == b[i]);
  }
  CHECK(!solve(Mat{{CoefField(1)}, {CoefField(1)}}, Vec{CoefField(1), CoefField(2)}).has_value());
}

TEST_CASE("coordinates in a basis of vector functions") {
  Fixture fx;
  VectorFunction v = P() * fx.adj[0] - CoefField(3) * fx.adj[2];
  auto co = coords_in_basis(v, fx.adj);
  REQUIRE(co.has_value());
  CHECK((*co)[0] == P());
  CHECK((*co)[1].is_zero());
  CHECK((*co)[2] == CoefField(-3));
  VectorFunction out(VectorFunction::Equations, {parse_expr("u^5", fx.def.vt)});
  CHECK(!coords_in_basis(out, fx.adj).has_value());
}

TEST_CASE("structure constants of the point-symmetry algebra") {
  Fixture fx;
  SymmetryAlgebra alg = structure_constants(fx.symm);
  auto expect = [&](size_t i, size_t j, size_t k, const CoefField& c) {
    for (size_t m = 0; m < 4; ++m) CHECK(alg.c[i][j][m] == (m == k ? c : CoefField()));
  };
  expect(0, 3, 0, P() - CoefField(2));   // [P1,P4] = (p-2) P1
  expect(1, 3, 1, P());                  // [P2,P4] = p P2
  expect(2, 3, 2, CoefField(3) * P());   // [P3,P4] = 3p P3
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = i + 1; j < 3; ++j)
      for (size_t k = 0; k < 4; ++k) CHECK(alg.c[i][j][k].is_zero());
  // dependent input is rejected
  std::vector<VectorFunction> dep = fx.symm;
  dep.push_back(P() * fx.symm[0]);
  CHECK_THROWS_AS(structure_constants(dep), ExprError);
}

TEST_CASE("dual maps: kernels, ranges, and the dimension condition") {
  Fixture fx;
  auto& sys = fx.def.sys;
  DualMapMatrix d3 = dual_map(sys, 3, fx.adj[2], fx.symm, fx.adj);
  REQUIRE(d3.ker.size() == 1);
  // kernel = span(P1)
  CHECK(!d3.ker[0][0].is_zero());
  for (size_t j = 1; j < 4; ++j) CHECK(d3.ker[0][j].is_zero());
  CHECK(d3.range.size() == 3);
  CHECK(dimension_condition(d3, fx.adj.size(), fx.symm.size()));

  DualMapMatrix d2 = dual_map(sys, 2, fx.adj[2], fx.symm, fx.adj);
  CHECK(d2.ker.size() == 2);
  CHECK(d2.range.size() == 2);
  CHECK(!dimension_condition(d2, fx.adj.size(), fx.symm.size()));
}

TEST_CASE("kernel ideal test and the subalgebra obstruction conditions") {
  Fixture fx;
  auto& sys = fx.def.sys;
  SymmetryAlgebra alg = structure_constants(fx.symm);
  DualMapMatrix d3 = dual_map(sys, 3, fx.adj[2], fx.symm, fx.adj);
  CHECK(is_ideal(d3.ker, alg));
  DualMapMatrix d2 = dual_map(sys, 2, fx.adj[2], fx.symm, fx.adj);
  CHECK(!is_ideal(d2.ker, alg));  // span(P1, P4) is not an ideal
  std::vector<VectorFunction> kernel_elems;
  for (auto& v : d3.ker) kernel_elems.push_back(from_coords(v, fx.symm));
  CHECK(subalgebra_conditions(sys, 3, fx.adj[2], kernel_elems));
}

TEST_CASE("scaling decomposition produces the weight-graded complement") {
  Fixture fx;
  auto& sys = fx.def.sys;
  SymmetryAlgebra alg = structure_constants(fx.symm);
  DualMapMatrix d2 = dual_map(sys, 2, fx.adj[2], fx.symm, fx.adj);
  ScalingDecomposition sd = scaling_decomposition(alg, 3, d2.ker);
  // ad(P4) weights: [P4,Pj] = w_j Pj with w = (2-p, -p, -3p, 0)
  CHECK(sd.weights[0] == CoefField(2) - P());
  CHECK(sd.weights[1] == -P());
  CHECK(sd.weights[2] == CoefField(-3) * P());
  CHECK(sd.weights[3].is_zero());
  REQUIRE(sd.complement.size() == 2);
  CHECK(sd.complement[0] == 1);
  CHECK(sd.complement[1] == 2);
  REQUIRE(sd.kernel_weights.size() == 2);
  // kernel weights are {0, 2-p}
  bool has0 = false, has2p = false;
  for (auto& w : sd.kernel_weights) {
    has0 = has0 || w.is_zero();
    has2p = has2p || w == CoefField(2) - P();
  }
  CHECK(has0);
  CHECK(has2p);
  // at p = 0 the kernel and complement weights collide
  auto def0 = tu::load_pgkdv().specialized("p", Rat(Int(0), Int(1)));
  std::vector<VectorFunction> symm0, adj0;
  for (auto& [n, v] : def0.symmetries) symm0.push_back(v);
  for (auto& [n, v] : def0.adjsymmetries) adj0.push_back(v);
  SymmetryAlgebra alg0 = structure_constants(symm0);
  DualMapMatrix d0 = dual_map(def0.sys, 2, adj0[2], symm0, adj0);
  CHECK_THROWS_WITH_AS(scaling_decomposition(alg0, 3, d0.ker),
                       "no canonical complement: scaling weights overlap", ExprError);
}

TEST_CASE("bracket context certificates and failure modes") {
  Fixture fx;
  auto& sys = fx.def.sys;
  BracketContext c3 = make_bracket_context(sys, 3, fx.adj[2], fx.symm, fx.adj);
  CHECK(c3.certificate == "ideal");
  CHECK(c3.noncommutator_ok);
  CHECK_THROWS_AS(make_bracket_context(sys, 2, fx.adj[2], fx.symm, fx.adj), ExprError);
  BracketContext c2 = make_bracket_context(sys, 2, fx.adj[2], fx.symm, fx.adj, 3);
  CHECK(c2.certificate == "scaling");
  CHECK(c2.preimage_cols == std::vector<size_t>{1, 2});
}

TEST_CASE("commutator bracket values, antisymmetry, and Jacobi") {
  Fixture fx;
  auto& sys = fx.def.sys;
  for (int tag : {1, 3}) {
    BracketContext ctx = make_bracket_context(sys, tag, fx.adj[2], fx.symm, fx.adj);
    CoefField den = CoefField(2) * P() - CoefField(4);
    CHECK(commutator_bracket(ctx, fx.adj[0], fx.adj[1]).is_zero());
    CHECK(commutator_bracket(ctx, fx.adj[0], fx.adj[2]) == (P() / den) * fx.adj[0]);
    CHECK(commutator_bracket(ctx, fx.adj[1], fx.adj[2]) == (CoefField(3) * P() / den) * fx.adj[1]);
    for (auto& a : fx.adj)
      for (auto& b : fx.adj)
        CHECK((commutator_bracket(ctx, a, b) + commutator_bracket(ctx, b, a)).is_zero());
  }
}

TEST_CASE("preimage freedom along the kernel does not change the bracket") {
  Fixture fx;
  auto& sys = fx.def.sys;
  BracketContext ctx = make_bracket_context(sys, 3, fx.adj[2], fx.symm, fx.adj);
  VectorFunction kP = from_coords(ctx.dmap.ker[0], fx.symm);
  for (size_t a = 0; a < fx.adj.size(); ++a)
    for (size_t b = 0; b < fx.adj.size(); ++b) {
      VectorFunction Pa = bracket_preimage(ctx, fx.adj[a]);
      VectorFunction Pb = bracket_preimage(ctx, fx.adj[b]);
      VectorFunction ref = apply_action(sys, 3, commutator(Pa, Pb), ctx.Q);
      VectorFunction shifted = apply_action(
          sys, 3, commutator(Pa + P() * kP, Pb - CoefField(2) * kP), ctx.Q);
      CHECK(ref == shifted);
    }
}

TEST_CASE("non-commutator bracket: identity element and lambda values") {
  Fixture fx;
  auto& sys = fx.def.sys;
  BracketContext c3 = make_bracket_context(sys, 3, fx.adj[2], fx.symm, fx.adj);
  // ^Q(Q, Q2) = Q2
  for (auto& b : fx.adj) CHECK(noncommutator_bracket(c3, fx.adj[2], b) == b);
  auto [p33, m33] = noncommutator_bracket_pm(c3, fx.adj[2], fx.adj[2]);
  CHECK(p33 == fx.adj[2]);
  CHECK(m33.is_zero());
  CoefField half(Rat(Int(1), Int(2)));
  auto [p13, m13] = noncommutator_bracket_pm(c3, fx.adj[0], fx.adj[2]);
  CHECK(p13 == half * fx.adj[0]);
  CHECK(m13 == -half * fx.adj[0]);

  BracketContext c1 = make_bracket_context(sys, 1, fx.adj[2], fx.symm, fx.adj);
  CoefField den = CoefField(2) * P() - CoefField(4);
  auto [q13p, q13m] = noncommutator_bracket_pm(c1, fx.adj[0], fx.adj[2]);
  CHECK(q13p == half * ((CoefField(3) * P() - CoefField(8)) / den) * fx.adj[0]);
  CHECK(q13m == half * (P() / -den) * fx.adj[0]);
  auto [q23p, q23m] = noncommutator_bracket_pm(c1, fx.adj[1], fx.adj[2]);
  CHECK(q23p == half * ((P() - CoefField(8)) / den) * fx.adj[1]);
  CHECK(q23m == half * (CoefField(3) * P() / -den) * fx.adj[1]);
}

TEST_CASE("subalgebra pull-back bracket and its violation") {
  Fixture fx;
  auto& sys = fx.def.sys;
  // span(P2, P3) is an abelian subalgebra meeting ker(S_Q3) trivially
  std::vector<VectorFunction> sub = {fx.symm[1], fx.symm[2]};
  BracketTable t = subalgebra_bracket(sys, 3, fx.adj[2], sub, fx.adj);
  for (auto& row : t.values)
    for (auto& v : row)
      for (auto& c : v) CHECK(c.is_zero());
  // a subalgebra containing the kernel P1 is rejected
  std::vector<VectorFunction> badsub = {fx.symm[0], fx.symm[1]};
  CHECK_THROWS_AS(subalgebra_bracket(sys, 3, fx.adj[2], badsub, fx.adj), ExprError);
}
