#include <doctest.h>

#include <random>

#include "eftlab/susy.hpp"

using namespace eftlab;

namespace {

GrassmannElt sc(int num, int den, int inum, int iden) {
  return GrassmannElt::scalar({mpq_class(num, den), mpq_class(inum, iden)});
}

BlockModel demo_model() {
  BlockModel m;
  m.blocks[{-1, mpq_class(0)}] = {1, 0};
  m.blocks[{0, mpq_class(0)}] = {2, 1};
  m.blocks[{1, mpq_class(0)}] = {3, 0};
  m.blocks[{0, mpq_class(1, 2)}] = {2, 2};
  m.blocks[{2, mpq_class(3)}] = {1, 1};
  return m;
}

}  // namespace

TEST_CASE("grassmann generators anticommute and square to zero") {
  auto th = [](int i) { return GrassmannElt::theta(i); };
  CHECK((th(1) * th(1)).is_zero());
  CHECK(th(1) * th(2) == -(th(2) * th(1)));
  CHECK((th(1) * th(2) * th(3)) == -(th(2) * th(1) * th(3)));
  CHECK(th(1).is_odd());
  CHECK((th(1) * th(2)).is_even());
  GrassmannElt mixed = sc(1, 1, 0, 1) + th(1);
  CHECK(!mixed.is_even());
  CHECK(!mixed.is_odd());
}

TEST_CASE("grassmann algebra is associative and distributive") {
  auto th = [](int i) { return GrassmannElt::theta(i); };
  std::vector<GrassmannElt> elems = {
      sc(1, 2, 1, 3), th(1), th(2), th(3),
      sc(2, 1, 0, 1) * th(1) * th(2) + th(3),
      th(1) + sc(-1, 3, 1, 1) * th(2) * th(3)};
  for (const auto& a : elems)
    for (const auto& b : elems)
      for (const auto& c : elems) {
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
      }
}

TEST_CASE("super group law: associativity and the odd commutator") {
  auto th = [](int i) { return GrassmannElt::theta(i); };
  SuperPoint p1{sc(1, 2, 1, 1), sc(1, 2, -1, 1), th(1)};
  SuperPoint p2{sc(1, 3, 2, 1), sc(1, 3, -2, 1), th(2)};
  SuperPoint p3{sc(0, 1, 1, 1), sc(0, 1, -1, 1), th(3)};
  SuperPoint l = super_mul(super_mul(p1, p2), p3);
  SuperPoint r = super_mul(p1, super_mul(p2, p3));
  CHECK(l.tau == r.tau);
  CHECK(l.tau_bar == r.tau_bar);
  CHECK(l.theta == r.theta);

  // two purely odd translations commute up to 2 theta1 theta2 in tau_bar
  SuperPoint q1{sc(0, 1, 0, 1), sc(0, 1, 0, 1), th(1)};
  SuperPoint q2{sc(0, 1, 0, 1), sc(0, 1, 0, 1), th(2)};
  GrassmannElt comm = super_mul(q1, q2).tau_bar - super_mul(q2, q1).tau_bar;
  CHECK(comm == sc(2, 1, 0, 1) * th(1) * th(2));
}

TEST_CASE("build_pair obstruction is exactly sdim != 0 on b != 0") {
  std::mt19937 rng(37);
  std::uniform_int_distribution<int> ad(-3, 3), bn(-2, 2), bd(1, 3), pd(0, 3),
      cnt(1, 4);
  for (int t = 0; t < 1000; ++t) {
    BlockModel m;
    int n = cnt(rng);
    for (int i = 0; i < n; ++i) {
      mpq_class b(bn(rng), bd(rng));
      b.canonicalize();
      m.blocks[{ad(rng), b}] = {pd(rng), pd(rng)};
    }
    bool expect_ok = true;
    for (const auto& [k, pq] : m.blocks)
      if (k.b != 0 && pq.first != pq.second) expect_ok = false;
    SemigroupPair sp = build_pair(m);
    CHECK(sp.ok() == expect_ok);
    if (sp.ok())
      for (const auto& [k, v] : sp.b0_sq) CHECK(v == k.b);
  }
}

TEST_CASE("semigroup relations hold on a buildable model") {
  SemigroupPair sp = build_pair(demo_model());
  REQUIRE(sp.ok());
  auto rep = check_relations(sp, {{0.1, 1.2}, {-0.3, 0.9}, {0.45, 2.0}}, 1e-8);
  CHECK(rep.pass);
  bool saw_exact_bb = false;
  for (const auto& e : rep.entries)
    if (e.relation == "BB") saw_exact_bb = e.exact;
  CHECK(saw_exact_bb);
}

TEST_CASE("partition q-expansion cancels the b != 0 blocks") {
  SusyPartition zp = partition_qexp(demo_model());
  CHECK(zp.holomorphic);
  CHECK(zp.residue.empty());
  CHECK(zp.series.coeff_at(-1).as_rational() == 1);   // (1,0) at a = -1
  CHECK(zp.series.coeff_at(0).as_rational() == 1);    // (2,1) at a = 0
  CHECK(zp.series.coeff_at(1).as_rational() == 3);    // (3,0) at a = 1
  CHECK(zp.series.coeff_at(2).as_rational() == 0);    // (1,1) at b = 3

  // a model with sdim != 0 on a b != 0 block is flagged
  BlockModel bad;
  bad.blocks[{0, mpq_class(1, 2)}] = {2, 1};
  SusyPartition zbad = partition_qexp(bad);
  CHECK(!zbad.holomorphic);
  REQUIRE(zbad.residue.size() == 1);
  CHECK(zbad.residue[0].sdim == 1);
}

TEST_CASE("supertrace of A matches the partition numerically") {
  BlockModel m = demo_model();
  std::complex<double> tau(0.17, 1.05);
  std::complex<double> lhs = supertrace_a(m, tau);
  std::complex<double> rhs = partition_qexp(m).series.eval_at_tau(tau);
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("block model json round trip") {
  BlockModel m = demo_model();
  BlockModel back = BlockModel::from_json(m.to_json());
  CHECK(back.blocks == m.blocks);
}
