#include <doctest.h>

#include <random>

#include "eftlab/bordism.hpp"
#include "eftlab/modforms.hpp"
#include "eftlab/theory.hpp"

using namespace eftlab;

namespace {

GaussQ gq(int rn, int rd, int in_, int id_) {
  return {mpq_class(rn, rd), mpq_class(in_, id_)};
}

TheoryData small_theory() {
  // partition 2 + q + 3q^2
  QSeries f = QSeries::zero(1, mpq_class(3));
  f.set_term(0, Coeff(mpz_class(2)));
  f.set_term(1, Coeff(mpz_class(1)));
  f.set_term(2, Coeff(mpz_class(3)));
  return build_from_series(f);
}

}  // namespace

TEST_CASE("atoms validate their tau domain") {
  CHECK_THROWS(Atom::make(AtomKind::C, gq(0, 1, -1, 2)));   // im < 0
  CHECK_THROWS(Atom::make(AtomKind::R, gq(0, 1, 0, 1)));    // R needs im > 0
  CHECK_THROWS(Atom::make(AtomKind::T, gq(0, 1, 0, 1)));    // T needs im > 0
  CHECK_NOTHROW(Atom::make(AtomKind::C, gq(0, 1, 0, 1)));   // C admits im = 0
  // the real part is normalized mod 1
  Atom a = Atom::make(AtomKind::R, gq(7, 2, 1, 1));
  CHECK(a.tau.re == mpq_class(1, 2));
}

TEST_CASE("typechecking matches interfaces") {
  BordWord rl;
  rl.layers = {{Atom::make(AtomKind::R, gq(0, 1, 1, 1))},
               {Atom::make(AtomKind::L, gq(1, 2, 1, 2))}};
  CHECK(typecheck(rl).ok);
  CHECK(rl.in_arity() == 0);
  CHECK(rl.out_arity() == 0);

  BordWord lr;
  lr.layers = {{Atom::make(AtomKind::L, gq(0, 1, 1, 2))},
               {Atom::make(AtomKind::R, gq(0, 1, 1, 1))}};
  auto tc = typecheck(lr);
  CHECK(!tc.ok);
  CHECK(tc.layer == 1);

  BordWord arity;
  arity.layers = {{Atom::make(AtomKind::C, gq(0, 1, 1, 3))},
                  {Atom::make(AtomKind::L, gq(0, 1, 1, 2))}};
  CHECK(!typecheck(arity).ok);  // C emits one leg, L consumes two
}

TEST_CASE("rewrite rules fire where they should") {
  // R1: swap then cap equals cap
  BordWord swl;
  swl.layers = {{Atom::make(AtomKind::Swap)},
                {Atom::make(AtomKind::L, gq(0, 1, 1, 3))}};
  auto r1 = rewrite_step(swl, 1);
  CHECK(r1.applied);
  CHECK(r1.word.atom_count() == 1);
  CHECK(r1.word.layers[0][0].kind == AtomKind::L);

  // R7: two cylinders fuse, adding their moduli
  BordWord cc;
  cc.layers = {{Atom::make(AtomKind::C, gq(1, 4, 0, 1))},
               {Atom::make(AtomKind::C, gq(1, 4, 1, 2))}};
  auto r7 = rewrite_step(cc, 7);
  CHECK(r7.applied);
  CHECK(r7.word.layers[0][0].tau == gq(1, 2, 1, 2));

  // snake: (R x id) ; (id x L) is a cylinder
  BordWord sn;
  sn.layers = {{Atom::make(AtomKind::R, gq(0, 1, 1, 1)), Atom::make(AtomKind::Id)},
               {Atom::make(AtomKind::Id), Atom::make(AtomKind::L, gq(0, 1, 0, 1))}};
  auto r4 = rewrite_step(sn, 4);
  CHECK(r4.applied);
  CHECK(r4.word.layers[0][0].kind == AtomKind::C);

  // no redex: a lone cylinder admits no step of rule 7
  BordWord lone;
  lone.layers = {{Atom::make(AtomKind::C, gq(0, 1, 1, 2))}};
  CHECK(!rewrite_step(lone, 7).applied);
}

TEST_CASE("closed words normalize to a torus with the exact modulus") {
  BordWord w;
  w.layers = {{Atom::make(AtomKind::R, gq(0, 1, 1, 1))},
              {Atom::make(AtomKind::L, gq(1, 2, 1, 2))}};
  auto n = normalize(w);
  REQUIRE(n.ok);
  REQUIRE(n.word.layers.size() == 1);
  CHECK(n.word.layers[0][0].kind == AtomKind::T);
  CHECK(n.word.layers[0][0].tau == gq(1, 2, 3, 2));
}

TEST_CASE("normalization is deterministic and preserves the interface") {
  std::mt19937 rng(21);
  for (int t = 0; t < 30; ++t) {
    BordWord w = random_word(rng, 6);
    REQUIRE(typecheck(w).ok);
    auto n1 = normalize(w);
    auto n2 = normalize(w);
    REQUIRE(n1.ok);
    CHECK(n1.word == n2.word);
    CHECK(n1.word.in_arity() == w.in_arity());
    CHECK(n1.word.out_arity() == w.out_arity());
  }
}

TEST_CASE("evaluation is invariant under normalization") {
  TheoryData th = small_theory();
  std::mt19937 rng(23);
  int evaluated = 0;
  for (int t = 0; t < 30; ++t) {
    BordWord w = random_word(rng, 5);
    auto n = normalize(w);
    REQUIRE(n.ok);
    EvalResult e1, e2;
    try {
      e1 = evaluate(w, th, 2000);
      e2 = evaluate(n.word, th, 2000);
    } catch (const std::length_error&) {
      continue;
    }
    ++evaluated;
    REQUIRE(e1.matrix.size() == e2.matrix.size());
    for (size_t i = 0; i < e1.matrix.size(); ++i)
      for (size_t k = 0; k < e1.matrix[i].size(); ++k)
        CHECK(std::abs(e1.matrix[i][k] - e2.matrix[i][k]) < 1e-9);
  }
  CHECK(evaluated > 10);
}

TEST_CASE("closed diagrams evaluate to the partition value") {
  TheoryData th = small_theory();
  BordWord w;
  w.layers = {{Atom::make(AtomKind::R, gq(0, 1, 1, 1))},
              {Atom::make(AtomKind::L, gq(1, 2, 1, 2))}};
  auto ev = evaluate(w, th);
  std::complex<double> expect =
      partition(th).eval_at_tau(gq(1, 2, 3, 2).to_complex());
  CHECK(std::abs(ev.scalar() - expect) < 1e-12);
}

TEST_CASE("structural evaluation matches the dense oracle") {
  TheoryData th = small_theory();
  std::vector<std::pair<long, long>> basis;
  for (long k = -th.pole; k <= th.trunc; ++k)
    for (long i = 0; i < th.dim_at(k).get_si(); ++i) basis.push_back({k, i});
  const long D = static_cast<long>(basis.size());
  std::mt19937 rng(29);
  std::uniform_int_distribution<long> bd(0, D - 1);
  for (int t = 0; t < 10; ++t) {
    BordWord w = random_word(rng, 4);
    EvalResult e;
    try {
      e = evaluate(w, th, 2000);
    } catch (const std::length_error&) {
      continue;
    }
    StructuralEval se = evaluate_structural(w, th);
    for (int probe = 0; probe < 25; ++probe) {
      StructuralEval::Basis bin, bout;
      long ii = 0, oo = 0;
      for (long a = 0; a < se.in_arity; ++a) {
        long x = bd(rng);
        bin.push_back(basis[static_cast<size_t>(x)]);
        ii = ii * D + x;
      }
      for (long a = 0; a < se.out_arity; ++a) {
        long x = bd(rng);
        bout.push_back(basis[static_cast<size_t>(x)]);
        oo = oo * D + x;
      }
      CHECK(std::abs(se.entry(bin, bout) -
                     e.matrix[static_cast<size_t>(oo)]
                             [static_cast<size_t>(ii)]) < 1e-9);
    }
  }
}

TEST_CASE("dense evaluation guards against dimension overflow") {
  TheoryData th = build_from_series(j_function(mpq_class(9)));
  BordWord w;
  w.layers = {{Atom::make(AtomKind::C, gq(0, 1, 1, 1))}};
  CHECK_THROWS_AS((void)evaluate(w, th, 4096), std::length_error);
  // the structural evaluator handles the same theory
  StructuralEval se = evaluate_structural(w, th);
  std::complex<double> v = se.entry({{-1, 0}}, {{-1, 0}});
  std::complex<double> q =
      std::exp(std::complex<double>(0, 2 * 3.14159265358979323846) *
               gq(0, 1, 1, 1).to_complex());
  CHECK(std::abs(v - std::pow(q, -1)) < 1e-12);
}

TEST_CASE("word json round trip") {
  std::mt19937 rng(31);
  for (int t = 0; t < 10; ++t) {
    BordWord w = random_word(rng, 5);
    CHECK(BordWord::from_json(w.to_json()) == w);
  }
}
