#ifndef EFTLAB_BORDISM_HPP
#define EFTLAB_BORDISM_HPP

#include <complex>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eftlab/moduli.hpp"
#include "eftlab/theory.hpp"

namespace eftlab {

enum class AtomKind { C, L, R, T, Id, Swap };

std::string kind_name(AtomKind k);
AtomKind kind_from_name(const std::string& n);

// Generator of the conformal bordism category. tau is exact; re(tau) is
// normalized into [0,1) on construction. R and T need im(tau) > 0; C and L
// accept im(tau) >= 0. Id and Swap carry no parameter.
struct Atom {
  AtomKind kind;
  GaussQ tau;              // meaningful for C, L, R, T only
  std::optional<int> spin; // 0 = +, 1 = -

  static Atom make(AtomKind k, GaussQ tau = {}, std::optional<int> spin = {});

  long in_arity() const;
  long out_arity() const;
  bool has_tau() const;
  bool operator==(const Atom& o) const;
};

// Monoidal word: layers applied in list order (layers[0] first).
struct BordWord {
  std::vector<std::vector<Atom>> layers;

  long in_arity() const;
  long out_arity() const;
  size_t atom_count() const;
  GaussQ tau_sum() const;  // exact sum over all parametrized atoms

  std::string to_json() const;
  static BordWord from_json(const std::string& text);
  bool operator==(const BordWord& o) const;
};

struct TypecheckResult {
  bool ok = true;
  size_t layer = 0;  // first offending layer when !ok
  std::string message;
};

// Interface matching plus atom invariants and the uniform-spin requirement.
// An interior interface of arity 0 is rejected: a closed piece followed by
// another piece is a disjoint union, not a composition.
TypecheckResult typecheck(const BordWord& w);

// Rule identifiers: R1 L.swap, R2 swap.R, R3 additive R(x)R/L, R4 snake -> C,
// R5 C into L, R6 L.R -> T, R7 C.C -> C.
struct RewriteResult {
  bool applied = false;
  BordWord word;
  std::string detail;
};

RewriteResult rewrite_step(const BordWord& w, int rule_id);

struct NormalizeResult {
  bool ok = false;
  BordWord word;       // single layer of atoms when ok
  size_t steps = 0;
  std::string message;
};

// Fuses each connected component to a single generator; step budget
// 10 * atom_count. The surviving tau equals the component's exact tau sum
// with re reduced mod 1.
NormalizeResult normalize(const BordWord& w);

// Dense functor evaluation on the truncated realization: C -> A(tau),
// L -> lambda o (A(tau) (x) id), R -> rho(tau), T -> sum a_k q^k,
// Swap -> braiding. Matrix is (dim^out x dim^in); scalar() for 0->0 words.
struct EvalResult {
  std::vector<std::vector<std::complex<double>>> matrix;
  std::complex<double> scalar_factor{1.0, 0.0};  // closed components
  long in_arity = 0, out_arity = 0;

  std::complex<double> scalar() const;  // requires 0->0
};

// Throws std::length_error if dim^max(in,out over interfaces) > max_dim.
EvalResult evaluate(const BordWord& w, const TheoryData& th,
                    long max_dim = 4096);

// Structural evaluation: components are paths/cycles through C/L/R/T, so
// the map is blockwise q_tot^k on each component. Scales to theories whose
// dense dimension is astronomically large. entry() returns one matrix
// coefficient <out|M|in>, basis tuples being one (block, index) per wire.
struct StructuralEval {
  struct Component {
    AtomKind shape;                  // C, L, R, T, or Id (bare wire)
    GaussQ tau;                      // exact parameter sum mod 1
    std::vector<long> in_ports;      // positions among the word's inputs
    std::vector<long> out_ports;     // positions among the word's outputs
  };
  std::vector<Component> components;
  long in_arity = 0, out_arity = 0;
  const TheoryData* th = nullptr;

  using Basis = std::vector<std::pair<long, long>>;
  std::complex<double> entry(const Basis& in, const Basis& out) const;
  std::complex<double> scalar() const;  // requires 0->0
};

StructuralEval evaluate_structural(const BordWord& w, const TheoryData& th);

// Random well-typed word built by inverse rule application from a random
// seed atom, so normalize provably succeeds on it.
BordWord random_word(std::mt19937& rng, int growth_steps);

}  // namespace eftlab

#endif
