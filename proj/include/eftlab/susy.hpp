#ifndef EFTLAB_SUSY_HPP
#define EFTLAB_SUSY_HPP

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eftlab/moduli.hpp"
#include "eftlab/qseries.hpp"

namespace eftlab {

// Element of the Grassmann algebra on generators theta_1..theta_n with
// Gaussian-rational coefficients; keys are subset bitmasks (bit i-1 for
// theta_i), kept in ascending generator order with the usual sign rule.
struct GrassmannElt {
  std::map<unsigned, GaussQ> c;

  static GrassmannElt scalar(GaussQ v);
  static GrassmannElt theta(int i);  // single generator, 1-based

  GrassmannElt operator+(const GrassmannElt& o) const;
  GrassmannElt operator-(const GrassmannElt& o) const;
  GrassmannElt operator-() const;
  GrassmannElt operator*(const GrassmannElt& o) const;
  bool operator==(const GrassmannElt& o) const;

  bool is_zero() const;
  bool is_even() const;  // all monomials of even degree
  bool is_odd() const;
  GaussQ body() const;  // coefficient of the empty subset
  std::string to_string() const;
};

// S-point of the super Euclidean line bundle data (tau, tau_bar, theta):
// tau, tau_bar even, theta odd, and the reduced parts of tau and tau_bar
// are complex conjugates.
struct SuperPoint {
  GrassmannElt tau, tau_bar, theta;

  SuperPoint(GrassmannElt t, GrassmannElt tb, GrassmannElt th);
};

// (tau1+tau2, tau_bar1+tau_bar2+theta1 theta2, theta1+theta2)
SuperPoint super_mul(const SuperPoint& p1, const SuperPoint& p2);

// Graded eigenblock model: block (a, b) has even|odd dimensions (p, q) and
// carries mu_{a,b}(tau) = e^{2 pi i (a tau - b tau_bar)}. a is an integer
// with finitely many a < 0.
struct BlockModel {
  struct Key {
    long a;
    mpq_class b;
    bool operator<(const Key& o) const {
      return a != o.a ? a < o.a : b < o.b;
    }
    bool operator==(const Key& o) const { return a == o.a && b == o.b; }
  };
  std::map<Key, std::pair<long, long>> blocks;  // (even, odd)

  std::string to_json() const;
  static BlockModel from_json(const std::string& text);
};

// A(tau) = mu.Id per block; B(tau) = B0.mu with constant odd B0 =
// offdiag(2 pi i b . I, I), so B0^2 = 2 pi i b . Id needs p = q. The square
// is stored as its exact rational multiple of 2 pi i.
struct SemigroupPair {
  BlockModel model;
  std::map<BlockModel::Key, bool> has_b0;          // b != 0 blocks
  std::map<BlockModel::Key, mpq_class> b0_sq;      // B0^2 / (2 pi i)
  std::vector<BlockModel::Key> obstructions;       // p != q on b != 0

  bool ok() const { return obstructions.empty(); }
};

SemigroupPair build_pair(const BlockModel& m);

struct RelationReport {
  struct Entry {
    std::string relation;  // "AA", "AB", "BB"
    long a;
    std::string b;
    bool pass = false;
    bool exact = false;
    double deviation = 0.0;
  };
  std::vector<Entry> entries;
  bool pass = true;
  std::string to_json() const;
};

// First two relations numeric at the samples within tol; the third is
// exact: d mu/d tau_bar = -2 pi i b mu turns B B = -dA/dtau_bar into
// B0^2 = 2 pi i b.
RelationReport check_relations(const SemigroupPair& sp,
                               const std::vector<std::complex<double>>& taus,
                               double tol = 1e-10);

struct SusyPartition {
  QSeries series;  // sum_a sdim V_{a,0} q^a
  bool holomorphic = false;
  struct Residue {
    long a;
    std::string b;
    long sdim;
  };
  std::vector<Residue> residue;  // b != 0 blocks with sdim != 0
  std::string to_json() const;
};

SusyPartition partition_qexp(const BlockModel& m);

// supertrace of A(tau) at a sample, blockwise mu . sdim
std::complex<double> supertrace_a(const BlockModel& m, std::complex<double> tau);

}  // namespace eftlab

#endif
