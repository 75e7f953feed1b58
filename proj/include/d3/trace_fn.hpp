#pragma once

// p-periodic complex functions and their arithmetic transforms: the
// unitary discrete Fourier transform, the Voronoi transform, normalized
// hyper-Kloosterman sums, and the two-variable Bessel-type transform that
// appears after combining Poisson and Voronoi summation.
//
// Sign conventions follow the usual split between the two worlds: the
// discrete transform uses e(+hn/p) while the continuous transform in
// windows.hpp uses e(-t xi). Both are implemented exactly as written, so
// fourier(fourier(K))(n) = K(-n) rather than K(n).

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "d3/exec.hpp"
#include "d3/ff.hpp"

namespace d3::trace {

using cplx = std::complex<double>;
using ff::i64;
using ff::Prime;
using ff::Residue;
using ff::u64;

class PeriodicFunction {
 public:
  // Throws std::invalid_argument if values.size() != p or a value is not
  // finite.
  PeriodicFunction(Prime p, std::vector<cplx> values);

  static PeriodicFunction zero(Prime p);
  static PeriodicFunction constant(Prime p, cplx c);
  // Indicator of the class a mod p.
  static PeriodicFunction delta(Prime p, i64 a);

  Prime modulus() const { return p_; }
  const std::vector<cplx>& values() const { return values_; }
  cplx operator()(i64 n) const { return values_[ff::reduce(n, p_.value())]; }
  cplx at_residue(u64 r) const { return values_[r]; }

  double sup_norm() const;

  PeriodicFunction operator+(const PeriodicFunction& other) const;
  PeriodicFunction operator*(cplx c) const;

 private:
  Prime p_;
  std::vector<cplx> values_;
};

// K^(n) = p^{-1/2} sum_h K(h) e(hn/p). Parallel over n; each output is the
// same ascending compensated sum regardless of thread count.
PeriodicFunction fourier(const PeriodicFunction& K, const Exec& exec = {});

// K'(n) = p^{-1/2} sum_{h != 0} K^(h) e(n * inv(h) / p).
PeriodicFunction voronoi(const PeriodicFunction& K, const Exec& exec = {});

struct KloostermanSpec {
  int rank;        // k >= 1
  Residue shift;   // h, nonzero

  KloostermanSpec(int k, Residue h);
  Prime modulus() const { return shift.modulus(); }
};

// Kl_k(a; p) by enumerating the p^{k-1} tuples x_1..x_{k-1}, with x_k
// fixed by the product condition. a = 0 uses the literal definition: a
// tuple whose first k-1 entries already multiply to 0 leaves x_k free
// and contributes a complete character sum, which vanishes.
cplx kloosterman_direct(int k, Residue a);

// Kl_k(a h; p). Direct enumeration while p^{k-1} <= 10^6, otherwise via
// kloosterman_all.
cplx kloosterman(const KloostermanSpec& spec, Residue a);

// Entry a holds Kl_k(a; p) for every a in [0, p). The nonzero entries are
// the k-fold cyclic self-convolution of a -> e(a/p) on F_p^*, indexed by
// powers of the smallest primitive root and computed with FFTs; entry 0 is
// the degenerate value (-1)^{k+1} p^{-(k-1)/2}.
std::vector<cplx> kloosterman_all(int k, Prime p);

// Serial O(p^k) reference for kloosterman_all built from
// kloosterman_direct, kept for tests and benchmarks.
std::vector<cplx> kloosterman_all_direct(int k, Prime p, const Exec& exec = {});

// K~(x, n) = p^{-1/2} sum_{y in F_p^*} K^(n inv(y)) Kl_2(x y; p).
// Construction precomputes K^ and the Kl_2 table; each evaluation is O(p).
class BesselTransform {
 public:
  explicit BesselTransform(const PeriodicFunction& K, const Exec& exec = {});

  Prime modulus() const { return p_; }
  cplx operator()(u64 x, u64 n) const;

  // Row-major p x p table, entry [x * p + n]. OpenMP over x.
  std::vector<cplx> table(const Exec& exec = {}) const;
  // Same table computed serially, for comparison.
  std::vector<cplx> table_serial() const;

  const PeriodicFunction& fourier_transform() const { return khat_; }

 private:
  Prime p_;
  PeriodicFunction khat_;
  std::vector<cplx> kl2_;
  std::vector<u64> inv_;
};

cplx bbessel(const PeriodicFunction& K, Residue x, Residue n);

// K(a) = (-1)^{k-1} Kl_k(a h; p) for a != 0, K(0) = (-1)^k p^{-(k-1)/2}.
// Requires k >= 2.
PeriodicFunction sheaf_weight_function(const KloostermanSpec& spec);

// CSV with header "residue,re,im", 17 significant digits.
void write_csv(std::ostream& out, const PeriodicFunction& K);

}  // namespace d3::trace
