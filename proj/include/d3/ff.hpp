#pragma once

// Finite-field and elementary number theory primitives.

#include <complex>
#include <cstdint>
#include <vector>

namespace d3::ff {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m);

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(u64 n);

// A certified prime modulus.
class Prime {
 public:
  // Throws std::invalid_argument if n is not prime.
  explicit Prime(u64 n);

  u64 value() const { return value_; }
  operator u64() const { return value_; }

  friend bool operator==(Prime a, Prime b) { return a.value_ == b.value_; }

 private:
  u64 value_;
};

// Residue class modulo a prime, always stored reduced to [0, p).
class Residue {
 public:
  Residue(i64 value, Prime modulus);

  u64 value() const { return value_; }
  Prime modulus() const { return modulus_; }
  bool is_zero() const { return value_ == 0; }

  Residue operator*(Residue other) const;
  Residue operator-() const;

  friend bool operator==(Residue a, Residue b) {
    return a.value_ == b.value_ && a.modulus_ == b.modulus_;
  }

 private:
  Residue(u64 reduced, Prime modulus, int) : value_(reduced), modulus_(modulus) {}

  u64 value_;
  Prime modulus_;
};

// x mod m in [0, m) for signed x.
inline u64 reduce(i64 x, u64 m) {
  const i64 r = x % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

// Inverse by the extended Euclidean algorithm. Throws std::domain_error
// for the zero class.
Residue mod_inverse(Residue a);

// Table of all inverses 1..p-1 (entry 0 is 0), built by the linear
// recurrence inv[i] = -(p / i) * inv[p % i].
std::vector<u64> inverse_table(Prime p);

// e(r/p) for r in [0, p). Entries above p/2 are conjugates of p - r, so
// e(x/p) * e(-x/p) has unit modulus to rounding.
std::complex<double> unit_root(u64 r, u64 p);

// e(x/p) = exp(2 pi i x / p).
std::complex<double> additive_character(i64 x, Prime p);

// Immutable table of the p-th roots of unity e(k/p), k = 0..p-1.
class RootsOfUnity {
 public:
  explicit RootsOfUnity(Prime p);

  Prime modulus() const { return p_; }
  std::complex<double> operator[](u64 k) const { return table_[k]; }
  std::complex<double> at(i64 x) const { return table_[reduce(x, p_)]; }

 private:
  Prime p_;
  std::vector<std::complex<double>> table_;
};

// Primes in [lo, hi], ascending. lo below 2 is clamped to 2; lo > hi gives
// an empty result. Throws std::invalid_argument for hi > 2^63.
std::vector<u64> primes_in(u64 lo, u64 hi);

// Prime factorization by trial division, as (prime, exponent) pairs.
std::vector<std::pair<u64, int>> factorize(u64 n);

u64 euler_phi(u64 n);
u64 divisor_count(u64 n);
int mobius(u64 n);

// Smallest positive primitive root modulo p.
u64 primitive_root(Prime p);

}  // namespace d3::ff
