#include "d3/ff.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace d3::ff {

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  static constexpr u64 kSmall[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : kSmall) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // The first twelve primes as witnesses are sufficient below 3.3e24.
  for (u64 a : kSmall) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Prime::Prime(u64 n) : value_(n) {
  if (!is_prime(n)) {
    throw std::invalid_argument("not a prime modulus: " + std::to_string(n));
  }
}

Residue::Residue(i64 value, Prime modulus)
    : value_(reduce(value, modulus.value())), modulus_(modulus) {}

Residue Residue::operator*(Residue other) const {
  if (!(modulus_ == other.modulus_)) {
    throw std::invalid_argument("residues with different moduli");
  }
  return Residue(mulmod(value_, other.value_, modulus_), modulus_, 0);
}

Residue Residue::operator-() const {
  return Residue(value_ == 0 ? 0 : modulus_.value() - value_, modulus_, 0);
}

Residue mod_inverse(Residue a) {
  if (a.is_zero()) {
    throw std::domain_error("zero residue has no inverse");
  }
  // Extended Euclid on signed 128-bit to stay exact near 2^63.
  using i128 = __int128;
  i128 r0 = static_cast<i128>(a.modulus().value());
  i128 r1 = static_cast<i128>(a.value());
  i128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    const i128 q = r0 / r1;
    const i128 r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    const i128 t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  const i128 p = static_cast<i128>(a.modulus().value());
  i128 inv = t0 % p;
  if (inv < 0) inv += p;
  return Residue(static_cast<i64>(inv), a.modulus());
}

std::vector<u64> inverse_table(Prime p) {
  const u64 n = p.value();
  std::vector<u64> inv(n, 0);
  if (n > 1) inv[1] = 1;
  for (u64 i = 2; i < n; ++i) {
    inv[i] = (n - mulmod(n / i, inv[n % i], n)) % n;
  }
  return inv;
}

std::complex<double> unit_root(u64 r, u64 p) {
  if (r == 0) return {1.0, 0.0};
  const bool upper = 2 * r > p;
  const u64 k = upper ? p - r : r;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(p);
  const std::complex<double> z(std::cos(angle), std::sin(angle));
  return upper ? std::conj(z) : z;
}

std::complex<double> additive_character(i64 x, Prime p) {
  return unit_root(reduce(x, p.value()), p.value());
}

RootsOfUnity::RootsOfUnity(Prime p) : p_(p), table_(p.value()) {
  for (u64 k = 0; k < p.value(); ++k) table_[k] = unit_root(k, p.value());
}

namespace {

std::vector<u64> small_primes_upto(u64 n) {
  std::vector<bool> composite(n + 1, false);
  std::vector<u64> out;
  for (u64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

constexpr u64 kSieveSqrtLimit = u64{1} << 24;

}  // namespace

std::vector<u64> primes_in(u64 lo, u64 hi) {
  if (hi > (u64{1} << 63)) {
    throw std::invalid_argument("primes_in: upper bound exceeds 2^63");
  }
  lo = std::max<u64>(lo, 2);
  std::vector<u64> out;
  if (lo > hi) return out;

  u64 root = static_cast<u64>(std::sqrt(static_cast<long double>(hi)));
  while (root * root > hi) --root;
  while ((root + 1) * (root + 1) <= hi) ++root;

  if (root > kSieveSqrtLimit) {
    // Base primes would not fit comfortably; test candidates one by one.
    for (u64 n = lo; n <= hi && n >= lo; ++n) {
      if (is_prime(n)) out.push_back(n);
      if (n == hi) break;
    }
    return out;
  }

  const auto base = small_primes_upto(root);
  constexpr u64 kSegment = u64{1} << 18;
  std::vector<bool> composite;
  for (u64 start = lo; start <= hi; start += kSegment) {
    const u64 end = std::min(hi, start + kSegment - 1);
    composite.assign(end - start + 1, false);
    for (u64 p : base) {
      if (p * p > end) break;
      u64 first = std::max(p * p, (start + p - 1) / p * p);
      for (u64 j = first; j <= end; j += p) composite[j - start] = true;
    }
    for (u64 n = start; n <= end; ++n) {
      if (!composite[n - start]) out.push_back(n);
    }
    if (end == hi) break;
  }
  return out;
}

std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<std::pair<u64, int>> out;
  for (u64 d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d != 0) continue;
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

u64 euler_phi(u64 n) {
  if (n == 0) return 0;
  u64 phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

u64 divisor_count(u64 n) {
  if (n == 0) return 0;
  u64 d = 1;
  for (auto [p, e] : factorize(n)) d *= static_cast<u64>(e + 1);
  return d;
}

int mobius(u64 n) {
  int sign = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

u64 primitive_root(Prime p) {
  const u64 n = p.value();
  if (n == 2) return 1;
  const auto factors = factorize(n - 1);
  for (u64 g = 2; g < n; ++g) {
    bool ok = true;
    for (auto [f, e] : factors) {
      if (powmod(g, (n - 1) / f, n) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found");
}

}  // namespace d3::ff
