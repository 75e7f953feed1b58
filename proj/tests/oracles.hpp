#pragma once

// Slow, independent reference implementations used only by the tests.
// Nothing here calls into the library's kernels beyond plain types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using i64 = std::int64_t;
using u64 = std::uint64_t;

inline bool is_prime_trial(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline u64 inverse_search(u64 a, u64 p) {
  for (u64 b = 1; b < p; ++b)
    if ((a * b) % p == 1) return b;
  return 0;
}

inline u64 mod(i64 x, u64 m) {
  const i64 r = x % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

inline cplx e(double t) { return std::polar(1.0, 2.0 * std::numbers::pi * t); }

// K^(n) = p^{-1/2} sum_h K(h) e(hn/p), literal double loop.
inline std::vector<cplx> dft(const std::vector<cplx>& K) {
  const u64 p = K.size();
  std::vector<cplx> out(p);
  for (u64 n = 0; n < p; ++n) {
    cplx s = 0;
    for (u64 h = 0; h < p; ++h) s += K[h] * e(static_cast<double>((h * n) % p) / p);
    out[n] = s / std::sqrt(static_cast<double>(p));
  }
  return out;
}

// K'(n) = p^{-1/2} sum_{h != 0} K^(h) e(n inv(h)/p).
inline std::vector<cplx> voronoi(const std::vector<cplx>& K) {
  const u64 p = K.size();
  const auto kh = dft(K);
  std::vector<cplx> out(p);
  for (u64 n = 0; n < p; ++n) {
    cplx s = 0;
    for (u64 h = 1; h < p; ++h) s += kh[h] * e(static_cast<double>((n * inverse_search(h, p)) % p) / p);
    out[n] = s / std::sqrt(static_cast<double>(p));
  }
  return out;
}

// Kl_k(a; p) = p^{-(k-1)/2} sum_{x_1...x_k = a} e((x_1+...+x_k)/p),
// by looping over all p^k tuples in F_p^k.
inline cplx kloosterman(int k, u64 a, u64 p) {
  std::vector<u64> x(static_cast<std::size_t>(k), 0);
  cplx s = 0;
  for (;;) {
    u64 prod = 1, sum = 0;
    for (u64 v : x) {
      prod = (prod * v) % p;
      sum += v;
    }
    if (prod == a % p) s += e(static_cast<double>(sum % p) / p);
    int i = 0;
    while (i < k && ++x[static_cast<std::size_t>(i)] == p) x[static_cast<std::size_t>(i++)] = 0;
    if (i == k) break;
  }
  return s / std::pow(static_cast<double>(p), (k - 1) / 2.0);
}

// Ordered factorizations n = n_1 ... n_k, by recursion over divisors.
inline u64 dk_enumerate(u64 n, int k) {
  if (k == 1) return 1;
  u64 c = 0;
  for (u64 d = 1; d <= n; ++d)
    if (n % d == 0) c += dk_enumerate(n / d, k - 1);
  return c;
}

// d_k through the smallest-prime-factor sieve and the formula
// d_k(p^e) = C(e + k - 1, k - 1), multiplicatively.
inline std::vector<u64> dk_multiplicative(u64 x, int k) {
  std::vector<u64> spf(x + 1, 0);
  for (u64 i = 2; i <= x; ++i)
    if (spf[i] == 0)
      for (u64 j = i; j <= x; j += i)
        if (spf[j] == 0) spf[j] = i;
  std::vector<u64> d(x + 1, 0);
  if (x >= 1) d[1] = 1;
  for (u64 n = 2; n <= x; ++n) {
    u64 m = n, val = 1;
    while (m > 1) {
      const u64 p = spf[m];
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      u64 c = 1;  // C(e + k - 1, k - 1)
      for (int i = 1; i <= k - 1; ++i) c = c * static_cast<u64>(e + i) / static_cast<u64>(i);
      val *= c;
    }
    d[n] = val;
  }
  return d;
}

// #{(m1, m2, m3) : m1 m2 m3 <= x}.
inline u64 hyperbola_count(u64 x) {
  u64 c = 0;
  for (u64 a = 1; a <= x; ++a)
    for (u64 b = 1; a * b <= x; ++b) c += x / (a * b);
  return c;
}

// Composite Simpson for int f(t) e(-t xi) dt over [lo, hi].
inline cplx fourier_simpson(const std::function<double(double)>& f, double lo, double hi,
                            double xi, int intervals = 20000) {
  const double h = (hi - lo) / intervals;
  cplx s = 0;
  for (int j = 0; j <= intervals; ++j) {
    const double t = lo + j * h;
    const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    s += w * f(t) * e(-t * xi);
  }
  return s * h / 3.0;
}

inline u64 gcd(u64 a, u64 b) {
  while (b) {
    const u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline u64 phi_count(u64 n) {
  u64 c = 0;
  for (u64 k = 1; k <= n; ++k) c += gcd(k, n) == 1;
  return c;
}

}  // namespace oracle
