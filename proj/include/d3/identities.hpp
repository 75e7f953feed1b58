#pragma once

// Numerical verification of the exact summation identities: Poisson in
// progressions, tempered Voronoi modulo primes, the combined three-variable
// formula S = A + B + C + D, the Bessel/Kloosterman link, the coprime sum
// asymptotic and the divisor-sum phi identity.
//
// Each check evaluates its two sides along separate code paths: the
// arithmetic side by direct summation over integers, the dual side through
// discrete and continuous Fourier transforms.

#include <boost/rational.hpp>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "d3/exec.hpp"
#include "d3/trace_fn.hpp"
#include "d3/windows.hpp"

namespace d3::identities {

using cplx = std::complex<double>;
using ff::i64;
using ff::Prime;
using ff::u64;
using trace::PeriodicFunction;
using windows::SmoothWindow;

// Raised when a dual sum cannot be truncated within the requested
// tolerance (window too rough for the quadrature grid or modulus).
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// V^(n/q) for |n| <= N, with N chosen by truncation_index at a given
// tolerance. Built once per (window, modulus) and reused across checks.
class DualWindow {
 public:
  DualWindow(const SmoothWindow& V, u64 q, double tol, const Exec& exec = {});

  const SmoothWindow& window() const { return window_; }
  u64 modulus() const { return q_; }
  i64 cutoff() const { return cutoff_; }
  double tail_bound() const { return tail_; }

  cplx at(i64 n) const { return values_[static_cast<std::size_t>(n + cutoff_)]; }
  double integral() const { return integral_; }  // V^(0)

  // Sums of V^(n/q) over |n| <= N with optional exclusions.
  cplx sum_all() const;
  cplx sum_excluding_multiples() const;  // q does not divide n

  // F[r] = sum_{|n| <= N, n = r mod q} V^(n/q), optionally skipping n = 0
  // or every multiple of q.
  enum class Skip { None, Zero, Multiples };
  std::vector<cplx> residue_sums(Skip skip) const;

 private:
  SmoothWindow window_;
  u64 q_;
  i64 cutoff_;
  double tail_;
  double integral_;
  std::vector<cplx> values_;
};

struct IdentityResult {
  std::string name;
  std::string params;
  cplx lhs;
  cplx rhs;
  double residual;
  double tail_bound;
};

// sum_n K(n) V(n) against q^{-1/2} sum_m K^(m) V^(m/q).
// Throws TruncationError when the dual tail exceeds tol / 10.
IdentityResult check_poisson(const PeriodicFunction& K, const SmoothWindow& V,
                             double tol, const Exec& exec = {});

// sum_{n = a mod q} V(n) against q^{-1} sum_m e(am/q) V^(m/q).
IdentityResult check_poisson_progression(const SmoothWindow& V, Prime q, i64 a,
                                         double tol, const Exec& exec = {});

// sum_{m,n} K(mn) V(m) W(n) against
// K^(0) p^{-1/2} sum V sum W + p^{-1} sum_{m,n} K'(mn) V^(m/p) W^(n/p),
// for the product weight G(m, n) = V(m) W(n).
IdentityResult check_tempered_voronoi(const PeriodicFunction& K, const SmoothWindow& V,
                                      const SmoothWindow& W, double tol,
                                      const Exec& exec = {});

struct TripleSumReport {
  cplx lhs;
  cplx termA, termB, termC, termD;
  double residual;  // |lhs - (A + B + C + D)|
  i64 cutoff[3];
  double tail[3];

  cplx rhs() const { return termA + termB + termC + termD; }
};

// Direct S(V; p, K) = sum V1(m1) V2(m2) V3(m3) K(m1 m2 m3), ascending
// m1, m2, m3 with compensated accumulation.
cplx triple_sum_direct(const SmoothWindow& V1, const SmoothWindow& V2,
                       const SmoothWindow& V3, const PeriodicFunction& K);

// The combined Poisson-Voronoi decomposition. K must vanish at 0
// (std::invalid_argument otherwise). Dual sums are truncated at tol / 10.
TripleSumReport compute_abcd(const SmoothWindow& V1, const SmoothWindow& V2,
                             const SmoothWindow& V3, const PeriodicFunction& K,
                             double tol = 1e-9, const Exec& exec = {});

// Same decomposition with the dual windows supplied by the caller, so a
// sweep over many K at one modulus pays for the quadrature once.
TripleSumReport compute_abcd(const DualWindow& D1, const DualWindow& D2,
                             const DualWindow& D3, const PeriodicFunction& K,
                             const Exec& exec = {});

// max over a, n in F_p^* and every x of
// |K~_{delta_a}(x, n) - Kl_3(a n x; p) / sqrt(p)|.
double check_lemma_1060(Prime p, const Exec& exec = {});

struct CoprimeSumResult {
  double lhs;        // sum_{(m, q) = 1} V(u m)
  double main;       // phi(q) / (q u) * V^(0)
  double deviation;  // |lhs - main|
  double envelope;   // d(q) * Q^2, Q the window's derivative scale
};

CoprimeSumResult check_coprime_sum(const SmoothWindow& V, u64 u, u64 q);

struct PhiIdentityResult {
  boost::rational<i64> lhs;
  i64 rhs;
  bool holds() const { return lhs == boost::rational<i64>(rhs); }
};

// sum over ordered a = d1 d2 d3 of phi(d2 d3) phi(d3) / (d2 d3), exactly.
PhiIdentityResult check_phi_identity(i64 a);

// CSV header: identity,params,lhs_re,lhs_im,rhs_re,rhs_im,residual,tail_bound
void write_csv(std::ostream& out, const std::vector<IdentityResult>& rows);

}  // namespace d3::identities
