#pragma once

// Bilinear and trilinear sums of a p-periodic weight, measured against the
// trivial bound and the shape of the expected power saving, plus a direct
// evaluation of the fourth term of the combined Poisson-Voronoi formula.

#include <complex>
#include <iosfwd>
#include <vector>

#include "d3/exec.hpp"
#include "d3/identities.hpp"
#include "d3/trace_fn.hpp"
#include "d3/windows.hpp"

namespace d3::cancellation {

using cplx = std::complex<double>;
using ff::i64;
using ff::Prime;
using ff::u64;
using identities::DualWindow;
using trace::PeriodicFunction;
using windows::SmoothWindow;

// Saving exponent used for envelope display (strictly below 1/8).
constexpr double kBilinearSaving = 1.0 / 9.0;
// Epsilon in the trilinear envelope.
constexpr double kTrilinearEpsilon = 0.05;

struct BilinearReport {
  u64 p;
  double M1, M2;
  cplx sum;
  double trivial_bound;   // sum |V(m1/M1)| |W(m2/M2)| * sup|K|
  double nominal_bound;   // M1 M2 sup|K|
  double envelope;        // Q M1 M2 (1 + p/(M1 M2))^{1/2} p^{-1/9}
  double ratio_trivial;   // |sum| / trivial_bound
  double ratio_envelope;  // |sum| / envelope
};

// sum_{m1, m2 >= 1} K(m1 m2) V(m1/M1) W(m2/M2). V and W must be supported
// in [1/2, 2] (std::invalid_argument otherwise).
BilinearReport bilinear_sum(const PeriodicFunction& K, const SmoothWindow& V,
                            const SmoothWindow& W, double M1, double M2);

// Coefficients c(n) for 1 <= |n| <= N; c(0) is never read.
class Coefficients {
 public:
  Coefficients(i64 N, std::vector<cplx> values);  // values[n + N]
  static Coefficients ones(i64 N);

  i64 bound() const { return N_; }
  cplx operator()(i64 n) const { return v_[static_cast<std::size_t>(n + N_)]; }
  double l1() const;  // sum over n != 0 of |c(n)|

 private:
  i64 N_;
  std::vector<cplx> v_;
};

struct TrilinearReport {
  u64 p;
  i64 N1, N2, N3;
  cplx sum;
  double trivial_bound;   // l1(alpha) l1(beta) l1(gamma restricted) sup|K|
  double envelope;        // (log p)^{1/2} (N1N2N3)^{1/2+eps} (N1N2N3/sqrt p + N1N2 + N3 sqrt p)^{1/2}
  double ratio_envelope;
};

// sum over 1 <= |n_i| <= N_i with p not dividing n3 of
// alpha(n1) beta(n2) gamma(n3) K(n1 n2 n3). Throws std::invalid_argument
// when a coefficient exceeds 1 in modulus.
TrilinearReport trilinear_sum(const PeriodicFunction& K, const Coefficients& alpha,
                              const Coefficients& beta, const Coefficients& gamma,
                              const Exec& exec = {});

// The same sum regrouped as sum_{m} gamma(m) sum_{n} b(n) K(m n) with
// b = alpha * beta, the Dirichlet convolution over signed integers.
cplx trilinear_grouped(const PeriodicFunction& K, const Coefficients& alpha,
                       const Coefficients& beta, const Coefficients& gamma);

// (alpha * beta)(n) for 1 <= |n| <= N1 N2, as Coefficients with bound N1 N2.
Coefficients dirichlet_convolution(const Coefficients& alpha, const Coefficients& beta);

// p^{-2} sum_{n1 n2 != 0, p not dividing n3} V1^ V2^ V3^ Kl_3(a n1 n2 n3; p),
// the n_i grouped by residue and combined with a Kl_3 table.
cplx d_term_sum(const DualWindow& D1, const DualWindow& D2, const DualWindow& D3, i64 a);

// Mean over a in F_p^* of |sum| / (M M) for K = Kl_3(a .) weight, both
// windows the dyadic partition piece on [1/2, 2] at scale M.
double mean_bilinear_ratio(Prime p, double M, const Exec& exec = {});

// CSV: p,M1,M2,sum_re,sum_im,abs_sum,trivial_bound,nominal_bound,envelope,ratio_trivial,ratio_envelope
void write_csv(std::ostream& out, const std::vector<BilinearReport>& rows);
// CSV: p,N1,N2,N3,sum_re,sum_im,abs_sum,trivial_bound,envelope,ratio_envelope
void write_csv(std::ostream& out, const std::vector<TrilinearReport>& rows);

}  // namespace d3::cancellation
