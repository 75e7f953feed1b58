#pragma once

// Empirical studies on top of the divisor tables: error terms for single
// moduli, sums of |Delta| over prime moduli q ~ Q with the sign split
// Sigma_0 - Sigma_1, the coprime main-term lemma, and the hypotheses of
// the bilinear Kloosterman-sum input as plain exponent arithmetic.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "d3/divisor.hpp"
#include "d3/exec.hpp"
#include "d3/ff.hpp"
#include "d3/windows.hpp"

namespace d3::experiments {

using cplx = std::complex<double>;
using divisor::ScanRecord;
using ff::i64;
using ff::Prime;
using ff::u64;
using windows::SmoothWindow;

struct ScanConfig {
  std::vector<u64> xs;        // ascending
  double theta = 0.45;        // moduli q ~ x^theta, i.e. x^theta < q <= 2 x^theta
  std::vector<double> Qs;     // explicit Q values; when empty Q = x^theta
  i64 a = 1;
  double A = 1.0;
  double B = 1.0;
  int max_moduli = 0;         // 0 keeps every prime in range
  int unit_checks = 2;        // moduli per x that get the full sweep over a
  std::string cache_dir;      // when set, d_3 tables are read from / written to it

  // Throws std::invalid_argument: empty or unsorted xs, x outside
  // [2, 10^9], theta outside [1/100, 99/100], Q outside (1, x), a == 0.
  void validate() const;
};

// d_3 up to x, through the binary cache in cache_dir when it is non-empty.
divisor::DivisorTable load_or_build(u64 x, const std::string& cache_dir);

// Primes q with Q < q <= 2Q.
std::vector<u64> primes_near(double Q);

// Error terms for every prime q ~ x^theta not dividing a, for each x. The
// first unit_checks moduli per x also run divisor::unit_scan, which throws
// std::logic_error if sum_a Delta(x; q, a) != 0.
std::vector<ScanRecord> single_scan(const ScanConfig& cfg, const Exec& exec = {});

struct AveragedReport {
  double Q;
  u64 x;
  i64 a;
  u64 primes;             // number of q ~ Q with q not dividing a
  double sum_abs_delta;   // sum |Delta(x; q, a)|
  double sigma0;          // sum c_q S(x; q, a)
  double sigma1;          // sum c_q S*(x; q) / phi(q)
  double scale;           // x / L^A
  double ratio;           // sum_abs_delta / scale
};

// Sharp sign convention: c_q = sign Delta(x; q, a), and c_q = 0 when q | a.
std::vector<AveragedReport> averaged_scan(const ScanConfig& cfg, const Exec& exec = {});

// Same sum for a single table, reused by averaged_scan.
AveragedReport averaged_sum(const divisor::DivisorTable& table, double Q, i64 a, double A,
                            const Exec& exec = {});

// Smooth sign convention: c_q = sign(S(M; q, a) - S*(M; q) / phi(q)) for one
// triple of partition pieces M_i = Delta^{l_i}.
struct SmoothAveragedReport {
  double Q;
  u64 x;
  i64 a;
  double M1, M2, M3;
  u64 primes;
  double sum_abs_delta;
  double sigma0;
  double sigma1;
};

SmoothAveragedReport smooth_averaged_sum(double x, double Q, i64 a, double B,
                                         const int levels[3], const Exec& exec = {});

// Levels l_i with Delta^{l_i} close to x^{1/3}, Delta = 1 + L^{-B}.
void balanced_levels(double x, double B, int levels[3]);

struct Lemma64Result {
  cplx lhs;          // sum sigma_q S*(M; q) / phi(q)
  cplx main;         // V1^(0) V2^(0) V3^(0) sum sigma_q (phi(q)/q)^3 / phi(q)
  double deviation;  // |lhs - main|
  double envelope;   // M2 M3 max d(q)^3 L^{6B}
};

// Throws std::invalid_argument if sizes differ or some |sigma_q| > 1.
Lemma64Result check_lemma_6_4(const std::vector<u64>& moduli, const std::vector<cplx>& sigma,
                              const SmoothWindow& V1, const SmoothWindow& V2,
                              const SmoothWindow& V3, double M2, double M3, double L,
                              double B);

// The size conditions QR < x, MN = x and
// x^{1 - eta} > M > x^eta max{Q, QR^4/x, Q^{1/2} R, Q^3 R^4 / x^2}.
struct BilinearRange {
  bool qr_below_x;
  double lower;   // x^eta max{...}
  double upper;   // x^{1 - eta}
  bool holds;     // qr_below_x and lower < M < upper
};

BilinearRange bilinear_range(double x, double M, double Q, double R, double eta);

// CSV: Q,x,a,sum_abs_delta,sigma0,sigma1,scale
void write_csv(std::ostream& out, const std::vector<AveragedReport>& rows);
// CSV: Q,x,a,M1,M2,M3,primes,sum_abs_delta,sigma0,sigma1
void write_csv(std::ostream& out, const std::vector<SmoothAveragedReport>& rows);

}  // namespace d3::experiments
