#pragma once

// Tables of d_k(n), progression sums of d_3 and their error terms, the
// smooth triple sums built from the logarithmic partition of unity, and the
// reconstruction of sharp progression sums from those smooth pieces.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "d3/exec.hpp"
#include "d3/ff.hpp"
#include "d3/windows.hpp"

namespace d3::divisor {

using ff::i64;
using ff::Prime;
using ff::u64;
using windows::SmoothWindow;

struct DivisorTable {
  u64 limit = 0;
  int k = 0;
  std::vector<std::uint32_t> values;  // values[n] = d_k(n), values[0] = 0

  std::uint32_t operator[](u64 n) const { return values[n]; }
};

// d_k(1..x) by k - 1 Dirichlet convolutions with the constant sequence 1.
// Throws std::invalid_argument unless 1 <= x <= 10^9 and k in {2, 3, 4};
// std::overflow_error if a value leaves 32 bits.
DivisorTable sieve_dk(u64 x, int k);

// Binary cache: "D3DT", uint32 k, uint64 x, then x + 1 little-endian
// uint32 counters. read_table throws std::runtime_error on a malformed file.
void write_table(const std::filesystem::path& path, const DivisorTable& table);
DivisorTable read_table(const std::filesystem::path& path);

// S(x; q, a) for x = table.limit. Throws std::invalid_argument when
// gcd(a, q) > 1.
u64 progression_sum(const DivisorTable& table, Prime q, i64 a);
// S*(x; q) and S(x).
u64 coprime_sum(const DivisorTable& table, Prime q);
u64 total_sum(const DivisorTable& table);

// Sums of d_k(n) over n <= x in every class mod q, entry [r]. The parallel
// version gives each thread a contiguous block and merges integer bins, so
// the result is identical to the serial one.
std::vector<u64> class_sums(const DivisorTable& table, u64 q, const Exec& exec = {});
std::vector<u64> class_sums_serial(const DivisorTable& table, u64 q);

struct ScanRecord {
  u64 x;
  u64 q;
  u64 a;
  u64 S;             // S(x; q, a)
  double main;       // S*(x; q) / phi(q)
  i64 numerator;     // phi(q) S(x; q, a) - S*(x; q), exact
  double delta;      // numerator / phi(q)
  double norm_delta; // q delta / x
};

ScanRecord error_term(const DivisorTable& table, Prime q, i64 a);

// Record from precomputed sums; S_star = S*(x; q) for prime q.
ScanRecord make_record(u64 x, u64 q, u64 a, u64 S, u64 S_star);

// One record per unit a = 1..q-1 from a single pass over the table. Throws
// std::logic_error if the exact numerators do not sum to zero.
std::vector<ScanRecord> unit_scan(const DivisorTable& table, Prime q, const Exec& exec = {});

// CSV header: x,q,a,S,main,delta,norm_delta
void write_csv(std::ostream& out, const std::vector<ScanRecord>& rows);

// sum over m1 m2 m3 = a mod q of V1(m1) V2(m2) V3(m3), by direct triple
// loop in ascending order with compensated accumulation.
double smooth_triple_sum(const SmoothWindow& V1, const SmoothWindow& V2,
                         const SmoothWindow& V3, Prime q, i64 a);
// Unrestricted sum (product of the three window sums).
double smooth_full_sum(const SmoothWindow& V1, const SmoothWindow& V2,
                       const SmoothWindow& V3);
// S*(M; q): the sum restricted to (m1 m2 m3, q) = 1.
double smooth_coprime_sum(const SmoothWindow& V1, const SmoothWindow& V2,
                          const SmoothWindow& V3, Prime q);

// log(2x), the logarithmic scale of the reductions.
double log_scale(double x);

struct Lemma964Report {
  u64 x;
  u64 q;
  i64 a;
  double B;
  double delta;          // 1 + L^{-B}
  int max_level;         // largest l1 + l2 + l3 with Delta^{l1+l2+l3} <= x
  double reconstruction; // sum over M1 M2 M3 <= x of S(M; q, a)
  double mn_window;      // same sum restricted to x L^{-B} <= M1 M2 M3 <= x
  u64 direct;            // S(x; q, a)
  double residual;       // reconstruction - direct
  u64 boundary_mass;     // sum_{x < n <= x Delta^3, n = a} d_3(n)
  double envelope;       // x q^{-1} L^{2 - B}
};

// Throws std::invalid_argument for B < 1 or gcd(a, q) > 1.
Lemma964Report decompose_lemma964(u64 x, Prime q, i64 a, double B);

// The same reconstruction for S*(x; q), enumerating triples coprime to q.
// Fields a, direct, boundary_mass refer to the coprime sums.
Lemma964Report decompose_lemma964_coprime(u64 x, Prime q, double B);

}  // namespace d3::divisor
