#include "d3/selftest.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "d3/cancellation.hpp"
#include "d3/csv.hpp"
#include "d3/divisor.hpp"
#include "d3/experiments.hpp"
#include "d3/identities.hpp"
#include "d3/trace_fn.hpp"
#include "d3/windows.hpp"

namespace d3::selftest {

namespace {

using cplx = std::complex<double>;
using ff::i64;
using ff::Prime;
using ff::u64;
using trace::PeriodicFunction;

class Recorder {
 public:
  explicit Recorder(std::ostream& out)
      : w_(out, {"module", "check", "params", "value", "bound", "pass"}) {}

  // Passes when value <= bound.
  void at_most(const char* module, const char* check, const std::string& params,
               double value, double bound) {
    const bool pass = value <= bound;
    w_.row(module, check, params, value, bound, pass ? 1 : 0);
    ++outcome_.checks;
    if (!pass) ++outcome_.failures;
  }

  Outcome outcome() const { return outcome_; }

 private:
  csv::Writer w_;
  Outcome outcome_;
};

// Uniform in [-1, 1) from the raw generator, so the stream does not depend
// on the standard library's distribution implementations.
double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-52 - 1.0;
}

PeriodicFunction random_function(Prime p, std::mt19937_64& rng) {
  std::vector<cplx> v(p.value());
  for (auto& z : v) z = cplx(uniform(rng), uniform(rng));
  return PeriodicFunction(p, std::move(v));
}

std::string kv(const char* k, double v) { return std::string(k) + "=" + csv::format(v); }
std::string kv(const char* k, u64 v) { return std::string(k) + "=" + csv::format(v); }

void check_ff(Recorder& rec, std::mt19937_64& rng) {
  const auto primes = ff::primes_in(2, 10000);
  double sieve_mismatch = 0;
  std::size_t idx = 0;
  for (u64 n = 0; n <= 10000; ++n) {
    const bool in_list = idx < primes.size() && primes[idx] == n;
    if (in_list) ++idx;
    if (in_list != ff::is_prime(n)) ++sieve_mismatch;
  }
  rec.at_most("ff", "primality_vs_sieve", kv("limit", u64{10000}), sieve_mismatch, 0);

  double bad_inverse = 0;
  for (int i = 0; i < 200; ++i) {
    const Prime p(primes[rng() % primes.size()]);
    const i64 a = static_cast<i64>(1 + rng() % (p.value() - 1));
    const auto inv = ff::mod_inverse(ff::Residue(a, p));
    if ((ff::Residue(a, p) * inv).value() != 1) ++bad_inverse;
  }
  rec.at_most("ff", "inverse", kv("samples", u64{200}), bad_inverse, 0);
}

void check_trace(Recorder& rec, std::mt19937_64& rng, const Exec& exec) {
  const Prime p(97);
  double inv_err = 0, pars_err = 0;
  for (int i = 0; i < 10; ++i) {
    const auto K = random_function(p, rng);
    const auto K2 = trace::fourier(trace::fourier(K, exec), exec);
    double n1 = 0, n2 = 0;
    const auto Kh = trace::fourier(K, exec);
    for (u64 n = 0; n < p.value(); ++n) {
      inv_err = std::max(inv_err, std::abs(K2(static_cast<i64>(n)) - K(-static_cast<i64>(n))));
      n1 += std::norm(K.at_residue(n));
      n2 += std::norm(Kh.at_residue(n));
    }
    pars_err = std::max(pars_err, std::fabs(n1 - n2));
  }
  rec.at_most("trace_fn", "fourier_involution", kv("p", u64{97}), inv_err, 1e-12);
  rec.at_most("trace_fn", "parseval", kv("p", u64{97}), pars_err, 1e-10);

  for (int k = 2; k <= 3; ++k) {
    double worst = 0;
    for (u64 q : ff::primes_in(2, 60)) {
      const auto t = trace::kloosterman_all(k, Prime(q));
      for (u64 a = 1; a < q; ++a) worst = std::max(worst, std::abs(t[a]));
    }
    rec.at_most("trace_fn", "weil_bound", kv("k", static_cast<u64>(k)), worst, k);
  }

  for (u64 q : {13ULL, 31ULL}) {
    for (int k = 2; k <= 4; ++k) {
      const auto fast = trace::kloosterman_all(k, Prime(q));
      const auto slow = trace::kloosterman_all_direct(k, Prime(q), exec);
      double err = 0;
      for (u64 a = 0; a < q; ++a) err = std::max(err, std::abs(fast[a] - slow[a]));
      rec.at_most("trace_fn", "kloosterman_fft_vs_direct",
                  kv("p", q) + ";" + kv("k", static_cast<u64>(k)), err, 1e-10);
    }
  }
}

void check_windows(Recorder& rec) {
  for (double delta : {2.0, 1.1}) {
    const int levels = static_cast<int>(std::ceil(std::log(1e4) / std::log(delta))) + 2;
    const auto pieces = windows::partition(delta, levels);
    double err = 0;
    for (int i = 0; i < 1000; ++i) {
      const double xi = std::exp(std::log(1e4) * i / 999.0);
      double s = 0;
      for (const auto& piece : pieces) s += piece.window(xi);
      err = std::max(err, std::fabs(s - 1.0));
    }
    rec.at_most("windows", "partition_of_unity", kv("delta", delta), err, 1e-12);
  }
  const auto V = windows::partition_piece(2.0, 3).window;
  double err = 0;
  for (double xi : {0.0, 0.05, 0.1, 0.2}) {
    err = std::max(err, std::abs(windows::fourier_continuous(V, xi) -
                                 windows::fourier_continuous_gauss(V, xi)));
  }
  rec.at_most("windows", "trapezoid_vs_gauss", "M=8", err, 1e-10);
}

void check_identities(Recorder& rec, std::mt19937_64& rng, const Exec& exec) {
  const Prime p7(7), p11(11);
  const auto V4 = windows::partition_piece(2.0, 2).window;
  const auto V8 = windows::partition_piece(2.0, 3).window;

  const auto K = random_function(p7, rng);
  const auto poisson = identities::check_poisson(K, V8, 1e-8, exec);
  rec.at_most("identities", "poisson", poisson.params, poisson.residual, 1e-8);

  const auto Kv = random_function(p11, rng);
  const auto vor = identities::check_tempered_voronoi(Kv, V4, V8, 1e-7, exec);
  rec.at_most("identities", "tempered_voronoi", vor.params, vor.residual, 1e-7);

  const identities::DualWindow d1(V4, 11, 1e-11, exec), d3(V8, 11, 1e-11, exec);
  double worst = 0;
  for (i64 a = 1; a < 11; ++a) {
    const auto r = identities::compute_abcd(d1, d1, d3, PeriodicFunction::delta(p11, a), exec);
    worst = std::max(worst, r.residual / std::max(1e-6 * std::abs(r.lhs), 1e-8));
  }
  rec.at_most("identities", "combined_abcd_scaled", "p=11;scales=4,4,8", worst, 1.0);

  rec.at_most("identities", "bessel_kloosterman", "p=13",
              identities::check_lemma_1060(Prime(13), exec), 1e-10);

  double phi_fail = 0;
  for (i64 a = 1; a <= 300; ++a) phi_fail += identities::check_phi_identity(a).holds() ? 0 : 1;
  rec.at_most("identities", "phi_identity", "a<=300", phi_fail, 0);

  const auto cs = identities::check_coprime_sum(V8.scaled(4.0), 2, 7);
  rec.at_most("identities", "coprime_sum", "q=7;u=2", cs.deviation, cs.envelope);
}

void check_divisor(Recorder& rec, const Exec& exec) {
  const auto t = divisor::sieve_dk(2000, 3);
  std::vector<u64> brute(2001, 0);
  for (u64 a = 1; a <= 2000; ++a)
    for (u64 b = 1; a * b <= 2000; ++b)
      for (u64 c = 1; a * b * c <= 2000; ++c) ++brute[a * b * c];
  double mismatch = 0;
  for (u64 n = 1; n <= 2000; ++n) mismatch += t[n] != brute[n];
  rec.at_most("divisor", "sieve_vs_enumeration", "x=2000", mismatch, 0);

  const auto table = divisor::sieve_dk(10000, 3);
  const auto scan = divisor::unit_scan(table, Prime(97), exec);
  __int128 total = 0;
  u64 parts = 0;
  for (const auto& r : scan) {
    total += r.numerator;
    parts += r.S;
  }
  rec.at_most("divisor", "delta_sum_zero", "x=10000;q=97", static_cast<double>(total < 0 ? -total : total), 0);
  const double diff = static_cast<double>(parts) -
                      static_cast<double>(divisor::coprime_sum(table, Prime(97)));
  rec.at_most("divisor", "progression_partition", "x=10000;q=97", std::fabs(diff), 0);

  const auto V = windows::partition_piece(2.0, 2).window;
  const auto W = windows::partition_piece(2.0, 3).window;
  double bit_mismatch = 0;
  for (i64 a = 1; a < 11; ++a) {
    const double s = divisor::smooth_triple_sum(V, V, W, Prime(11), a);
    const cplx l = identities::triple_sum_direct(V, V, W, PeriodicFunction::delta(Prime(11), a));
    bit_mismatch += (s != l.real());
  }
  rec.at_most("divisor", "smooth_sum_matches_direct", "p=11", bit_mismatch, 0);

  const auto all = divisor::decompose_lemma964_coprime(300, Prime(7), 1.0);
  double by_class = 0;
  for (i64 a = 1; a < 7; ++a) by_class += divisor::decompose_lemma964(300, Prime(7), a, 1.0).reconstruction;
  rec.at_most("divisor", "decomposition_class_sum", "x=300;q=7;B=1",
              std::fabs(by_class - all.reconstruction), 1e-9 * std::max(1.0, all.reconstruction));
}

void check_cancellation(Recorder& rec, std::mt19937_64& rng, const Exec& exec) {
  const Prime p(31);
  auto coeffs = [&](i64 N) {
    std::vector<cplx> v(static_cast<std::size_t>(2 * N + 1));
    for (auto& z : v) z = std::polar(1.0, 3.0 * uniform(rng));
    v[static_cast<std::size_t>(N)] = 0.0;
    return cancellation::Coefficients(N, std::move(v));
  };
  const auto K = trace::sheaf_weight_function(trace::KloostermanSpec(3, ff::Residue(1, p)));
  const auto al = coeffs(4), be = coeffs(5), ga = coeffs(40);
  const auto direct = cancellation::trilinear_sum(K, al, be, ga, exec);
  const auto grouped = cancellation::trilinear_grouped(K, al, be, ga);
  rec.at_most("cancellation", "grouping_identity", "p=31;N=4,5,40",
              std::abs(direct.sum - grouped), 1e-10);
  rec.at_most("cancellation", "trilinear_trivial_bound", "p=31", std::abs(direct.sum),
              direct.trivial_bound);

  const auto piece = windows::partition_piece(2.0, 0).window;
  const auto b = cancellation::bilinear_sum(K, piece, piece, 8.0, 8.0);
  rec.at_most("cancellation", "bilinear_trivial_bound", "p=31;M=8", std::abs(b.sum),
              b.trivial_bound);

  const Prime p11(11);
  const identities::DualWindow d1(windows::partition_piece(2.0, 2).window, 11, 1e-11, exec);
  const identities::DualWindow d3(windows::partition_piece(2.0, 3).window, 11, 1e-11, exec);
  double err = 0;
  for (i64 a = 1; a < 11; ++a) {
    const auto r = identities::compute_abcd(d1, d1, d3, PeriodicFunction::delta(p11, a), exec);
    err = std::max(err, std::abs(r.termD - cancellation::d_term_sum(d1, d1, d3, a)));
  }
  rec.at_most("cancellation", "d_term_two_routes", "p=11", err, 1e-9);
}

void check_experiments(Recorder& rec, const Exec& exec) {
  windows::ExponentProfile boundary{12.0 / 23.0, 13.0 / 46.0, 13.0 / 46.0, 10.0 / 23.0, 1e-3};
  rec.at_most("experiments", "boundary_triple_neither", "kappa=12/23",
              windows::region_check(boundary) == windows::Region::Neither ? 0 : 1, 0);

  experiments::ScanConfig cfg;
  cfg.xs = {20000};
  cfg.theta = 0.45;
  cfg.unit_checks = 3;
  const auto recs = experiments::single_scan(cfg, exec);
  double worst = 0;
  const double L = divisor::log_scale(20000.0);
  for (const auto& r : recs) worst = std::max(worst, std::fabs(r.norm_delta));
  rec.at_most("experiments", "normalized_error_envelope", "x=20000;theta=0.45", worst, L * L * L);

  const auto table = divisor::sieve_dk(20000, 3);
  const auto avg = experiments::averaged_sum(table, 80.0, 1, 1.0, exec);
  rec.at_most("experiments", "sign_split_triangle", "x=20000;Q=80",
              std::fabs(avg.sigma0 - avg.sigma1) - avg.sum_abs_delta,
              1e-9 * std::max(1.0, avg.sum_abs_delta));
}

}  // namespace

Outcome run(std::ostream& csv, std::uint64_t seed, const Exec& exec) {
  Recorder rec(csv);
  std::mt19937_64 rng(seed);
  check_ff(rec, rng);
  check_trace(rec, rng, exec);
  check_windows(rec);
  check_identities(rec, rng, exec);
  check_divisor(rec, exec);
  check_cancellation(rec, rng, exec);
  check_experiments(rec, exec);
  return rec.outcome();
}

}  // namespace d3::selftest
