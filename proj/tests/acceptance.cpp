// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <chrono>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "d3/cancellation.hpp"
#include "d3/divisor.hpp"
#include "d3/experiments.hpp"
#include "d3/ff.hpp"
#include "d3/identities.hpp"
#include "d3/selftest.hpp"
#include "d3/trace_fn.hpp"
#include "d3/windows.hpp"
#include "oracles.hpp"

using namespace d3;
using cplx = std::complex<double>;
using ff::i64;
using ff::Prime;
using ff::u64;
using trace::PeriodicFunction;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

PeriodicFunction random_function(Prime p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(p.value());
  for (auto& z : v) z = {u(rng), u(rng)};
  return PeriodicFunction(p, v);
}

windows::SmoothWindow piece_at(double M) { return windows::piece_at_scale(2.0, M); }

// 1. Involution and Parseval, 100 random functions per prime.
Verdict involution_parseval() {
  std::mt19937_64 rng(1);
  double inv = 0, pars = 0;
  for (u64 p : {7ULL, 97ULL, 499ULL}) {
    for (int i = 0; i < 100; ++i) {
      const auto K = random_function(Prime(p), rng);
      const auto K1 = trace::fourier(K);
      const auto K2 = trace::fourier(K1);
      double a = 0, b = 0;
      for (u64 n = 0; n < p; ++n) {
        inv = std::max(inv, std::abs(K2(static_cast<i64>(n)) - K(-static_cast<i64>(n))));
        a += std::norm(K.at_residue(n));
        b += std::norm(K1.at_residue(n));
      }
      pars = std::max(pars, std::fabs(a - b));
    }
  }
  return {inv <= 1e-12 && pars <= 1e-10, "involution " + fmt(inv) + " <= 1e-12, parseval " + fmt(pars) + " <= 1e-10"};
}

// 2. Weil bound from direct enumeration.
Verdict weil_bound() {
  double worst = 0;
  int primes = 0;
  for (u64 p : ff::primes_in(2, 200)) {
    ++primes;
    for (int k : {2, 3}) {
      const auto t = trace::kloosterman_all_direct(k, Prime(p));
      for (u64 a = 1; a < p; ++a) worst = std::max(worst, std::abs(t[a]) / k);
    }
  }
  return {worst <= 1.0, std::to_string(primes) + " primes, max |Kl_k|/k = " + fmt(worst)};
}

// 3. Convolution path against direct evaluation.
Verdict kloosterman_paths() {
  double worst = 0;
  for (u64 p : ff::primes_in(2, 101)) {
    for (int k : {2, 3, 4}) {
      const auto fast = trace::kloosterman_all(k, Prime(p));
      const auto slow = trace::kloosterman_all_direct(k, Prime(p));
      for (u64 a = 0; a < p; ++a) worst = std::max(worst, std::abs(fast[a] - slow[a]));
    }
  }
  return {worst <= 1e-10, "max entry gap " + fmt(worst) + " <= 1e-10"};
}

// 4. Poisson over (random K, partition pieces, q) and tempered Voronoi.
Verdict poisson_voronoi() {
  std::mt19937_64 rng(4);
  double pois = 0, vor = 0;
  int n = 0;
  for (u64 q : {7ULL, 97ULL, 499ULL}) {
    for (int l = 1; l <= 8; ++l) {
      const auto V = windows::partition_piece(2.0, l).window;
      for (int rep = 0; rep < 3; ++rep) {
        pois = std::max(pois, identities::check_poisson(random_function(Prime(q), rng), V, 1e-8).residual);
        ++n;
      }
      pois = std::max(pois, identities::check_poisson(PeriodicFunction::delta(Prime(q), 1), V, 1e-8).residual);
      ++n;
    }
  }
  int m = 0;
  for (u64 p : {11ULL, 101ULL}) {
    const std::vector<PeriodicFunction> Ks = {random_function(Prime(p), rng), PeriodicFunction::delta(Prime(p), 2),
                                              PeriodicFunction::constant(Prime(p), 1.0)};
    for (const auto& K : Ks) {
      for (auto [a, b] : {std::pair{3, 3}, std::pair{4, 4}, std::pair{3, 5}}) {
        vor = std::max(vor, identities::check_tempered_voronoi(K, windows::partition_piece(2.0, a).window,
                                                                windows::partition_piece(2.0, b).window, 1e-7)
                                .residual);
        ++m;
      }
    }
  }
  return {pois <= 1e-8 && vor <= 1e-7, std::to_string(n) + " Poisson cases max " + fmt(pois) + " <= 1e-8, " +
                                           std::to_string(m) + " Voronoi cases max " + fmt(vor) + " <= 1e-7"};
}

// 5. S = A + B + C + D for every delta_a.
Verdict combined_formula() {
  double worst = 0;  // residual / allowed
  double worst_abs = 0;
  int n = 0;
  for (u64 p : {11ULL, 101ULL}) {
    for (auto sc : {std::array<double, 3>{4, 4, 8}, std::array<double, 3>{8, 16, 32}}) {
      const identities::DualWindow d1(piece_at(sc[0]), p, 1e-11), d2(piece_at(sc[1]), p, 1e-11),
          d3(piece_at(sc[2]), p, 1e-11);
      for (i64 a = 1; a < static_cast<i64>(p); ++a) {
        const auto r = identities::compute_abcd(d1, d2, d3, PeriodicFunction::delta(Prime(p), a));
        worst = std::max(worst, r.residual / std::max(1e-6 * std::abs(r.lhs), 1e-8));
        worst_abs = std::max(worst_abs, r.residual);
        ++n;
      }
    }
  }
  return {worst <= 1.0, std::to_string(n) + " cases, max residual " + fmt(worst_abs) +
                            ", max residual/allowance " + fmt(worst) + " <= 1"};
}

// 6. Bessel transform of delta_a against Kl_3, every p <= 53.
Verdict lemma_1060() {
  double worst = 0;
  for (u64 p : ff::primes_in(2, 53)) worst = std::max(worst, identities::check_lemma_1060(Prime(p)));
  return {worst <= 1e-10, "max deviation " + fmt(worst) + " <= 1e-10"};
}

// 7. phi identity in exact rationals.
Verdict phi_identity() {
  int bad = 0;
  for (i64 a = 1; a <= 1000; ++a) bad += !identities::check_phi_identity(a).holds();
  return {bad == 0, std::to_string(bad) + " failures for a <= 1000"};
}

// 8. Sieve against triple enumeration, and the hyperbola count.
Verdict sieve_and_hyperbola() {
  const u64 n = 10000;
  const auto t = divisor::sieve_dk(n, 3);
  std::vector<u64> brute(n + 1, 0);
  for (u64 a = 1; a <= n; ++a)
    for (u64 b = 1; a * b <= n; ++b)
      for (u64 c = 1; a * b * c <= n; ++c) ++brute[a * b * c];
  u64 bad = 0;
  for (u64 m = 1; m <= n; ++m) bad += t[m] != brute[m];
  const auto big = divisor::sieve_dk(100000, 3);
  const u64 total = divisor::total_sum(big), count = oracle::hyperbola_count(100000);
  return {bad == 0 && total == count, std::to_string(bad) + " mismatches n <= 1e4; sum d3 = " +
                                          std::to_string(total) + " vs " + std::to_string(count)};
}

// 9. Partition of unity on 1e4 log-spaced points in [1, 1e3].
Verdict partition_of_unity() {
  double worst = 0;
  for (double delta : {2.0, 1.1, 1.01}) {
    const int lmax = static_cast<int>(std::ceil(std::log(1e3) / std::log(delta))) + 2;
    const auto pieces = windows::partition(delta, lmax);
    for (int i = 0; i < 10000; ++i) {
      const double xi = std::exp(std::log(1e3) * i / 9999.0);
      double s = 0;
      for (const auto& p : pieces) s += p.window(xi);
      worst = std::max(worst, std::fabs(s - 1.0));
    }
  }
  return {worst <= 1e-12, "max |sum - 1| = " + fmt(worst) + " <= 1e-12"};
}

const std::vector<u64> kGrid = {100000, 1000000, 10000000};

// 10. Exact progression partition on the scan grid.
Verdict exact_partition(const std::vector<divisor::DivisorTable>& tables) {
  int pairs = 0, bad = 0;
  for (const auto& t : tables) {
    for (u64 q : experiments::primes_near(std::pow(static_cast<double>(t.limit), 0.45))) {
      const auto recs = divisor::unit_scan(t, Prime(q));  // throws unless sum Delta = 0
      u64 s = 0;
      __int128 num = 0;
      for (const auto& r : recs) {
        s += r.S;
        num += r.numerator;
      }
      bad += s != divisor::coprime_sum(t, Prime(q)) || num != 0;
      ++pairs;
    }
  }
  return {bad == 0, std::to_string(pairs) + " (x, q) pairs, " + std::to_string(bad) + " inexact"};
}

// 11. Trilinear sum equals its regrouped bilinear form.
Verdict grouping_identity() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
  auto coeffs = [&](i64 N) {
    std::vector<cplx> v(static_cast<std::size_t>(2 * N + 1));
    for (auto& z : v) z = std::polar(1.0, u(rng));
    v[static_cast<std::size_t>(N)] = 0.0;
    return cancellation::Coefficients(N, std::move(v));
  };
  double worst = 0;
  int n = 0;
  for (u64 p : {7ULL, 31ULL, 101ULL, 211ULL}) {
    for (int k : {2, 3}) {
      const auto K = trace::sheaf_weight_function(trace::KloostermanSpec(k, ff::Residue(2, Prime(p))));
      for (auto N : {std::array<i64, 3>{3, 4, 30}, std::array<i64, 3>{8, 8, 100}}) {
        const auto a = coeffs(N[0]), b = coeffs(N[1]), c = coeffs(N[2]);
        worst = std::max(worst, std::abs(cancellation::trilinear_sum(K, a, b, c).sum -
                                         cancellation::trilinear_grouped(K, a, b, c)));
        const auto o1 = cancellation::Coefficients::ones(N[0]), o2 = cancellation::Coefficients::ones(N[1]),
                   o3 = cancellation::Coefficients::ones(N[2]);
        worst = std::max(worst, std::abs(cancellation::trilinear_sum(K, o1, o2, o3).sum -
                                         cancellation::trilinear_grouped(K, o1, o2, o3)));
        n += 2;
      }
    }
  }
  return {worst <= 1e-10, std::to_string(n) + " instances, max gap " + fmt(worst) + " <= 1e-10"};
}

// 12. Decay table (report only) and the L^3 envelope.
Verdict decay_table(const std::vector<divisor::DivisorTable>& tables) {
  bool ok = true;
  std::ostringstream rep;
  rep << "\n      x          Q     primes  max q|D|/x  mean q|D|/x  L^3     sum|D|/(x/L)";
  for (const auto& t : tables) {
    const double x = static_cast<double>(t.limit);
    const double Q = std::pow(x, 0.45);
    const double L = divisor::log_scale(x);
    const u64 total = divisor::total_sum(t);
    double worst = 0, mean = 0;
    const auto qs = experiments::primes_near(Q);
    for (u64 q : qs) {
      u64 mult = 0;
      for (u64 n = q; n <= t.limit; n += q) mult += t[n];
      const auto r = divisor::make_record(t.limit, q, 1, divisor::progression_sum(t, Prime(q), 1), total - mult);
      worst = std::max(worst, std::fabs(r.norm_delta));
      mean += std::fabs(r.norm_delta);
    }
    mean /= static_cast<double>(qs.size());
    const auto avg = experiments::averaged_sum(t, Q, 1, 1.0);
    ok &= worst <= L * L * L;
    char line[160];
    std::snprintf(line, sizeof line, "\n      %-10.0f %-9.1f %-7zu %-11.4g %-12.4g %-7.1f %.4g", x, Q, qs.size(),
                  worst, mean, L * L * L, avg.ratio);
    rep << line;
  }
  return {ok, "q|D|/x <= L^3 on the grid" + rep.str()};
}

// 13. selftest CSV independent of thread count and repeatable.
Verdict determinism() {
  std::ostringstream a, b, c;
  const auto ra = selftest::run(a, 7, Exec{1});
  const auto rb = selftest::run(b, 7, Exec{4});
  const auto rc = selftest::run(c, 7, Exec{1});
  const bool same = a.str() == b.str() && a.str() == c.str();
  return {same && ra.ok() && rb.ok() && rc.ok(),
          std::string(same ? "byte-identical" : "outputs differ") + " across threads 1/4 (" + std::to_string(ra.checks) +
              " checks, " + std::to_string(ra.failures) + " failures)"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, double limit_s, const std::function<Verdict()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = v.pass;
    std::string timing = fmt(secs) + " s";
    if (limit_s > 0) {
      timing += " (limit " + fmt(limit_s) + " s)";
      pass = pass && secs < limit_s;
    }
    failed += !pass;
    std::printf("[%s] %2d %-28s %s; %s\n", pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  };

  report(1, "fourier involution/parseval", 10, involution_parseval);
  report(2, "weil bound", 60, weil_bound);
  report(3, "kloosterman fft vs direct", 0, kloosterman_paths);
  report(4, "poisson / tempered voronoi", 0, poisson_voronoi);
  report(5, "combined formula A+B+C+D", 300, combined_formula);
  report(6, "bessel transform vs Kl_3", 0, lemma_1060);
  report(7, "phi identity", 0, phi_identity);
  report(8, "d3 sieve / hyperbola", 0, sieve_and_hyperbola);
  report(9, "partition of unity", 0, partition_of_unity);

  std::vector<divisor::DivisorTable> tables;
  const auto t0 = std::chrono::steady_clock::now();
  for (u64 x : kGrid) tables.push_back(divisor::sieve_dk(x, 3));
  const double sieve_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  report(10, "exact progression partition", 0, [&] { return exact_partition(tables); });
  report(11, "trilinear grouping identity", 0, grouping_identity);
  report(12, "decay table (report only)", 900 - sieve_secs, [&] { return decay_table(tables); });
  report(13, "selftest determinism", 0, determinism);

  std::printf("%d of 13 criteria failed\n", failed);
  return failed ? 1 : 0;
}
