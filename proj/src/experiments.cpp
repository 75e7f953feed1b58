#include "d3/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <stdexcept>

#include "d3/csv.hpp"
#include "d3/summation.hpp"

namespace d3::experiments {

namespace {

int sign_of(__int128 v) { return (v > 0) - (v < 0); }
int sign_of(double v) { return (v > 0) - (v < 0); }

std::vector<u64> moduli_for(double Q, i64 a, int max_moduli) {
  std::vector<u64> out;
  for (u64 q : primes_near(Q)) {
    if (a % static_cast<i64>(q) == 0) continue;
    out.push_back(q);
    if (max_moduli > 0 && static_cast<int>(out.size()) >= max_moduli) break;
  }
  return out;
}

std::vector<double> q_values(const ScanConfig& cfg, u64 x) {
  if (!cfg.Qs.empty()) return cfg.Qs;
  return {std::pow(static_cast<double>(x), cfg.theta)};
}

u64 multiples_sum(const divisor::DivisorTable& table, u64 q) {
  u64 s = 0;
  for (u64 n = q; n <= table.limit; n += q) s += table[n];
  return s;
}

}  // namespace

void ScanConfig::validate() const {
  if (xs.empty()) throw std::invalid_argument("scan: no x values");
  if (!std::is_sorted(xs.begin(), xs.end())) throw std::invalid_argument("scan: x values must be ascending");
  for (u64 x : xs) {
    if (x < 2 || x > 1'000'000'000ULL) throw std::invalid_argument("scan: x must lie in [2, 10^9]");
  }
  if (!(theta >= 0.01 && theta <= 0.99)) {
    throw std::invalid_argument("scan: theta must lie in [1/100, 99/100]");
  }
  for (double Q : Qs) {
    if (!(Q > 1.0) || !(Q < static_cast<double>(xs.front()))) {
      throw std::invalid_argument("scan: Q must lie in (1, x)");
    }
  }
  if (a == 0) throw std::invalid_argument("scan: residue a must be nonzero");
  if (!(B >= 1.0)) throw std::invalid_argument("scan: B must be >= 1");
  if (!(A > 0.0)) throw std::invalid_argument("scan: A must be positive");
  if (max_moduli < 0 || unit_checks < 0) throw std::invalid_argument("scan: counts must be >= 0");
}

divisor::DivisorTable load_or_build(u64 x, const std::string& cache_dir) {
  if (cache_dir.empty()) return divisor::sieve_dk(x, 3);
  const std::filesystem::path path =
      std::filesystem::path(cache_dir) / ("d3_" + std::to_string(x) + ".bin");
  if (std::filesystem::exists(path)) {
    auto t = divisor::read_table(path);
    if (t.k == 3 && t.limit == x) return t;
  }
  auto t = divisor::sieve_dk(x, 3);
  std::filesystem::create_directories(cache_dir);
  divisor::write_table(path, t);
  return t;
}

std::vector<u64> primes_near(double Q) {
  if (!(Q >= 1.0)) return {};
  const u64 lo = static_cast<u64>(std::floor(Q)) + 1;
  const u64 hi = static_cast<u64>(std::floor(2.0 * Q));
  if (hi < lo) return {};
  return ff::primes_in(lo, hi);
}

std::vector<ScanRecord> single_scan(const ScanConfig& cfg, const Exec& exec) {
  cfg.validate();
  std::vector<ScanRecord> out;
  for (u64 x : cfg.xs) {
    const auto table = load_or_build(x, cfg.cache_dir);
    const u64 total = divisor::total_sum(table);
    for (double Q : q_values(cfg, x)) {
      const auto qs = moduli_for(Q, cfg.a, cfg.max_moduli);
      std::vector<ScanRecord> recs(qs.size());
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
      for (std::size_t i = 0; i < qs.size(); ++i) {
        const Prime q(qs[i]);
        const u64 S = divisor::progression_sum(table, q, cfg.a);
        recs[i] = divisor::make_record(x, qs[i], ff::reduce(cfg.a, qs[i]), S,
                                       total - multiples_sum(table, qs[i]));
      }
      const std::size_t checks = std::min<std::size_t>(qs.size(), cfg.unit_checks);
      for (std::size_t i = 0; i < checks; ++i) {
        const auto sweep = divisor::unit_scan(table, Prime(qs[i]), exec);
        const auto& mine = sweep[recs[i].a - 1];
        if (mine.numerator != recs[i].numerator) {
          throw std::logic_error("single_scan: unit sweep disagrees with the single record");
        }
      }
      out.insert(out.end(), recs.begin(), recs.end());
    }
  }
  return out;
}

AveragedReport averaged_sum(const divisor::DivisorTable& table, double Q, i64 a, double A,
                            const Exec& exec) {
  const u64 x = table.limit;
  const auto qs = moduli_for(Q, a, 0);
  const u64 total = divisor::total_sum(table);
  std::vector<u64> S(qs.size()), S_star(qs.size());
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (std::size_t i = 0; i < qs.size(); ++i) {
    S[i] = divisor::progression_sum(table, Prime(qs[i]), a);
    S_star[i] = total - multiples_sum(table, qs[i]);
  }

  // Ordered reduction, ascending q.
  __int128 sigma0 = 0;
  CompensatedSum sigma1, abs_delta;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const u64 phi = qs[i] - 1;
    const __int128 num = static_cast<__int128>(phi) * S[i] - S_star[i];
    const int c = sign_of(num);
    sigma0 += c * static_cast<__int128>(S[i]);
    sigma1 += c * (static_cast<double>(S_star[i]) / static_cast<double>(phi));
    abs_delta += std::fabs(static_cast<double>(num)) / static_cast<double>(phi);
  }
  const double L = divisor::log_scale(static_cast<double>(x));
  AveragedReport r;
  r.Q = Q;
  r.x = x;
  r.a = a;
  r.primes = qs.size();
  r.sum_abs_delta = abs_delta.value();
  r.sigma0 = static_cast<double>(sigma0);
  r.sigma1 = sigma1.value();
  r.scale = static_cast<double>(x) / std::pow(L, A);
  r.ratio = r.sum_abs_delta / r.scale;
  return r;
}

std::vector<AveragedReport> averaged_scan(const ScanConfig& cfg, const Exec& exec) {
  cfg.validate();
  std::vector<AveragedReport> out;
  for (u64 x : cfg.xs) {
    const auto table = load_or_build(x, cfg.cache_dir);
    for (double Q : q_values(cfg, x)) out.push_back(averaged_sum(table, Q, cfg.a, cfg.A, exec));
  }
  return out;
}

void balanced_levels(double x, double B, int levels[3]) {
  const double delta = 1.0 + std::pow(divisor::log_scale(x), -B);
  const int l = static_cast<int>(std::floor(std::log(x) / (3.0 * std::log(delta))));
  levels[0] = levels[1] = levels[2] = std::max(l, 0);
}

SmoothAveragedReport smooth_averaged_sum(double x, double Q, i64 a, double B,
                                         const int levels[3], const Exec& exec) {
  if (!(B >= 1.0)) throw std::invalid_argument("smooth_averaged_sum: B must be >= 1");
  const double delta = 1.0 + std::pow(divisor::log_scale(x), -B);
  std::vector<SmoothWindow> V;
  for (int i = 0; i < 3; ++i) V.push_back(windows::partition_piece(delta, levels[i]).window);
  const auto qs = moduli_for(Q, a, 0);
  std::vector<double> S(qs.size()), S_star(qs.size());
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const Prime q(qs[i]);
    S[i] = divisor::smooth_triple_sum(V[0], V[1], V[2], q, a);
    S_star[i] = divisor::smooth_coprime_sum(V[0], V[1], V[2], q);
  }
  CompensatedSum sigma0, sigma1, abs_delta;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double phi = static_cast<double>(qs[i] - 1);
    const double d = S[i] - S_star[i] / phi;
    const int c = sign_of(d);
    sigma0 += c * S[i];
    sigma1 += c * S_star[i] / phi;
    abs_delta += std::fabs(d);
  }
  SmoothAveragedReport r;
  r.Q = Q;
  r.x = static_cast<u64>(x);
  r.a = a;
  r.M1 = std::pow(delta, levels[0]);
  r.M2 = std::pow(delta, levels[1]);
  r.M3 = std::pow(delta, levels[2]);
  r.primes = qs.size();
  r.sum_abs_delta = abs_delta.value();
  r.sigma0 = sigma0.value();
  r.sigma1 = sigma1.value();
  return r;
}

Lemma64Result check_lemma_6_4(const std::vector<u64>& moduli, const std::vector<cplx>& sigma,
                              const SmoothWindow& V1, const SmoothWindow& V2,
                              const SmoothWindow& V3, double M2, double M3, double L,
                              double B) {
  if (moduli.size() != sigma.size()) {
    throw std::invalid_argument("check_lemma_6_4: one sigma per modulus");
  }
  for (const auto& s : sigma) {
    if (std::abs(s) > 1.0 + 1e-12) throw std::invalid_argument("check_lemma_6_4: |sigma_q| > 1");
  }
  const double vhat = windows::FourierSampler(V1).integral() *
                      windows::FourierSampler(V2).integral() *
                      windows::FourierSampler(V3).integral();
  CompensatedComplexSum lhs, density;
  double max_d3 = 0.0;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const u64 q = moduli[i];
    const double phi = static_cast<double>(ff::euler_phi(q));
    const double ratio = phi / static_cast<double>(q);
    if (sigma[i] != cplx(0.0)) {
      // S*(M; q) as a product of coprime sums needs q prime.
      lhs += sigma[i] * (divisor::smooth_coprime_sum(V1, V2, V3, Prime(q)) / phi);
      density += sigma[i] * (ratio * ratio * ratio / phi);
    }
    max_d3 = std::max(max_d3, std::pow(static_cast<double>(ff::divisor_count(q)), 3.0));
  }
  Lemma64Result r;
  r.lhs = lhs.value();
  r.main = vhat * density.value();
  r.deviation = std::abs(r.lhs - r.main);
  r.envelope = M2 * M3 * max_d3 * std::pow(L, 6.0 * B);
  return r;
}

BilinearRange bilinear_range(double x, double M, double Q, double R, double eta) {
  BilinearRange r;
  r.qr_below_x = Q * R < x;
  const double m = std::max({Q, Q * std::pow(R, 4) / x, std::sqrt(Q) * R,
                             std::pow(Q, 3) * std::pow(R, 4) / (x * x)});
  r.lower = std::pow(x, eta) * m;
  r.upper = std::pow(x, 1.0 - eta);
  r.holds = r.qr_below_x && r.lower < M && M < r.upper;
  return r;
}

void write_csv(std::ostream& out, const std::vector<AveragedReport>& rows) {
  csv::Writer w(out, {"Q", "x", "a", "sum_abs_delta", "sigma0", "sigma1", "scale"});
  for (const auto& r : rows) w.row(r.Q, r.x, r.a, r.sum_abs_delta, r.sigma0, r.sigma1, r.scale);
}

void write_csv(std::ostream& out, const std::vector<SmoothAveragedReport>& rows) {
  csv::Writer w(out, {"Q", "x", "a", "M1", "M2", "M3", "primes", "sum_abs_delta", "sigma0",
                      "sigma1"});
  for (const auto& r : rows) {
    w.row(r.Q, r.x, r.a, r.M1, r.M2, r.M3, r.primes, r.sum_abs_delta, r.sigma0, r.sigma1);
  }
}

}  // namespace d3::experiments
