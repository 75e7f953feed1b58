#include "d3/cancellation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "d3/csv.hpp"
#include "d3/summation.hpp"

namespace d3::cancellation {

BilinearReport bilinear_sum(const PeriodicFunction& K, const SmoothWindow& V,
                            const SmoothWindow& W, double M1, double M2) {
  constexpr double slack = 1e-12;
  for (const auto* w : {&V, &W}) {
    if (w->lo() < 0.5 - slack || w->hi() > 2.0 + slack) {
      throw std::invalid_argument("bilinear_sum: windows must be supported in [1/2, 2]");
    }
  }
  if (!(M1 >= 1.0) || !(M2 >= 1.0)) throw std::invalid_argument("bilinear_sum: scales must be >= 1");
  const SmoothWindow v = V.scaled(M1), w = W.scaled(M2);
  CompensatedComplexSum acc;
  CompensatedSum abs1, abs2;
  for (i64 m1 = v.first_integer(); m1 <= v.last_integer(); ++m1) {
    const double a = v(static_cast<double>(m1));
    abs1 += std::fabs(a);
    for (i64 m2 = w.first_integer(); m2 <= w.last_integer(); ++m2) {
      acc += K(m1 * m2) * (a * w(static_cast<double>(m2)));
    }
  }
  for (i64 m2 = w.first_integer(); m2 <= w.last_integer(); ++m2) {
    abs2 += std::fabs(w(static_cast<double>(m2)));
  }

  const double p = static_cast<double>(K.modulus().value());
  const double sup = K.sup_norm();
  const double Q = std::max(V.derivative_scale(), W.derivative_scale());
  BilinearReport r;
  r.p = K.modulus().value();
  r.M1 = M1;
  r.M2 = M2;
  r.sum = acc.value();
  r.trivial_bound = abs1.value() * abs2.value() * sup;
  r.nominal_bound = M1 * M2 * sup;
  r.envelope = Q * M1 * M2 * std::sqrt(1.0 + p / (M1 * M2)) * std::pow(p, -kBilinearSaving);
  const double s = std::abs(r.sum);
  r.ratio_trivial = r.trivial_bound > 0 ? s / r.trivial_bound : 0.0;
  r.ratio_envelope = s / r.envelope;
  return r;
}

Coefficients::Coefficients(i64 N, std::vector<cplx> values) : N_(N), v_(std::move(values)) {
  if (N < 1) throw std::invalid_argument("Coefficients: need N >= 1");
  if (v_.size() != static_cast<std::size_t>(2 * N + 1)) {
    throw std::invalid_argument("Coefficients: expected 2N + 1 values");
  }
}

Coefficients Coefficients::ones(i64 N) {
  std::vector<cplx> v(static_cast<std::size_t>(2 * N + 1), 1.0);
  v[static_cast<std::size_t>(N)] = 0.0;
  return Coefficients(N, std::move(v));
}

double Coefficients::l1() const {
  CompensatedSum s;
  for (i64 n = -N_; n <= N_; ++n) {
    if (n != 0) s += std::abs((*this)(n));
  }
  return s.value();
}

namespace {

void require_bounded(const Coefficients& c) {
  for (i64 n = -c.bound(); n <= c.bound(); ++n) {
    if (n != 0 && std::abs(c(n)) > 1.0 + 1e-12) {
      throw std::invalid_argument("trilinear_sum: coefficients must have modulus <= 1");
    }
  }
}

}  // namespace

TrilinearReport trilinear_sum(const PeriodicFunction& K, const Coefficients& alpha,
                              const Coefficients& beta, const Coefficients& gamma,
                              const Exec& exec) {
  require_bounded(alpha);
  require_bounded(beta);
  require_bounded(gamma);
  const u64 p = K.modulus().value();
  const i64 N1 = alpha.bound(), N2 = beta.bound(), N3 = gamma.bound();

  // One partial per n1, reduced in index order afterwards.
  std::vector<cplx> partial(static_cast<std::size_t>(2 * N1 + 1), 0.0);
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (i64 n1 = -N1; n1 <= N1; ++n1) {
    if (n1 == 0) continue;
    CompensatedComplexSum acc;
    for (i64 n2 = -N2; n2 <= N2; ++n2) {
      if (n2 == 0) continue;
      const cplx ab = alpha(n1) * beta(n2);
      for (i64 n3 = -N3; n3 <= N3; ++n3) {
        if (n3 == 0 || n3 % static_cast<i64>(p) == 0) continue;
        acc += ab * gamma(n3) * K(n1 * n2 * n3);
      }
    }
    partial[static_cast<std::size_t>(n1 + N1)] = acc.value();
  }
  CompensatedComplexSum total;
  for (const auto& v : partial) total += v;

  CompensatedSum g1;
  for (i64 n3 = -N3; n3 <= N3; ++n3) {
    if (n3 != 0 && n3 % static_cast<i64>(p) != 0) g1 += std::abs(gamma(n3));
  }
  const double pd = static_cast<double>(p);
  const double N = static_cast<double>(N1) * static_cast<double>(N2) * static_cast<double>(N3);
  TrilinearReport r;
  r.p = p;
  r.N1 = N1;
  r.N2 = N2;
  r.N3 = N3;
  r.sum = total.value();
  r.trivial_bound = alpha.l1() * beta.l1() * g1.value() * K.sup_norm();
  r.envelope = std::sqrt(std::log(pd)) * std::pow(N, 0.5 + kTrilinearEpsilon) *
               std::sqrt(N / std::sqrt(pd) + static_cast<double>(N1 * N2) +
                         static_cast<double>(N3) * std::sqrt(pd));
  r.ratio_envelope = std::abs(r.sum) / r.envelope;
  return r;
}

Coefficients dirichlet_convolution(const Coefficients& alpha, const Coefficients& beta) {
  const i64 N = alpha.bound() * beta.bound();
  std::vector<CompensatedComplexSum> acc(static_cast<std::size_t>(2 * N + 1));
  for (i64 n1 = -alpha.bound(); n1 <= alpha.bound(); ++n1) {
    if (n1 == 0) continue;
    for (i64 n2 = -beta.bound(); n2 <= beta.bound(); ++n2) {
      if (n2 == 0) continue;
      acc[static_cast<std::size_t>(n1 * n2 + N)] += alpha(n1) * beta(n2);
    }
  }
  std::vector<cplx> v(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) v[i] = acc[i].value();
  return Coefficients(N, std::move(v));
}

cplx trilinear_grouped(const PeriodicFunction& K, const Coefficients& alpha,
                       const Coefficients& beta, const Coefficients& gamma) {
  const Coefficients b = dirichlet_convolution(alpha, beta);
  const i64 p = static_cast<i64>(K.modulus().value());
  CompensatedComplexSum acc;
  for (i64 m = -gamma.bound(); m <= gamma.bound(); ++m) {
    if (m == 0 || m % p == 0) continue;
    for (i64 n = -b.bound(); n <= b.bound(); ++n) {
      if (n == 0) continue;
      const cplx bn = b(n);
      if (bn == cplx(0.0)) continue;
      acc += gamma(m) * bn * K(m * n);
    }
  }
  return acc.value();
}

cplx d_term_sum(const DualWindow& D1, const DualWindow& D2, const DualWindow& D3, i64 a) {
  const u64 p = D1.modulus();
  if (D2.modulus() != p || D3.modulus() != p) {
    throw std::invalid_argument("d_term_sum: dual windows built for different moduli");
  }
  const Prime prime(p);
  const u64 ar = ff::reduce(a, p);
  if (ar == 0) throw std::invalid_argument("d_term_sum: p divides a");
  const auto kl3 = trace::kloosterman_all(3, prime);
  const auto f1 = D1.residue_sums(DualWindow::Skip::Zero);
  const auto f2 = D2.residue_sums(DualWindow::Skip::Zero);
  const auto f3 = D3.residue_sums(DualWindow::Skip::Multiples);
  CompensatedComplexSum acc;
  for (u64 r1 = 0; r1 < p; ++r1) {
    for (u64 r2 = 0; r2 < p; ++r2) {
      const cplx f12 = f1[r1] * f2[r2];
      const u64 s = ff::mulmod(ar, ff::mulmod(r1, r2, p), p);
      for (u64 r3 = 1; r3 < p; ++r3) acc += f12 * f3[r3] * kl3[ff::mulmod(s, r3, p)];
    }
  }
  const double pd = static_cast<double>(p);
  return acc.value() / (pd * pd);
}

double mean_bilinear_ratio(Prime p, double M, const Exec& exec) {
  const u64 pv = p.value();
  const auto kl3 = trace::kloosterman_all(3, p);
  const SmoothWindow piece = windows::partition_piece(2.0, 0).window;
  const SmoothWindow v = piece.scaled(M);
  // Products m1 m2 mod p with their weights, shared by every a.
  std::vector<double> weight(pv, 0.0);
  {
    std::vector<CompensatedSum> acc(pv);
    for (i64 m1 = v.first_integer(); m1 <= v.last_integer(); ++m1) {
      for (i64 m2 = v.first_integer(); m2 <= v.last_integer(); ++m2) {
        acc[ff::reduce(m1 * m2, pv)] += v(static_cast<double>(m1)) * v(static_cast<double>(m2));
      }
    }
    for (u64 r = 0; r < pv; ++r) weight[r] = acc[r].value();
  }
  std::vector<double> ratio(pv, 0.0);
#pragma omp parallel for schedule(static) num_threads(exec.resolved())
  for (i64 a = 1; a < static_cast<i64>(pv); ++a) {
    // The sheaf weight for k = 3: K(n) = Kl_3(a n), K(0) = -1/p.
    CompensatedComplexSum acc;
    for (u64 r = 0; r < pv; ++r) {
      if (weight[r] == 0.0) continue;
      const u64 idx = ff::mulmod(static_cast<u64>(a), r, pv);
      const cplx k = r == 0 ? cplx(-1.0 / static_cast<double>(pv)) : kl3[idx];
      acc += k * weight[r];
    }
    ratio[static_cast<std::size_t>(a)] = std::abs(acc.value()) / (M * M);
  }
  CompensatedSum mean;
  for (u64 a = 1; a < pv; ++a) mean += ratio[a];
  return mean.value() / static_cast<double>(pv - 1);
}

void write_csv(std::ostream& out, const std::vector<BilinearReport>& rows) {
  csv::Writer w(out, {"p", "M1", "M2", "sum_re", "sum_im", "abs_sum", "trivial_bound",
                      "nominal_bound", "envelope", "ratio_trivial", "ratio_envelope"});
  for (const auto& r : rows) {
    w.row(r.p, r.M1, r.M2, r.sum.real(), r.sum.imag(), std::abs(r.sum), r.trivial_bound,
          r.nominal_bound, r.envelope, r.ratio_trivial, r.ratio_envelope);
  }
}

void write_csv(std::ostream& out, const std::vector<TrilinearReport>& rows) {
  csv::Writer w(out, {"p", "N1", "N2", "N3", "sum_re", "sum_im", "abs_sum", "trivial_bound",
                      "envelope", "ratio_envelope"});
  for (const auto& r : rows) {
    w.row(r.p, r.N1, r.N2, r.N3, r.sum.real(), r.sum.imag(), std::abs(r.sum),
          r.trivial_bound, r.envelope, r.ratio_envelope);
  }
}

}  // namespace d3::cancellation
