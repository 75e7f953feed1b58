#include "d3/identities.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "d3/csv.hpp"
#include "d3/summation.hpp"

namespace d3::identities {

namespace {

std::string fmt_params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ';';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

std::string window_tag(const SmoothWindow& V) {
  return csv::format(V.lo()) + ".." + csv::format(V.hi());
}

double window_sum(const SmoothWindow& V) {
  CompensatedSum acc;
  for (i64 m = V.first_integer(); m <= V.last_integer(); ++m) acc += V(static_cast<double>(m));
  return acc.value();
}

cplx fourier_at_zero(const PeriodicFunction& K) {
  CompensatedComplexSum acc;
  for (const auto& v : K.values()) acc += v;
  return acc.value() / std::sqrt(static_cast<double>(K.modulus().value()));
}

}  // namespace

DualWindow::DualWindow(const SmoothWindow& V, u64 q, double tol, const Exec& exec)
    : window_(V), q_(q) {
  const windows::FourierSampler sampler(V);
  const auto trunc =
      windows::truncation_index(sampler, q, tol, windows::quadrature_cap(sampler, q));
  if (trunc.tail_bound > tol) {
    throw TruncationError("dual sum tail " + csv::format(trunc.tail_bound) +
                          " exceeds tolerance " + csv::format(tol) + " for window " +
                          window_tag(V) + " at modulus " + std::to_string(q));
  }
  cutoff_ = trunc.index;
  tail_ = trunc.tail_bound;
  integral_ = sampler.integral();
  values_ = sampler.dual_values(q, cutoff_, exec);
}

cplx DualWindow::sum_all() const {
  CompensatedComplexSum acc;
  for (const auto& v : values_) acc += v;
  return acc.value();
}

cplx DualWindow::sum_excluding_multiples() const {
  CompensatedComplexSum acc;
  for (i64 n = -cutoff_; n <= cutoff_; ++n) {
    if (ff::reduce(n, q_) != 0) acc += at(n);
  }
  return acc.value();
}

std::vector<cplx> DualWindow::residue_sums(Skip skip) const {
  std::vector<CompensatedComplexSum> acc(q_);
  for (i64 n = -cutoff_; n <= cutoff_; ++n) {
    const u64 r = ff::reduce(n, q_);
    if (skip == Skip::Zero && n == 0) continue;
    if (skip == Skip::Multiples && r == 0) continue;
    acc[r] += at(n);
  }
  std::vector<cplx> out(q_);
  for (u64 r = 0; r < q_; ++r) out[r] = acc[r].value();
  return out;
}

IdentityResult check_poisson(const PeriodicFunction& K, const SmoothWindow& V,
                             double tol, const Exec& exec) {
  const Prime q = K.modulus();
  CompensatedComplexSum lhs;
  for (i64 n = V.first_integer(); n <= V.last_integer(); ++n) {
    lhs += K(n) * V(static_cast<double>(n));
  }

  const DualWindow dual(V, q.value(), tol / 10.0, exec);
  const auto khat = trace::fourier(K, exec);
  CompensatedComplexSum rhs;
  for (i64 m = -dual.cutoff(); m <= dual.cutoff(); ++m) rhs += khat(m) * dual.at(m);
  const cplx r = rhs.value() / std::sqrt(static_cast<double>(q.value()));

  return IdentityResult{"poisson",
                        fmt_params({{"q", csv::format(q.value())},
                                    {"window", window_tag(V)},
                                    {"cutoff", csv::format(dual.cutoff())}}),
                        lhs.value(), r, std::abs(lhs.value() - r), dual.tail_bound()};
}

IdentityResult check_poisson_progression(const SmoothWindow& V, Prime q, i64 a,
                                         double tol, const Exec& exec) {
  const u64 qa = ff::reduce(a, q.value());
  CompensatedSum lhs;
  for (i64 n = V.first_integer(); n <= V.last_integer(); ++n) {
    if (ff::reduce(n, q.value()) == qa) lhs += V(static_cast<double>(n));
  }

  const DualWindow dual(V, q.value(), tol / 10.0, exec);
  CompensatedComplexSum rhs;
  for (i64 m = -dual.cutoff(); m <= dual.cutoff(); ++m) {
    // Phase computed directly rather than from the root table.
    const double angle = 2.0 * std::numbers::pi *
                         static_cast<double>(ff::reduce(static_cast<i64>(qa) * m, q.value())) /
                         static_cast<double>(q.value());
    rhs += cplx(std::cos(angle), std::sin(angle)) * dual.at(m);
  }
  const cplx r = rhs.value() / static_cast<double>(q.value());
  return IdentityResult{"poisson_progression",
                        fmt_params({{"q", csv::format(q.value())},
                                    {"a", csv::format(a)},
                                    {"window", window_tag(V)}}),
                        lhs.value(), r, std::abs(lhs.value() - r), dual.tail_bound()};
}

IdentityResult check_tempered_voronoi(const PeriodicFunction& K, const SmoothWindow& V,
                                      const SmoothWindow& W, double tol,
                                      const Exec& exec) {
  const Prime p = K.modulus();
  const u64 pv = p.value();

  CompensatedComplexSum lhs;
  for (i64 m = V.first_integer(); m <= V.last_integer(); ++m) {
    const double vm = V(static_cast<double>(m));
    for (i64 n = W.first_integer(); n <= W.last_integer(); ++n) {
      lhs += K(m * n) * (vm * W(static_cast<double>(n)));
    }
  }

  const DualWindow dv(V, pv, tol / 10.0, exec);
  const DualWindow dw(W, pv, tol / 10.0, exec);
  const auto kv = trace::voronoi(K, exec);
  const auto fv = dv.residue_sums(DualWindow::Skip::None);
  const auto fw = dw.residue_sums(DualWindow::Skip::None);
  CompensatedComplexSum dual;
  for (u64 r1 = 0; r1 < pv; ++r1) {
    for (u64 r2 = 0; r2 < pv; ++r2) {
      dual += kv.at_residue(ff::mulmod(r1, r2, pv)) * fv[r1] * fw[r2];
    }
  }
  const double sp = std::sqrt(static_cast<double>(pv));
  const cplx rhs = fourier_at_zero(K) / sp * (window_sum(V) * window_sum(W)) +
                   dual.value() / static_cast<double>(pv);
  return IdentityResult{"tempered_voronoi",
                        fmt_params({{"p", csv::format(pv)},
                                    {"V", window_tag(V)},
                                    {"W", window_tag(W)}}),
                        lhs.value(), rhs, std::abs(lhs.value() - rhs),
                        std::max(dv.tail_bound(), dw.tail_bound())};
}

cplx triple_sum_direct(const SmoothWindow& V1, const SmoothWindow& V2,
                       const SmoothWindow& V3, const PeriodicFunction& K) {
  CompensatedComplexSum acc;
  for (i64 m1 = V1.first_integer(); m1 <= V1.last_integer(); ++m1) {
    const double v1 = V1(static_cast<double>(m1));
    for (i64 m2 = V2.first_integer(); m2 <= V2.last_integer(); ++m2) {
      const double v2 = V2(static_cast<double>(m2));
      for (i64 m3 = V3.first_integer(); m3 <= V3.last_integer(); ++m3) {
        const double w = v1 * v2 * V3(static_cast<double>(m3));
        acc += cplx(w) * K(m1 * m2 * m3);
      }
    }
  }
  return acc.value();
}

TripleSumReport compute_abcd(const SmoothWindow& V1, const SmoothWindow& V2,
                             const SmoothWindow& V3, const PeriodicFunction& K,
                             double tol, const Exec& exec) {
  const u64 p = K.modulus().value();
  return compute_abcd(DualWindow(V1, p, tol / 10.0, exec), DualWindow(V2, p, tol / 10.0, exec),
                      DualWindow(V3, p, tol / 10.0, exec), K, exec);
}

TripleSumReport compute_abcd(const DualWindow& D1, const DualWindow& D2,
                             const DualWindow& D3, const PeriodicFunction& K,
                             const Exec& exec) {
  const Prime prime = K.modulus();
  const u64 p = prime.value();
  if (D1.modulus() != p || D2.modulus() != p || D3.modulus() != p) {
    throw std::invalid_argument("compute_abcd: dual windows built for another modulus");
  }
  if (K.at_residue(0) != cplx(0.0)) {
    throw std::invalid_argument("compute_abcd: K must vanish on multiples of p");
  }
  const auto& V1 = D1.window();
  const auto& V2 = D2.window();
  const auto& V3 = D3.window();
  const double pd = static_cast<double>(p);

  TripleSumReport rep{};
  rep.lhs = triple_sum_direct(V1, V2, V3, K);

  const cplx k0 = fourier_at_zero(K);

  CompensatedSum coprime12;
  for (i64 m1 = V1.first_integer(); m1 <= V1.last_integer(); ++m1) {
    if (m1 % static_cast<i64>(p) == 0) continue;
    const double v1 = V1(static_cast<double>(m1));
    for (i64 m2 = V2.first_integer(); m2 <= V2.last_integer(); ++m2) {
      if (m2 % static_cast<i64>(p) == 0) continue;
      coprime12 += v1 * V2(static_cast<double>(m2));
    }
  }
  const double s1 = window_sum(V1), s2 = window_sum(V2), s3 = window_sum(V3);
  rep.termA = k0 / std::sqrt(pd) * (coprime12.value() * s3);

  const cplx dual3 = D3.sum_excluding_multiples();
  rep.termB = -k0 / std::pow(pd, 1.5) * (s1 * s2) * dual3;

  const double v1hat0 = D1.integral(), v2hat0 = D2.integral();
  const cplx bracket = v1hat0 * D2.sum_all() + v2hat0 * D1.sum_all() - v1hat0 * v2hat0;
  rep.termC = k0 / std::pow(pd, 2.5) * bracket * dual3;

  const trace::BesselTransform bessel(K, exec);
  const auto table = bessel.table(exec);
  const auto f1 = D1.residue_sums(DualWindow::Skip::Zero);
  const auto f2 = D2.residue_sums(DualWindow::Skip::Zero);
  const auto f3 = D3.residue_sums(DualWindow::Skip::Multiples);
  std::vector<CompensatedComplexSum> g_acc(p);
  for (u64 r1 = 0; r1 < p; ++r1) {
    for (u64 r2 = 0; r2 < p; ++r2) g_acc[ff::mulmod(r1, r2, p)] += f1[r1] * f2[r2];
  }
  CompensatedComplexSum d;
  for (u64 s = 0; s < p; ++s) {
    const cplx g = g_acc[s].value();
    for (u64 r3 = 1; r3 < p; ++r3) d += g * f3[r3] * table[s * p + r3];
  }
  rep.termD = d.value() / std::pow(pd, 1.5);

  rep.residual = std::abs(rep.lhs - rep.rhs());
  const DualWindow* duals[3] = {&D1, &D2, &D3};
  for (int i = 0; i < 3; ++i) {
    rep.cutoff[i] = duals[i]->cutoff();
    rep.tail[i] = duals[i]->tail_bound();
  }
  return rep;
}

double check_lemma_1060(Prime p, const Exec& exec) {
  const u64 n = p.value();
  const auto kl3 = trace::kloosterman_all_direct(3, p, exec);
  const double sp = std::sqrt(static_cast<double>(n));
  std::vector<double> worst(n, 0.0);

#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (i64 a = 1; a < static_cast<i64>(n); ++a) {
    const trace::BesselTransform bt(PeriodicFunction::delta(p, a), Exec::serial());
    double m = 0.0;
    for (u64 x = 0; x < n; ++x) {
      for (u64 k = 1; k < n; ++k) {
        const u64 arg = ff::mulmod(ff::mulmod(static_cast<u64>(a), k, n), x, n);
        m = std::max(m, std::abs(bt(x, k) - kl3[arg] / sp));
      }
    }
    worst[a] = m;
  }
  double m = 0.0;
  for (double w : worst) m = std::max(m, w);
  return m;
}

CoprimeSumResult check_coprime_sum(const SmoothWindow& V, u64 u, u64 q) {
  if (u == 0 || q == 0) throw std::invalid_argument("check_coprime_sum: need u, q >= 1");
  const i64 ui = static_cast<i64>(u);
  const i64 first = std::max<i64>(1, (V.first_integer() + ui - 1) / ui);
  const i64 last = V.last_integer() / ui;
  CompensatedSum lhs;
  for (i64 m = first; m <= last; ++m) {
    if (std::gcd(static_cast<u64>(m), q) != 1) continue;
    lhs += V(static_cast<double>(m * ui));
  }
  const double vhat0 = windows::FourierSampler(V).integral();
  const double main = static_cast<double>(ff::euler_phi(q)) /
                      (static_cast<double>(q) * static_cast<double>(u)) * vhat0;
  const double Q = V.derivative_scale();
  return CoprimeSumResult{lhs.value(), main, std::abs(lhs.value() - main),
                          static_cast<double>(ff::divisor_count(q)) * Q * Q};
}

PhiIdentityResult check_phi_identity(i64 a) {
  if (a < 1) throw std::invalid_argument("check_phi_identity: need a >= 1");
  boost::rational<i64> sum(0);
  for (i64 d1 = 1; d1 <= a; ++d1) {
    if (a % d1) continue;
    const i64 rest = a / d1;
    for (i64 d2 = 1; d2 <= rest; ++d2) {
      if (rest % d2) continue;
      const i64 d3 = rest / d2;
      const i64 num = static_cast<i64>(ff::euler_phi(static_cast<u64>(d2 * d3)) *
                                       ff::euler_phi(static_cast<u64>(d3)));
      sum += boost::rational<i64>(num, d2 * d3);
    }
  }
  return PhiIdentityResult{sum, a};
}

void write_csv(std::ostream& out, const std::vector<IdentityResult>& rows) {
  csv::Writer w(out, {"identity", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                      "residual", "tail_bound"});
  for (const auto& r : rows) {
    w.row(r.name, r.params, r.lhs.real(), r.lhs.imag(), r.rhs.real(), r.rhs.imag(),
          r.residual, r.tail_bound);
  }
}

}  // namespace d3::identities
