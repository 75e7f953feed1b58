#include "d3/trace_fn.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>

#include "d3/csv.hpp"
#include "d3/summation.hpp"

namespace d3::trace {

PeriodicFunction::PeriodicFunction(Prime p, std::vector<cplx> values)
    : p_(p), values_(std::move(values)) {
  if (values_.size() != p.value()) {
    throw std::invalid_argument("PeriodicFunction: expected " +
                                std::to_string(p.value()) + " values, got " +
                                std::to_string(values_.size()));
  }
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("PeriodicFunction: non-finite value");
    }
  }
}

PeriodicFunction PeriodicFunction::zero(Prime p) {
  return PeriodicFunction(p, std::vector<cplx>(p.value()));
}

PeriodicFunction PeriodicFunction::constant(Prime p, cplx c) {
  return PeriodicFunction(p, std::vector<cplx>(p.value(), c));
}

PeriodicFunction PeriodicFunction::delta(Prime p, i64 a) {
  std::vector<cplx> v(p.value());
  v[ff::reduce(a, p.value())] = 1.0;
  return PeriodicFunction(p, std::move(v));
}

double PeriodicFunction::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

PeriodicFunction PeriodicFunction::operator+(const PeriodicFunction& other) const {
  if (!(p_ == other.p_)) throw std::invalid_argument("moduli differ");
  std::vector<cplx> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return PeriodicFunction(p_, std::move(v));
}

PeriodicFunction PeriodicFunction::operator*(cplx c) const {
  std::vector<cplx> v(values_);
  for (auto& x : v) x *= c;
  return PeriodicFunction(p_, std::move(v));
}

PeriodicFunction fourier(const PeriodicFunction& K, const Exec& exec) {
  const Prime p = K.modulus();
  const u64 n = p.value();
  const ff::RootsOfUnity roots(p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out(n);
  const auto& vals = K.values();

#pragma omp parallel for schedule(static) num_threads(exec.resolved())
  for (i64 m = 0; m < static_cast<i64>(n); ++m) {
    CompensatedComplexSum acc;
    u64 phase = 0;
    for (u64 h = 0; h < n; ++h) {
      acc += vals[h] * roots[phase];
      phase += static_cast<u64>(m);
      if (phase >= n) phase -= n;
    }
    out[m] = acc.value() * norm;
  }
  return PeriodicFunction(p, std::move(out));
}

PeriodicFunction voronoi(const PeriodicFunction& K, const Exec& exec) {
  const Prime p = K.modulus();
  const u64 n = p.value();
  const auto khat = fourier(K, exec);
  const auto inv = ff::inverse_table(p);
  const ff::RootsOfUnity roots(p);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> out(n);

#pragma omp parallel for schedule(static) num_threads(exec.resolved())
  for (i64 m = 0; m < static_cast<i64>(n); ++m) {
    CompensatedComplexSum acc;
    for (u64 h = 1; h < n; ++h) {
      acc += khat.at_residue(h) * roots[ff::mulmod(static_cast<u64>(m), inv[h], n)];
    }
    out[m] = acc.value() * norm;
  }
  return PeriodicFunction(p, std::move(out));
}

KloostermanSpec::KloostermanSpec(int k, Residue h) : rank(k), shift(h) {
  if (k < 1) throw std::invalid_argument("Kloosterman rank must be >= 1");
  if (h.is_zero()) throw std::invalid_argument("Kloosterman shift must be nonzero");
}

namespace {

double kl_normalization(int k, u64 p) {
  return std::pow(static_cast<double>(p), -0.5 * (k - 1));
}

// (-1)^{k+1} p^{-(k-1)/2}: the complete sums over F_p vanish, leaving
// minus the (-1)^k contribution of the all-nonzero tuples.
cplx kl_at_zero(int k, u64 p) {
  return (k % 2 == 1 ? 1.0 : -1.0) * kl_normalization(k, p);
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

cplx kloosterman_direct(int k, Residue a) {
  if (k < 1) throw std::invalid_argument("Kloosterman rank must be >= 1");
  const Prime p = a.modulus();
  const u64 n = p.value();
  const ff::RootsOfUnity roots(p);
  const auto inv = ff::inverse_table(p);

  // Odometer over x_1..x_{k-1} in F_p^*.
  std::vector<u64> digits(static_cast<std::size_t>(k - 1), 1);
  CompensatedComplexSum acc;
  while (true) {
    u64 prod = 1, sum = 0;
    for (u64 d : digits) {
      prod = ff::mulmod(prod, d, n);
      sum += d;
    }
    // a != 0 pins x_k = a / prod; a == 0 forces x_k = 0 because prod != 0.
    const u64 last = a.is_zero() ? 0 : ff::mulmod(a.value(), inv[prod], n);
    acc += roots[(sum + last) % n];

    std::size_t i = 0;
    while (i < digits.size()) {
      if (++digits[i] < n) break;
      digits[i] = 1;
      ++i;
    }
    if (i == digits.size()) break;
  }
  return acc.value() * kl_normalization(k, n);
}

cplx kloosterman(const KloostermanSpec& spec, Residue a) {
  const Residue arg = a * spec.shift;
  const u64 p = spec.modulus().value();
  const double terms = std::pow(static_cast<double>(p), spec.rank - 1);
  if (terms <= 1e6) return kloosterman_direct(spec.rank, arg);
  return kloosterman_all(spec.rank, spec.modulus())[arg.value()];
}

std::vector<cplx> kloosterman_all(int k, Prime p) {
  if (k < 1) throw std::invalid_argument("Kloosterman rank must be >= 1");
  const u64 n = p.value();
  std::vector<cplx> out(n);
  out[0] = kl_at_zero(k, n);
  if (n == 2) {
    out[1] = (k % 2 == 0 ? 1.0 : -1.0) * kl_normalization(k, n);
    return out;
  }

  const u64 order = n - 1;
  const u64 g = ff::primitive_root(p);
  std::vector<cplx> buf(order);
  std::vector<u64> power(order);
  u64 x = 1;
  for (u64 i = 0; i < order; ++i) {
    power[i] = x;
    buf[i] = ff::unit_root(x, n);
    x = ff::mulmod(x, g, n);
  }

  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_1d(static_cast<int>(order), data, data, FFTW_FORWARD,
                           FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(order), data, data, FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (auto& z : buf) {
    cplx acc = 1.0;
    for (int j = 0; j < k; ++j) acc *= z;
    z = acc;
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  const double scale = kl_normalization(k, n) / static_cast<double>(order);
  for (u64 i = 0; i < order; ++i) out[power[i]] = buf[i] * scale;
  return out;
}

std::vector<cplx> kloosterman_all_direct(int k, Prime p, const Exec& exec) {
  const u64 n = p.value();
  std::vector<cplx> out(n);
#pragma omp parallel for schedule(dynamic) num_threads(exec.resolved())
  for (i64 a = 0; a < static_cast<i64>(n); ++a) {
    out[a] = kloosterman_direct(k, Residue(a, p));
  }
  return out;
}

BesselTransform::BesselTransform(const PeriodicFunction& K, const Exec& exec)
    : p_(K.modulus()),
      khat_(fourier(K, exec)),
      kl2_(kloosterman_all(2, K.modulus())),
      inv_(ff::inverse_table(K.modulus())) {}

cplx BesselTransform::operator()(u64 x, u64 n) const {
  const u64 p = p_.value();
  x %= p;
  n %= p;
  CompensatedComplexSum acc;
  for (u64 y = 1; y < p; ++y) {
    acc += khat_.at_residue(ff::mulmod(n, inv_[y], p)) * kl2_[ff::mulmod(x, y, p)];
  }
  return acc.value() / std::sqrt(static_cast<double>(p));
}

std::vector<cplx> BesselTransform::table(const Exec& exec) const {
  const u64 p = p_.value();
  std::vector<cplx> out(p * p);
#pragma omp parallel for schedule(static) num_threads(exec.resolved())
  for (i64 x = 0; x < static_cast<i64>(p); ++x) {
    for (u64 n = 0; n < p; ++n) out[x * p + n] = (*this)(x, n);
  }
  return out;
}

std::vector<cplx> BesselTransform::table_serial() const {
  const u64 p = p_.value();
  std::vector<cplx> out(p * p);
  for (u64 x = 0; x < p; ++x) {
    for (u64 n = 0; n < p; ++n) out[x * p + n] = (*this)(x, n);
  }
  return out;
}

cplx bbessel(const PeriodicFunction& K, Residue x, Residue n) {
  if (!(x.modulus() == K.modulus()) || !(n.modulus() == K.modulus())) {
    throw std::invalid_argument("bbessel: residue modulus mismatch");
  }
  return BesselTransform(K, Exec::serial())(x.value(), n.value());
}

PeriodicFunction sheaf_weight_function(const KloostermanSpec& spec) {
  if (spec.rank < 2) {
    throw std::invalid_argument("sheaf weight needs rank k >= 2");
  }
  const Prime p = spec.modulus();
  const u64 n = p.value();
  const int k = spec.rank;
  const auto kl = kloosterman_all(k, p);
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k-1}
  std::vector<cplx> v(n);
  v[0] = -sign * kl_normalization(k, n);  // (-1)^k p^{-(k-1)/2}
  for (u64 a = 1; a < n; ++a) {
    v[a] = sign * kl[ff::mulmod(a, spec.shift.value(), n)];
  }
  return PeriodicFunction(p, std::move(v));
}

void write_csv(std::ostream& out, const PeriodicFunction& K) {
  csv::Writer w(out, {"residue", "re", "im"});
  for (u64 r = 0; r < K.modulus().value(); ++r) {
    w.row(r, K.at_residue(r).real(), K.at_residue(r).imag());
  }
}

}  // namespace d3::trace
