#include "d3/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "d3/summation.hpp"

namespace d3::windows {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

SmoothWindow::SmoothWindow(double lo, double hi, Fn f, double derivative_scale)
    : lo_(lo), hi_(hi), f_(std::move(f)), derivative_scale_(derivative_scale) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("SmoothWindow: need 0 < lo < hi");
  }
  if (!(derivative_scale >= 1.0)) {
    throw std::invalid_argument("SmoothWindow: derivative scale must be >= 1");
  }
}

SmoothWindow SmoothWindow::zero() {
  return SmoothWindow(1.0, 2.0, [](double) { return 0.0; }, 1.0);
}

SmoothWindow SmoothWindow::scaled(double M) const {
  if (!(M > 0.0)) throw std::invalid_argument("scale must be positive");
  Fn f = f_;
  return SmoothWindow(lo_ * M, hi_ * M, [f, M](double t) { return f(t / M); },
                      derivative_scale_);
}

std::int64_t SmoothWindow::first_integer() const {
  return static_cast<std::int64_t>(std::ceil(lo_));
}

std::int64_t SmoothWindow::last_integer() const {
  return static_cast<std::int64_t>(std::floor(hi_));
}

SmoothWindow mother_bump() {
  return SmoothWindow(
      0.5, 4.0,
      [](double t) {
        const double u = std::log2(t);
        return smooth_step(u + 1.0) * (1.0 - smooth_step(u - 1.0));
      },
      2.0);
}

double partition_value(double delta, int ell, double xi) {
  if (!(xi > 0.0)) return 0.0;
  const double t = std::log(xi) / std::log(delta);
  return smooth_step(t - (ell - 1)) - smooth_step(t - ell);
}

PartitionPiece partition_piece(double delta, int ell) {
  if (!(delta > 1.0)) throw std::invalid_argument("partition needs delta > 1");
  if (ell < 0) throw std::invalid_argument("partition index must be >= 0");
  const double lo = std::pow(delta, ell - 1);
  const double hi = std::pow(delta, ell + 1);
  return PartitionPiece{
      ell, delta,
      SmoothWindow(lo, hi,
                   [delta, ell](double xi) { return partition_value(delta, ell, xi); },
                   delta / (delta - 1.0))};
}

std::vector<PartitionPiece> partition(double delta, int ell_max) {
  if (!(delta > 1.0)) throw std::invalid_argument("partition needs delta > 1");
  if (ell_max < 1) throw std::invalid_argument("partition needs ell_max >= 1");
  std::vector<PartitionPiece> out;
  out.reserve(static_cast<std::size_t>(ell_max));
  for (int ell = 0; ell < ell_max; ++ell) out.push_back(partition_piece(delta, ell));
  return out;
}

SmoothWindow piece_at_scale(double delta, double M) {
  if (!(M >= 1.0)) throw std::invalid_argument("scale must be >= 1");
  const int ell = static_cast<int>(std::lround(std::log(M) / std::log(delta)));
  return partition_piece(delta, ell).window;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

FourierSampler::FourierSampler(const SmoothWindow& V, Rule rule)
    : lo_(V.lo()), hi_(V.hi()), rule_(rule) {
  const double len = hi_ - lo_;
  if (rule == Rule::Trapezoid) {
    const double h = len / kTrapezoidIntervals;
    for (int j = 1; j < kTrapezoidIntervals; ++j) {
      const double t = lo_ + j * h;
      const double v = V(t);
      if (v != 0.0) {
        nodes_.push_back(t);
        weighted_.push_back(v * h);
      }
    }
  } else {
    std::vector<double> x, w;
    gauss_legendre(kGaussLegendreNodes, x, w);
    const double half = 0.5 * len, mid = lo_ + half;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double t = mid + half * x[j];
      const double v = V(t);
      if (v != 0.0) {
        nodes_.push_back(t);
        weighted_.push_back(v * w[j] * half);
      }
    }
  }
  split_nodes();
}

cplx FourierSampler::at_ratio(std::int64_t n, std::uint64_t q) const {
  if (n == 0) return integral();
  if (n >= (1LL << 26) || n <= -(1LL << 26)) {
    throw std::out_of_range("FourierSampler::at_ratio: |n| too large");
  }
  const double nd = static_cast<double>(n);
  const double qd = static_cast<double>(q);
  CompensatedComplexSum acc;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    // n * hi is exact and so is x - q k for the nearest k; any representative
    // of the class mod q gives the same character value.
    const double x = nd * node_hi_[j];
    const double r = (x - qd * std::nearbyint(x / qd)) + nd * node_lo_[j];
    const double phase = -2.0 * std::numbers::pi * (r / qd);
    acc += cplx(weighted_[j] * std::cos(phase), weighted_[j] * std::sin(phase));
  }
  return acc.value();
}

cplx FourierSampler::operator()(double xi) const {
  if (xi == 0.0) return integral();
  CompensatedComplexSum acc;
  const double omega = -2.0 * std::numbers::pi * xi;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double phase = omega * nodes_[j];
    acc += cplx(weighted_[j] * std::cos(phase), weighted_[j] * std::sin(phase));
  }
  return acc.value();
}

double FourierSampler::integral() const {
  CompensatedSum acc;
  for (double w : weighted_) acc += w;
  return acc.value();
}

std::vector<cplx> FourierSampler::dual_values(std::uint64_t q, std::int64_t N,
                                              const Exec& exec) const {
  std::vector<cplx> out(static_cast<std::size_t>(2 * N + 1));
#pragma omp parallel for schedule(static) num_threads(exec.resolved())
  for (std::int64_t n = 0; n <= N; ++n) {
    const cplx v = at_ratio(n, q);
    out[N + n] = v;
    // Real windows: V^(-xi) is the conjugate of V^(xi).
    out[N - n] = std::conj(v);
  }
  return out;
}

double FourierSampler::max_reliable_frequency() const {
  const double len = hi_ - lo_;
  if (rule_ == Rule::Trapezoid) return kTrapezoidIntervals / (4.0 * len);
  return kGaussLegendreNodes / (16.0 * len);
}

void FourierSampler::split_nodes() {
  node_hi_.resize(nodes_.size());
  node_lo_.resize(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    // Veltkamp split: hi keeps the top 26 bits of the mantissa.
    const double c = 134217729.0 * nodes_[j];
    node_hi_[j] = c - (c - nodes_[j]);
    node_lo_[j] = nodes_[j] - node_hi_[j];
  }
}

cplx fourier_continuous(const SmoothWindow& V, double xi) {
  return FourierSampler(V, FourierSampler::Rule::Trapezoid)(xi);
}

cplx fourier_continuous_gauss(const SmoothWindow& V, double xi) {
  return FourierSampler(V, FourierSampler::Rule::GaussLegendre)(xi);
}

Truncation truncation_index(const FourierSampler& Vhat, std::uint64_t q, double tol,
                            std::int64_t cap) {
  if (std::isinf(tol) && tol > 0) return {0, 0.0};
  if (cap < 0) cap = 0;
  // mag[n] = |V^(n/q)| + |V^(-n/q)|; the two are equal for real windows.
  std::vector<double> mag(1, 0.0);
  std::int64_t measured = 0;
  for (std::int64_t n = 1; n <= cap; ++n) {
    mag.push_back(2.0 * std::abs(Vhat.at_ratio(n, q)));
    measured = n;
    // Checkpoints: stop once the extrapolated tail past n is negligible.
    if (n >= 16 && (n & 15) == 0) {
      double recent = 0.0;
      for (std::int64_t j = n - n / 4; j <= n; ++j) recent = std::max(recent, mag[j]);
      if (recent * static_cast<double>(n) / 2.0 <= tol / 16.0) break;
    }
  }
  // Beyond the last measured index assume at most cubic decay from the
  // largest of the recent magnitudes: sum_{n > c} m (c/n)^3 <= m c / 2.
  double recent = 0.0;
  for (std::int64_t j = measured - measured / 4; j <= measured; ++j) recent = std::max(recent, mag[j]);
  double tail = recent * static_cast<double>(measured) / 2.0;
  std::int64_t best = measured;
  double best_tail = tail;
  for (std::int64_t N = measured; N >= 0; --N) {
    // tail is the bound for the sum over |n| > N.
    if (tail > tol) break;
    best = N;
    best_tail = tail;
    if (N > 0) tail += mag[N];
  }
  return {best, best_tail};
}

std::int64_t truncation_cap(std::uint64_t q, double M, double x, double eta) {
  if (!(M >= 1.0) || !(eta > 0.0)) {
    throw std::invalid_argument("truncation_cap: need M >= 1 and eta > 0");
  }
  return 2 * static_cast<std::int64_t>(
                 std::ceil(static_cast<double>(q) * std::pow(x, eta) / M));
}

Truncation truncation_index(const SmoothWindow& V, double M, std::uint64_t q,
                            double x, double eta, double tol) {
  return truncation_index(FourierSampler(V), q, tol, truncation_cap(q, M, x, eta));
}

std::int64_t quadrature_cap(const FourierSampler& Vhat, std::uint64_t q) {
  return static_cast<std::int64_t>(
      std::floor(Vhat.max_reliable_frequency() * static_cast<double>(q)));
}

void ExponentProfile::validate() const {
  if (!(kappa >= 0.01 && kappa <= 0.99)) {
    throw std::invalid_argument("kappa must lie in [1/100, 99/100]");
  }
  if (!(mu1 <= mu2 && mu2 <= mu3)) {
    throw std::invalid_argument("need mu1 <= mu2 <= mu3");
  }
  if (mu1 < 0.0 || mu1 + mu2 + mu3 > 1.0 + 1e-12) {
    throw std::invalid_argument("need mu_i >= 0 and mu1 + mu2 + mu3 <= 1");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(B >= 1.0)) throw std::invalid_argument("B must be >= 1");
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::FirstEstimate: return "FirstEstimate";
    case Region::SecondEstimate: return "SecondEstimate";
    case Region::Both: return "Both";
    case Region::Neither: return "Neither";
  }
  return "Neither";
}

RegionMargins region_margins(const ExponentProfile& p) {
  return RegionMargins{
      8.0 / 15.0 - 4.0 * p.eta - p.kappa,
      p.mu3 - (11.0 / 4.0 * p.kappa - 1.0 + 14.0 * p.eta),
      4.0 / 7.0 - p.eta - p.kappa,
      p.mu3 - (2.5 * p.kappa - 1.0 + 12.0 * p.eta),
      (2.0 - 3.0 * p.kappa - 12.0 * p.eta) - p.mu3,
  };
}

Region region_check(const ExponentProfile& profile) {
  profile.validate();
  const auto m = region_margins(profile);
  const bool first = m.first_kappa >= 0.0 && m.first_mu3 >= 0.0;
  const bool second =
      m.second_kappa >= 0.0 && m.second_lower >= 0.0 && m.second_upper >= 0.0;
  if (first && second) return Region::Both;
  if (first) return Region::FirstEstimate;
  if (second) return Region::SecondEstimate;
  return Region::Neither;
}

}  // namespace d3::windows
