#pragma once

// Smooth compactly supported test functions: the smooth step, the
// logarithmic partition of unity b_{l,Delta}, continuous Fourier transforms
// by quadrature, and truncation of dual sums from measured Fourier decay.

#include <complex>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "d3/exec.hpp"

namespace d3::windows {

using cplx = std::complex<double>;

// s(t) = sigma(t) / (sigma(t) + sigma(1 - t)), sigma(t) = exp(-1/t) for t > 0.
// Exactly 0 for t <= 0 and exactly 1 for t >= 1.
double smooth_step(double t);

class SmoothWindow {
 public:
  using Fn = std::function<double(double)>;

  // The evaluator is only consulted on [lo, hi]. derivative_scale is the
  // constant Q with |xi^j V^(j)(xi)| << Q^j.
  SmoothWindow(double lo, double hi, Fn f, double derivative_scale);

  static SmoothWindow zero();

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double derivative_scale() const { return derivative_scale_; }

  double operator()(double t) const {
    return (t < lo_ || t > hi_) ? 0.0 : f_(t);
  }

  // t -> V(t / M), supported on [M lo, M hi].
  SmoothWindow scaled(double M) const;

  // Integers inside the support, as a closed range [first, last].
  std::int64_t first_integer() const;
  std::int64_t last_integer() const;

 private:
  double lo_, hi_;
  Fn f_;
  double derivative_scale_;
};

// Equal to 1 on [1, 2] and 0 outside [1/2, 4].
SmoothWindow mother_bump();

// b_{l,Delta}(xi) = s(log_Delta xi - (l - 1)) - s(log_Delta xi - l).
double partition_value(double delta, int ell, double xi);

struct PartitionPiece {
  int index;
  double delta;
  SmoothWindow window;
};

PartitionPiece partition_piece(double delta, int ell);

// Pieces l = 0 .. ell_max - 1; they sum to 1 on [1, Delta^{ell_max - 1}].
// Throws std::invalid_argument for delta <= 1 or ell_max < 1.
std::vector<PartitionPiece> partition(double delta, int ell_max);

// The piece whose centre Delta^l is nearest to M.
SmoothWindow piece_at_scale(double delta, double M);

// Quadrature nodes for V^(xi) = int V(t) e(-t xi) dt. Node values are
// cached so that many frequencies can be evaluated cheaply.
class FourierSampler {
 public:
  enum class Rule { Trapezoid, GaussLegendre };

  // Composite trapezoid with 2^12 intervals by default.
  explicit FourierSampler(const SmoothWindow& V, Rule rule = Rule::Trapezoid);

  cplx operator()(double xi) const;
  // V^(n/q) with the phase n t / q reduced mod 1 before scaling by 2 pi, so
  // large n keep full accuracy. Requires |n| < 2^26.
  cplx at_ratio(std::int64_t n, std::uint64_t q) const;
  double integral() const;  // V^(0)

  // V^(n / q) for n = -N..N, entry [n + N]. OpenMP over n.
  std::vector<cplx> dual_values(std::uint64_t q, std::int64_t N,
                                const Exec& exec = {}) const;

  double support_length() const { return hi_ - lo_; }
  // Largest xi for which aliasing of the node grid is negligible.
  double max_reliable_frequency() const;

 private:
  void split_nodes();

  double lo_, hi_;
  Rule rule_;
  std::vector<double> nodes_;
  std::vector<double> node_hi_, node_lo_;  // nodes_ = hi + lo, hi with 26 bits
  std::vector<double> weighted_;
};

constexpr int kTrapezoidIntervals = 1 << 12;
constexpr int kGaussLegendreNodes = 256;

cplx fourier_continuous(const SmoothWindow& V, double xi);
// Independent rule, kept as the reference for the trapezoid path.
cplx fourier_continuous_gauss(const SmoothWindow& V, double xi);

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct Truncation {
  std::int64_t index;   // keep |n| <= index
  double tail_bound;    // estimate of sum_{|n| > index} |V^(n/q)|
};

constexpr double kDefaultTruncationTolerance = 1e-9;

// Smallest N <= cap with sum_{N < |n|} |V^(n/q)| <= tol. Magnitudes are
// measured up to cap; beyond it the tail is extrapolated with a cubic decay
// envelope. When no N <= cap suffices the result is cap with its (too
// large) tail bound, which callers are expected to check.
Truncation truncation_index(const FourierSampler& Vhat, std::uint64_t q, double tol,
                            std::int64_t cap);

// 2 * ceil(q x^eta / M), the largest index the scale heuristics allow.
std::int64_t truncation_cap(std::uint64_t q, double M, double x, double eta);

Truncation truncation_index(const SmoothWindow& V, double M, std::uint64_t q,
                            double x, double eta,
                            double tol = kDefaultTruncationTolerance);

// A cap tied to the quadrature grid rather than to x^eta: the largest index
// with n / q below the sampler's reliable frequency.
std::int64_t quadrature_cap(const FourierSampler& Vhat, std::uint64_t q);

// Exponent bookkeeping: q = x^kappa, M_i = x^{mu_i}.
struct ExponentProfile {
  double kappa;
  double mu1, mu2, mu3;
  double eta;
  double B = 1.0;

  // Throws std::invalid_argument when the ordering / sum / range invariants
  // fail.
  void validate() const;
};

enum class Region { FirstEstimate, SecondEstimate, Both, Neither };

std::string_view to_string(Region r);

// Slack of every inequality (>= 0 means satisfied).
struct RegionMargins {
  double first_kappa;   // 8/15 - 4 eta - kappa
  double first_mu3;     // mu3 - (11/4 kappa - 1 + 14 eta)
  double second_kappa;  // 4/7 - eta - kappa
  double second_lower;  // mu3 - (5/2 kappa - 1 + 12 eta)
  double second_upper;  // (2 - 3 kappa - 12 eta) - mu3
};

RegionMargins region_margins(const ExponentProfile& profile);
Region region_check(const ExponentProfile& profile);

}  // namespace d3::windows
