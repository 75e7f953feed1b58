#include "d3/divisor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "d3/csv.hpp"
#include "d3/summation.hpp"

namespace d3::divisor {

namespace {

constexpr std::array<char, 4> kMagic{'D', '3', 'D', 'T'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("divisor table cache truncated");
  return to_little(v);
}

void require_unit(Prime q, i64 a) {
  if (ff::reduce(a, q.value()) == 0) {
    throw std::invalid_argument("residue " + std::to_string(a) + " is not a unit mod " +
                                std::to_string(q.value()));
  }
}

double window_sum(const SmoothWindow& V, u64 skip_multiples_of = 0) {
  CompensatedSum acc;
  for (i64 m = V.first_integer(); m <= V.last_integer(); ++m) {
    if (skip_multiples_of && m % static_cast<i64>(skip_multiples_of) == 0) continue;
    acc += V(static_cast<double>(m));
  }
  return acc.value();
}

}  // namespace

DivisorTable sieve_dk(u64 x, int k) {
  if (x < 1 || x > 1'000'000'000ULL) {
    throw std::invalid_argument("sieve_dk: need 1 <= x <= 10^9");
  }
  if (k < 2 || k > 4) throw std::invalid_argument("sieve_dk: k must be 2, 3 or 4");
  DivisorTable t{x, k, std::vector<std::uint32_t>(x + 1, 1)};
  t.values[0] = 0;
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  for (int pass = 1; pass < k; ++pass) {
    // In place: descending d reads values[d] before any smaller divisor
    // has added into it.
    for (u64 d = x / 2; d >= 1; --d) {
      const std::uint32_t v = t.values[d];
      for (u64 m = 2 * d; m <= x; m += d) {
        if (t.values[m] > kMax - v) throw std::overflow_error("sieve_dk: 32-bit overflow");
        t.values[m] += v;
      }
    }
  }
  return t;
}

void write_table(const std::filesystem::path& path, const DivisorTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.k));
  put<std::uint64_t>(out, table.limit);
  for (auto v : table.values) put<std::uint32_t>(out, v);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

DivisorTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("bad magic in " + path.string());
  DivisorTable t;
  t.k = static_cast<int>(get<std::uint32_t>(in));
  t.limit = get<std::uint64_t>(in);
  if (t.k < 2 || t.k > 4 || t.limit < 1 || t.limit > 1'000'000'000ULL) {
    throw std::runtime_error("bad header in " + path.string());
  }
  t.values.resize(t.limit + 1);
  for (auto& v : t.values) v = get<std::uint32_t>(in);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error("trailing bytes in " + path.string());
  }
  return t;
}

u64 progression_sum(const DivisorTable& table, Prime q, i64 a) {
  require_unit(q, a);
  u64 s = 0;
  for (u64 n = ff::reduce(a, q.value()); n <= table.limit; n += q.value()) s += table[n];
  return s;
}

u64 total_sum(const DivisorTable& table) {
  return std::accumulate(table.values.begin(), table.values.end(), u64{0});
}

u64 coprime_sum(const DivisorTable& table, Prime q) {
  u64 multiples = 0;
  for (u64 n = q.value(); n <= table.limit; n += q.value()) multiples += table[n];
  return total_sum(table) - multiples;
}

std::vector<u64> class_sums_serial(const DivisorTable& table, u64 q) {
  if (q == 0) throw std::invalid_argument("class_sums: q must be positive");
  std::vector<u64> bins(q, 0);
  u64 r = 1 % q;
  for (u64 n = 1; n <= table.limit; ++n) {
    bins[r] += table[n];
    if (++r == q) r = 0;
  }
  return bins;
}

std::vector<u64> class_sums(const DivisorTable& table, u64 q, const Exec& exec) {
  if (q == 0) throw std::invalid_argument("class_sums: q must be positive");
  std::vector<u64> bins(q, 0);
  const u64 x = table.limit;
#pragma omp parallel num_threads(exec.resolved())
  {
    std::vector<u64> local(q, 0);
#pragma omp for schedule(static)
    for (i64 block = 0; block < static_cast<i64>((x + 65535) / 65536); ++block) {
      const u64 lo = static_cast<u64>(block) * 65536 + 1;
      const u64 hi = std::min(x, lo + 65535);
      u64 r = lo % q;
      for (u64 n = lo; n <= hi; ++n) {
        local[r] += table[n];
        if (++r == q) r = 0;
      }
    }
    // Integer bins: the merge order cannot change the result.
#pragma omp critical
    for (u64 i = 0; i < q; ++i) bins[i] += local[i];
  }
  return bins;
}

ScanRecord make_record(u64 x, u64 q, u64 a, u64 S, u64 S_star) {
  const u64 phi = q - 1;
  const __int128 num = static_cast<__int128>(phi) * S - static_cast<__int128>(S_star);
  if (num > std::numeric_limits<i64>::max() || num < std::numeric_limits<i64>::min()) {
    throw std::overflow_error("error_term: numerator exceeds 64 bits");
  }
  ScanRecord r;
  r.x = x;
  r.q = q;
  r.a = a;
  r.S = S;
  r.main = static_cast<double>(S_star) / static_cast<double>(phi);
  r.numerator = static_cast<i64>(num);
  r.delta = static_cast<double>(r.numerator) / static_cast<double>(phi);
  r.norm_delta = static_cast<double>(q) * r.delta / static_cast<double>(x);
  return r;
}

ScanRecord error_term(const DivisorTable& table, Prime q, i64 a) {
  const u64 S = progression_sum(table, q, a);
  return make_record(table.limit, q.value(), ff::reduce(a, q.value()), S,
                     coprime_sum(table, q));
}

std::vector<ScanRecord> unit_scan(const DivisorTable& table, Prime q, const Exec& exec) {
  const u64 qv = q.value();
  const auto bins = class_sums(table, qv, exec);
  u64 S_star = 0;
  for (u64 r = 1; r < qv; ++r) S_star += bins[r];
  std::vector<ScanRecord> out;
  out.reserve(qv - 1);
  __int128 total = 0;
  for (u64 a = 1; a < qv; ++a) {
    out.push_back(make_record(table.limit, qv, a, bins[a], S_star));
    total += out.back().numerator;
  }
  if (total != 0) throw std::logic_error("unit_scan: error terms do not sum to zero");
  return out;
}

void write_csv(std::ostream& out, const std::vector<ScanRecord>& rows) {
  csv::Writer w(out, {"x", "q", "a", "S", "main", "delta", "norm_delta"});
  for (const auto& r : rows) w.row(r.x, r.q, r.a, r.S, r.main, r.delta, r.norm_delta);
}

double smooth_triple_sum(const SmoothWindow& V1, const SmoothWindow& V2,
                         const SmoothWindow& V3, Prime q, i64 a) {
  require_unit(q, a);
  const u64 qv = q.value();
  const u64 target = ff::reduce(a, qv);
  CompensatedSum acc;
  for (i64 m1 = V1.first_integer(); m1 <= V1.last_integer(); ++m1) {
    const double v1 = V1(static_cast<double>(m1));
    for (i64 m2 = V2.first_integer(); m2 <= V2.last_integer(); ++m2) {
      const double v2 = V2(static_cast<double>(m2));
      for (i64 m3 = V3.first_integer(); m3 <= V3.last_integer(); ++m3) {
        if (ff::reduce(m1 * m2 * m3, qv) != target) continue;
        acc += v1 * v2 * V3(static_cast<double>(m3));
      }
    }
  }
  return acc.value();
}

double smooth_full_sum(const SmoothWindow& V1, const SmoothWindow& V2,
                       const SmoothWindow& V3) {
  return window_sum(V1) * window_sum(V2) * window_sum(V3);
}

double smooth_coprime_sum(const SmoothWindow& V1, const SmoothWindow& V2,
                          const SmoothWindow& V3, Prime q) {
  // q prime: (m1 m2 m3, q) = 1 iff no factor is a multiple of q.
  const u64 qv = q.value();
  return window_sum(V1, qv) * window_sum(V2, qv) * window_sum(V3, qv);
}

double log_scale(double x) { return std::log(2.0 * x); }

namespace {

struct LevelData {
  double log_delta;
  int max_level;
  int min_level;  // smallest level sum inside the x L^{-B} <= M1 M2 M3 window
  std::vector<int> level;       // floor(log_Delta m)
  std::vector<double> w_low;    // b_{level}(m)
  std::vector<double> w_high;   // b_{level + 1}(m)
};

LevelData make_levels(u64 x, double delta, double B, u64 m_max) {
  LevelData d;
  d.log_delta = std::log(delta);
  const double lx = std::log(static_cast<double>(x));
  int L = static_cast<int>(std::floor(lx / d.log_delta));
  while ((L + 1) * d.log_delta <= lx) ++L;
  while (L > 0 && L * d.log_delta > lx) --L;
  d.max_level = L;
  const double llow = lx - B * std::log(log_scale(static_cast<double>(x)));
  int Lo = static_cast<int>(std::ceil(llow / d.log_delta));
  while (Lo > 0 && (Lo - 1) * d.log_delta >= llow) --Lo;
  while (Lo * d.log_delta < llow) ++Lo;
  d.min_level = std::max(Lo, 0);
  d.level.assign(m_max + 1, 0);
  d.w_low.assign(m_max + 1, 0.0);
  d.w_high.assign(m_max + 1, 0.0);
  for (u64 m = 1; m <= m_max; ++m) {
    const double t = std::log(static_cast<double>(m)) / d.log_delta;
    const int l = static_cast<int>(std::floor(t));
    d.level[m] = l;
    d.w_low[m] = windows::partition_value(delta, l, static_cast<double>(m));
    d.w_high[m] = windows::partition_value(delta, l + 1, static_cast<double>(m));
  }
  return d;
}

// Adds the weight of one triple, split over the eight piece choices.
void add_triple(const LevelData& d, u64 m1, u64 m2, u64 m3, CompensatedSum& all,
                CompensatedSum& window) {
  const int base = d.level[m1] + d.level[m2] + d.level[m3];
  if (base > d.max_level) return;
  const double w[3][2] = {{d.w_low[m1], d.w_high[m1]},
                          {d.w_low[m2], d.w_high[m2]},
                          {d.w_low[m3], d.w_high[m3]}};
  for (int c = 0; c < 8; ++c) {
    const int s = base + (c & 1) + ((c >> 1) & 1) + ((c >> 2) & 1);
    if (s > d.max_level) continue;
    const double v = w[0][c & 1] * w[1][(c >> 1) & 1] * w[2][(c >> 2) & 1];
    if (v == 0.0) continue;
    all += v;
    if (s >= d.min_level) window += v;
  }
}

struct Setup {
  double L;
  double delta;
  u64 m_max;
};

Setup setup(u64 x, double B) {
  if (!(B >= 1.0)) throw std::invalid_argument("decompose_lemma964: B must be >= 1");
  if (x < 1) throw std::invalid_argument("decompose_lemma964: x must be >= 1");
  Setup s;
  s.L = log_scale(static_cast<double>(x));
  s.delta = 1.0 + std::pow(s.L, -B);
  // Every contributing triple has product below Delta^{max_level + 3}.
  s.m_max = static_cast<u64>(std::floor(static_cast<double>(x) * std::pow(s.delta, 3))) + 1;
  return s;
}

}  // namespace

Lemma964Report decompose_lemma964(u64 x, Prime q, i64 a, double B) {
  require_unit(q, a);
  const Setup st = setup(x, B);
  const LevelData d = make_levels(x, st.delta, B, st.m_max);
  const u64 qv = q.value();
  const u64 target = ff::reduce(a, qv);
  const auto inv = ff::inverse_table(q);
  const u64 X = st.m_max;

  CompensatedSum all, window;
  for (u64 m1 = 1; m1 <= X; ++m1) {
    if (m1 % qv == 0) continue;
    for (u64 m2 = 1; m1 * m2 <= X; ++m2) {
      if (m2 % qv == 0) continue;
      const u64 m12 = m1 * m2;
      const u64 r3 = ff::mulmod(target, inv[m12 % qv], qv);
      for (u64 m3 = r3 == 0 ? qv : r3; m12 * m3 <= X; m3 += qv) add_triple(d, m1, m2, m3, all, window);
    }
  }

  const DivisorTable table = sieve_dk(X, 3);
  Lemma964Report r;
  r.x = x;
  r.q = qv;
  r.a = a;
  r.B = B;
  r.delta = st.delta;
  r.max_level = d.max_level;
  r.reconstruction = all.value();
  r.mn_window = window.value();
  r.direct = 0;
  r.boundary_mass = 0;
  for (u64 n = target; n <= X; n += qv) {
    if (n <= x) {
      r.direct += table[n];
    } else if (static_cast<double>(n) <= static_cast<double>(x) * std::pow(st.delta, 3)) {
      r.boundary_mass += table[n];
    }
  }
  r.residual = r.reconstruction - static_cast<double>(r.direct);
  r.envelope = static_cast<double>(x) / static_cast<double>(qv) * std::pow(st.L, 2.0 - B);
  return r;
}

Lemma964Report decompose_lemma964_coprime(u64 x, Prime q, double B) {
  const Setup st = setup(x, B);
  const LevelData d = make_levels(x, st.delta, B, st.m_max);
  const u64 qv = q.value();
  const u64 X = st.m_max;

  CompensatedSum all, window;
  for (u64 m1 = 1; m1 <= X; ++m1) {
    if (m1 % qv == 0) continue;
    for (u64 m2 = 1; m1 * m2 <= X; ++m2) {
      if (m2 % qv == 0) continue;
      const u64 m12 = m1 * m2;
      for (u64 m3 = 1; m12 * m3 <= X; ++m3) {
        if (m3 % qv == 0) continue;
        add_triple(d, m1, m2, m3, all, window);
      }
    }
  }

  const DivisorTable table = sieve_dk(X, 3);
  Lemma964Report r;
  r.x = x;
  r.q = qv;
  r.a = 0;
  r.B = B;
  r.delta = st.delta;
  r.max_level = d.max_level;
  r.reconstruction = all.value();
  r.mn_window = window.value();
  r.direct = 0;
  r.boundary_mass = 0;
  for (u64 n = 1; n <= X; ++n) {
    if (n % qv == 0) continue;
    if (n <= x) {
      r.direct += table[n];
    } else if (static_cast<double>(n) <= static_cast<double>(x) * std::pow(st.delta, 3)) {
      r.boundary_mass += table[n];
    }
  }
  r.residual = r.reconstruction - static_cast<double>(r.direct);
  r.envelope = static_cast<double>(x) / static_cast<double>(qv) * std::pow(st.L, 2.0 - B);
  return r;
}

}  // namespace d3::divisor
