#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "d3/divisor.hpp"
#include "oracles.hpp"

using namespace d3;
using namespace d3::divisor;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("d3test_" + std::to_string(::getpid()) + "_" + name);
}

SmoothWindow piece(int l) { return windows::partition_piece(2.0, l).window; }

}  // namespace

TEST(Sieve, KnownValues) {
  const auto t = sieve_dk(100, 3);
  EXPECT_EQ(t[1], 1u);
  EXPECT_EQ(t[12], 18u);
  EXPECT_EQ(t[8], 10u);
  EXPECT_EQ(t[30], 27u);
  EXPECT_EQ(t[0], 0u);
  EXPECT_EQ(sieve_dk(12, 2)[12], 6u);
}

TEST(Sieve, MatchesEnumerationAndMultiplicativeFormula) {
  for (int k : {2, 3, 4}) {
    const auto t = sieve_dk(3000, k);
    const auto m = oracle::dk_multiplicative(3000, k);
    for (u64 n = 1; n <= 3000; ++n) ASSERT_EQ(t[n], m[n]) << k << " " << n;
    for (u64 n = 1; n <= 300; ++n) ASSERT_EQ(t[n], oracle::dk_enumerate(n, k)) << k << " " << n;
  }
}

TEST(Sieve, HyperbolaCount) {
  const auto t = sieve_dk(20000, 3);
  EXPECT_EQ(total_sum(t), oracle::hyperbola_count(20000));
}

TEST(Sieve, RejectsBadArguments) {
  EXPECT_THROW(sieve_dk(0, 3), std::invalid_argument);
  EXPECT_THROW(sieve_dk(10, 1), std::invalid_argument);
  EXPECT_THROW(sieve_dk(10, 5), std::invalid_argument);
  EXPECT_THROW(sieve_dk(1'000'000'001ULL, 3), std::invalid_argument);
}

TEST(Cache, RoundTrip) {
  const auto path = temp_file("rt.bin");
  const auto t = sieve_dk(5000, 3);
  write_table(path, t);
  const auto u = read_table(path);
  EXPECT_EQ(u.limit, t.limit);
  EXPECT_EQ(u.k, t.k);
  EXPECT_EQ(u.values, t.values);
  EXPECT_EQ(std::filesystem::file_size(path), 4u + 4u + 8u + 4u * 5001u);
  std::filesystem::remove(path);
}

TEST(Cache, RejectsMalformedFiles) {
  const auto path = temp_file("bad.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE and more bytes here";
  }
  EXPECT_THROW(read_table(path), std::runtime_error);
  write_table(path, sieve_dk(100, 3));
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.put('x');
  }
  EXPECT_THROW(read_table(path), std::runtime_error);
  std::filesystem::resize_file(path, 40);
  EXPECT_THROW(read_table(path), std::runtime_error);
  std::filesystem::remove(path);
  EXPECT_THROW(read_table(path), std::runtime_error);
}

TEST(Progression, SumsMatchFilter) {
  const auto t = sieve_dk(10000, 3);
  for (u64 q : {7ULL, 97ULL}) {
    u64 all = 0, coprime = 0;
    for (u64 n = 1; n <= 10000; ++n) {
      all += t[n];
      if (n % q) coprime += t[n];
    }
    EXPECT_EQ(total_sum(t), all);
    EXPECT_EQ(coprime_sum(t, Prime(q)), coprime);
    u64 parts = 0;
    for (i64 a = 1; a < static_cast<i64>(q); ++a) {
      u64 s = 0;
      for (u64 n = static_cast<u64>(a); n <= 10000; n += q) s += t[n];
      EXPECT_EQ(progression_sum(t, Prime(q), a), s);
      EXPECT_EQ(progression_sum(t, Prime(q), a - static_cast<i64>(q)), s);
      parts += s;
    }
    EXPECT_EQ(parts, coprime);
  }
  EXPECT_THROW(progression_sum(t, Prime(7), 14), std::invalid_argument);
}

TEST(Progression, ClassSumsParallelEqualsSerial) {
  const auto t = sieve_dk(200000, 3);
  for (u64 q : {2ULL, 101ULL, 1009ULL}) {
    const auto a = class_sums(t, q, Exec{4});
    EXPECT_EQ(a, class_sums_serial(t, q));
    u64 total = 0;
    for (u64 v : a) total += v;
    EXPECT_EQ(total, total_sum(t));
  }
}

TEST(ErrorTerm, ExactNumeratorsSumToZero) {
  const auto t = sieve_dk(50000, 3);
  for (u64 q : {11ULL, 223ULL}) {
    const auto recs = unit_scan(t, Prime(q));
    ASSERT_EQ(recs.size(), q - 1);
    __int128 s = 0;
    for (const auto& r : recs) {
      s += r.numerator;
      const auto single = error_term(t, Prime(q), static_cast<i64>(r.a));
      EXPECT_EQ(single.numerator, r.numerator);
      EXPECT_EQ(single.S, r.S);
      EXPECT_EQ(r.numerator, static_cast<i64>((q - 1) * r.S) - static_cast<i64>(coprime_sum(t, Prime(q))));
      EXPECT_DOUBLE_EQ(r.norm_delta, static_cast<double>(q) * r.delta / 50000.0);
    }
    EXPECT_EQ(s, 0);
  }
}

TEST(ErrorTerm, PeriodicInResidue) {
  const auto t = sieve_dk(20000, 3);
  const Prime q(31);
  double a = 0, b = 0;
  for (i64 r = 1; r < 31; ++r) {
    a += std::fabs(error_term(t, q, r).delta);
    b += std::fabs(error_term(t, q, r + 31).delta);
  }
  EXPECT_EQ(a, b);
}

TEST(ErrorTerm, CsvHeader) {
  std::ostringstream os;
  write_csv(os, {make_record(100, 7, 1, 10, 60)});
  const auto s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "x,q,a,S,main,delta,norm_delta");
  EXPECT_NE(s.find("100,7,1,10,10,0,0"), std::string::npos);
}

TEST(SmoothSums, TripleSumMatchesLiteralFilter) {
  const auto V1 = piece(2), V2 = piece(3), V3 = piece(3);
  for (i64 a : {1, 5}) {
    double s = 0;
    for (i64 m1 = 1; m1 <= 16; ++m1)
      for (i64 m2 = 1; m2 <= 16; ++m2)
        for (i64 m3 = 1; m3 <= 16; ++m3)
          if (oracle::mod(m1 * m2 * m3 - a, 7) == 0) s += V1(m1) * V2(m2) * V3(m3);
    EXPECT_NEAR(smooth_triple_sum(V1, V2, V3, Prime(7), a), s, 1e-12);
  }
}

TEST(SmoothSums, CoprimeAndFull) {
  const auto V1 = piece(2), V2 = piece(3), V3 = piece(4);
  double full = 0, coprime = 0, by_class = 0;
  for (i64 m1 = 1; m1 <= 32; ++m1)
    for (i64 m2 = 1; m2 <= 32; ++m2)
      for (i64 m3 = 1; m3 <= 32; ++m3) {
        const double w = V1(m1) * V2(m2) * V3(m3);
        full += w;
        if ((m1 * m2 * m3) % 5) coprime += w;
      }
  for (i64 a = 1; a < 5; ++a) by_class += smooth_triple_sum(V1, V2, V3, Prime(5), a);
  EXPECT_NEAR(smooth_full_sum(V1, V2, V3), full, 1e-10);
  EXPECT_NEAR(smooth_coprime_sum(V1, V2, V3, Prime(5)), coprime, 1e-10);
  EXPECT_NEAR(by_class, coprime, 1e-10);
}

TEST(Decomposition, MatchesLevelTripleOracle) {
  // Sum over level triples with Delta^{l1 + l2 + l3} <= x of the smooth
  // progression sums, with b_l read from windows::partition_value.
  const u64 x = 50;
  const double B = 1.0;
  const double delta = 1.0 + 1.0 / std::log(100.0);
  const auto r = decompose_lemma964(x, Prime(7), 3, B);
  EXPECT_DOUBLE_EQ(r.delta, delta);
  const int max_level = static_cast<int>(std::floor(std::log(50.0) / std::log(delta)));
  EXPECT_EQ(r.max_level, max_level);
  const u64 X = static_cast<u64>(50.0 * delta * delta * delta) + 1;
  std::vector<std::vector<double>> b(static_cast<std::size_t>(max_level + 1), std::vector<double>(X + 1, 0.0));
  for (int l = 0; l <= max_level; ++l)
    for (u64 m = 1; m <= X; ++m) b[l][m] = windows::partition_value(delta, l, static_cast<double>(m));
  double ref = 0;
  for (int l1 = 0; l1 <= max_level; ++l1)
    for (int l2 = 0; l1 + l2 <= max_level; ++l2)
      for (int l3 = 0; l1 + l2 + l3 <= max_level; ++l3)
        for (u64 m1 = 1; m1 <= X; ++m1) {
          if (b[l1][m1] == 0) continue;
          for (u64 m2 = 1; m1 * m2 <= X; ++m2) {
            if (b[l2][m2] == 0) continue;
            for (u64 m3 = 1; m1 * m2 * m3 <= X; ++m3)
              if ((m1 * m2 * m3) % 7 == 3) ref += b[l1][m1] * b[l2][m2] * b[l3][m3];
          }
        }
  EXPECT_NEAR(r.reconstruction, ref, 1e-10);
  EXPECT_LE(r.mn_window, r.reconstruction + 1e-12);
  u64 direct = 0;
  const auto t = sieve_dk(50, 3);
  for (u64 n = 3; n <= 50; n += 7) direct += t[n];
  EXPECT_EQ(r.direct, direct);
  EXPECT_DOUBLE_EQ(r.residual, r.reconstruction - static_cast<double>(direct));
}

TEST(Decomposition, ClassesAddUpToCoprime) {
  const auto all = decompose_lemma964_coprime(400, Prime(5), 1.0);
  double s = 0, direct = 0;
  for (i64 a = 1; a < 5; ++a) {
    const auto r = decompose_lemma964(400, Prime(5), a, 1.0);
    s += r.reconstruction;
    direct += static_cast<double>(r.direct);
  }
  EXPECT_NEAR(s, all.reconstruction, 1e-9 * all.reconstruction);
  EXPECT_EQ(direct, static_cast<double>(all.direct));
}

TEST(Decomposition, ResidualWithinEnvelope) {
  for (double B : {1.0, 2.0}) {
    const auto r = decompose_lemma964(2000, Prime(11), 1, B);
    EXPECT_LE(std::fabs(r.residual), r.envelope) << B;
    EXPECT_LE(std::fabs(r.reconstruction - r.mn_window), r.envelope) << B;
  }
  EXPECT_THROW(decompose_lemma964(100, Prime(7), 1, 0.5), std::invalid_argument);
  EXPECT_THROW(decompose_lemma964(100, Prime(7), 14, 1.0), std::invalid_argument);
}
