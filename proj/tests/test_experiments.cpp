#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "d3/experiments.hpp"
#include "oracles.hpp"

using namespace d3;
using namespace d3::experiments;

TEST(Config, Validation) {
  ScanConfig c;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.xs = {1000};
  EXPECT_NO_THROW(c.validate());
  c.theta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.theta = 0.5;
  c.a = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.a = 1;
  c.Qs = {1000.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.Qs = {};
  c.xs = {1000, 100};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.xs = {2'000'000'000ULL};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(PrimesNear, Range) {
  EXPECT_EQ(primes_near(10.0), (std::vector<u64>{11, 13, 17, 19}));
  EXPECT_TRUE(primes_near(0.5).empty());
  for (u64 q : primes_near(1000.0)) {
    EXPECT_GT(q, 1000u);
    EXPECT_LE(q, 2000u);
    EXPECT_TRUE(oracle::is_prime_trial(q));
  }
}

TEST(SingleScan, RecordsMatchDirectFilter) {
  ScanConfig c;
  c.xs = {30000};
  c.theta = 0.45;
  c.a = 2;
  const auto recs = single_scan(c, Exec{2});
  const auto t = oracle::dk_multiplicative(30000, 3);
  const auto qs = primes_near(std::pow(30000.0, 0.45));
  ASSERT_EQ(recs.size(), qs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const u64 q = qs[i];
    u64 S = 0, Sstar = 0;
    for (u64 n = 1; n <= 30000; ++n) {
      if (n % q == 2) S += t[n];
      if (n % q) Sstar += t[n];
    }
    EXPECT_EQ(recs[i].q, q);
    EXPECT_EQ(recs[i].S, S);
    EXPECT_EQ(recs[i].numerator, static_cast<i64>((q - 1) * S) - static_cast<i64>(Sstar));
  }
}

TEST(SingleScan, CacheIsUsedAndConsistent) {
  const auto dir = std::filesystem::temp_directory_path() / ("d3cache_" + std::to_string(::getpid()));
  ScanConfig c;
  c.xs = {5000};
  c.cache_dir = dir.string();
  const auto first = single_scan(c);
  EXPECT_TRUE(std::filesystem::exists(dir / "d3_5000.bin"));
  const auto second = single_scan(c);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].numerator, second[i].numerator);
  std::filesystem::remove_all(dir);
}

TEST(Averaged, EmptyRangeGivesZeroReport) {
  const auto t = divisor::sieve_dk(100, 3);
  const auto r = averaged_sum(t, 24.5, 1, 1.0);  // (24.5, 49] holds primes
  EXPECT_GT(r.primes, 0u);
  const auto z = averaged_sum(t, 0.7, 1, 1.0);  // (0.7, 1.4] holds none
  EXPECT_EQ(z.primes, 0u);
  EXPECT_EQ(z.sum_abs_delta, 0.0);
  EXPECT_EQ(z.sigma0, 0.0);
  EXPECT_EQ(z.sigma1, 0.0);
}

TEST(Averaged, SignSplitAndOracle) {
  const u64 x = 50000;
  const auto t = divisor::sieve_dk(x, 3);
  const double Q = 60.0;
  const i64 a = 6;  // q = 2, 3 would divide a but lie below Q anyway
  const auto r = averaged_sum(t, Q, a, 1.0, Exec{3});
  double abs_sum = 0, s0 = 0, s1 = 0;
  u64 count = 0;
  for (u64 q = 61; q <= 120; ++q) {
    if (!oracle::is_prime_trial(q)) continue;
    ++count;
    u64 S = 0, Sstar = 0;
    for (u64 n = 1; n <= x; ++n) {
      if (n % q == static_cast<u64>(a) % q) S += t[n];
      if (n % q) Sstar += t[n];
    }
    const double d = static_cast<double>(S) - static_cast<double>(Sstar) / (q - 1);
    const int c = (d > 0) - (d < 0);
    abs_sum += std::fabs(d);
    s0 += c * static_cast<double>(S);
    s1 += c * static_cast<double>(Sstar) / (q - 1);
  }
  EXPECT_EQ(r.primes, count);
  EXPECT_NEAR(r.sum_abs_delta, abs_sum, 1e-9 * abs_sum);
  EXPECT_NEAR(r.sigma0 - r.sigma1, r.sum_abs_delta, 1e-9 * abs_sum);
  EXPECT_NEAR(r.sigma0, s0, 1e-9 * std::fabs(s0));
  EXPECT_NEAR(r.sigma1, s1, 1e-9 * std::fabs(s1));
  EXPECT_DOUBLE_EQ(r.scale, static_cast<double>(x) / std::log(2.0 * x));
}

TEST(Averaged, ModuliDividingAAreSkipped) {
  const auto t = divisor::sieve_dk(20000, 3);
  const auto r1 = averaged_sum(t, 10.0, 1, 1.0);
  const auto r2 = averaged_sum(t, 10.0, 13 * 17, 1.0);
  EXPECT_EQ(r1.primes, 4u);
  EXPECT_EQ(r2.primes, 2u);
}

TEST(Averaged, BitwiseReproducibleAcrossThreads) {
  ScanConfig c;
  c.xs = {100000};
  const auto a = averaged_scan(c, Exec::serial());
  const auto b = averaged_scan(c, Exec{4});
  ASSERT_EQ(a.size(), 1u);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "Q,x,a,sum_abs_delta,sigma0,sigma1,scale");
}

TEST(SmoothAveraged, ConsistentWithSmoothSums) {
  int levels[3];
  balanced_levels(2000.0, 1.0, levels);
  EXPECT_GT(levels[0], 0);
  const auto r = smooth_averaged_sum(2000.0, 8.0, 1, 1.0, levels, Exec{2});
  EXPECT_EQ(r.primes, 2u);  // 11, 13
  EXPECT_NEAR(r.sigma0 - r.sigma1, r.sum_abs_delta, 1e-9 * std::max(1.0, r.sum_abs_delta));
  const double delta = 1.0 + 1.0 / std::log(4000.0);
  EXPECT_NEAR(r.M1, std::pow(delta, levels[0]), 1e-9 * r.M1);
}

TEST(Lemma64, ZeroSigma) {
  const auto V = windows::partition_piece(2.0, 3).window;
  const auto r = check_lemma_6_4({7, 11}, {0.0, 0.0}, V, V, V, 8, 8, 5.0, 1.0);
  EXPECT_EQ(r.lhs, cplx(0.0));
  EXPECT_EQ(r.main, cplx(0.0));
  EXPECT_EQ(r.deviation, 0.0);
}

TEST(Lemma64, SingleModulusAgainstTripleSum) {
  const auto V1 = windows::partition_piece(2.0, 3).window;
  const auto V2 = windows::partition_piece(2.0, 2).window;
  const auto r = check_lemma_6_4({7}, {1.0}, V1, V2, V2, 4, 4, 5.0, 1.0);
  double Sstar = 0;
  for (i64 a = 1; a <= 16; ++a)
    for (i64 b = 1; b <= 8; ++b)
      for (i64 c = 1; c <= 8; ++c)
        if ((a * b * c) % 7) Sstar += V1(a) * V2(b) * V2(c);
  EXPECT_NEAR(r.lhs.real(), Sstar / 6.0, 1e-12);
  EXPECT_LE(r.deviation, r.envelope);
  EXPECT_THROW(check_lemma_6_4({7}, {2.0}, V1, V2, V2, 4, 4, 5, 1), std::invalid_argument);
  EXPECT_THROW(check_lemma_6_4({7, 11}, {1.0}, V1, V2, V2, 4, 4, 5, 1), std::invalid_argument);
}

TEST(Lemma64, DeviationSubLinearInM1) {
  // The main term absorbs the M1 mass, so doubling M1 should not double the
  // deviation.
  const auto V2 = windows::partition_piece(2.0, 3).window;
  std::vector<u64> qs = {5, 7, 11, 13};
  std::vector<cplx> sigma = {1.0, -1.0, 1.0, cplx(0.0, 1.0)};
  std::vector<double> dev;
  for (int l : {4, 5, 6}) {  // M1 = 16, 32, 64
    const auto V1 = windows::partition_piece(2.0, l).window;
    const auto r = check_lemma_6_4(qs, sigma, V1, V2, V2, 8, 8, 5.0, 1.0);
    dev.push_back(r.deviation);
    EXPECT_LE(r.deviation, r.envelope);
  }
  ASSERT_GT(dev[0], 0.0);
  EXPECT_LT(dev[1] / dev[0], 2.0);
  EXPECT_LT(dev[2] / dev[0], 4.0);
}

TEST(BilinearRangeCheck, Arithmetic) {
  const double x = 1e12;
  const auto r = bilinear_range(x, 1e6, 1e3, 1e2, 0.01);
  EXPECT_TRUE(r.qr_below_x);
  EXPECT_NEAR(r.upper, std::pow(x, 0.99), 1e-6 * r.upper);
  const double m = std::max({1e3, 1e3 * 1e8 / x, std::sqrt(1e3) * 1e2, 1e9 * 1e8 / (x * x)});
  EXPECT_NEAR(r.lower, std::pow(x, 0.01) * m, 1e-9 * r.lower);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(bilinear_range(x, 10.0, 1e3, 1e2, 0.01).holds);
  EXPECT_FALSE(bilinear_range(100.0, 10.0, 50, 5, 0.01).qr_below_x);
}
