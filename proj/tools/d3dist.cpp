// Command-line front end: one subcommand per study, CSV to a file, a
// one-line summary on stdout. Exit 0 on success, 1 when a checked
// invariant fails, 2 on bad configuration.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "d3/cancellation.hpp"
#include "d3/csv.hpp"
#include "d3/divisor.hpp"
#include "d3/experiments.hpp"
#include "d3/identities.hpp"
#include "d3/selftest.hpp"
#include "d3/trace_fn.hpp"
#include "d3/windows.hpp"

namespace {

using namespace d3;
using cplx = std::complex<double>;
using ff::i64;
using ff::Prime;
using ff::u64;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

const std::vector<std::string> kSubcommands = {
    "kloosterman", "verify-identities", "divisor-scan", "averaged-scan",
    "bilinear",    "trilinear",         "region-check", "selftest"};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// key = value lines, '#' starts a comment. Each entry becomes "--key=value"
// placed before the command-line flags so that flags win.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad key");
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// argv with config-file entries spliced in right after the subcommand.
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  std::string config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == "--config" && i + 1 < in.size()) {
      config = in[++i];
    } else if (in[i].rfind("--config=", 0) == 0) {
      config = in[i].substr(9);
    } else {
      rest.push_back(in[i]);
    }
  }
  if (config.empty()) return rest;
  const auto extra = read_config(config);
  std::size_t pos = rest.size();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (std::find(kSubcommands.begin(), kSubcommands.end(), rest[i]) != kSubcommands.end()) {
      pos = i + 1;
      break;
    }
  }
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(pos), extra.begin(), extra.end());
  return rest;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number in --") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("--") + what + " is empty");
  return out;
}

std::vector<u64> parse_integers(const std::string& text, const char* what) {
  std::vector<u64> out;
  for (double v : parse_list(text, what)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e18) {
      throw ConfigError(std::string("--") + what + " needs positive integers");
    }
    out.push_back(static_cast<u64>(v));
  }
  return out;
}

Prime require_prime(u64 p) {
  if (!ff::is_prime(p)) throw ConfigError("--p must be prime, got " + std::to_string(p));
  return Prime(p);
}

struct Globals {
  int threads = 0;
  u64 seed = 1;
  std::string out;
};

class Output {
 public:
  Output(const Globals& g, const std::string& fallback) {
    std::filesystem::path p = g.out.empty() ? fallback : g.out;
    if (const char* dir = std::getenv("D3DIST_OUT_DIR"); dir && *dir && p.is_relative()) {
      p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    path_ = p;
    file_.open(p);
    if (!file_) throw ConfigError("cannot write " + p.string());
  }

  std::ostream& stream() { return file_; }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
  std::ofstream file_;
};

// ---- subcommands ----------------------------------------------------------

struct KloostermanOpts {
  u64 p = 101;
  int k = 3;
  i64 h = 1;
};

int run_kloosterman(const Globals& g, const KloostermanOpts& o) {
  const Prime p = require_prime(o.p);
  if (o.k < 2 || o.k > 8) throw ConfigError("--k must lie in [2, 8]");
  if (ff::reduce(o.h, p) == 0) throw ConfigError("--shift must be nonzero mod p");
  const auto table = trace::kloosterman_all(o.k, p);
  std::vector<cplx> shifted(p.value());
  double worst = 0;
  for (u64 a = 0; a < p.value(); ++a) {
    shifted[a] = table[ff::mulmod(a, ff::reduce(o.h, p), p)];
    if (a) worst = std::max(worst, std::abs(shifted[a]));
  }
  Output out(g, "kloosterman.csv");
  trace::write_csv(out.stream(), trace::PeriodicFunction(p, shifted));
  const bool ok = worst <= o.k;
  std::cout << "kloosterman p=" << p.value() << " k=" << o.k << " max|Kl|=" << csv::format(worst)
            << (ok ? " within" : " VIOLATES") << " Weil bound; wrote " << out.path() << "\n";
  return ok ? kOk : kCheckFailed;
}

struct IdentityOpts {
  u64 p = 11;
  double tol = 1e-8;
  std::string scales = "4,4,8";
};

int run_verify_identities(const Globals& g, const IdentityOpts& o) {
  const Prime p = require_prime(o.p);
  if (!(o.tol > 0.0)) throw ConfigError("--tol must be positive");
  const auto sc = parse_list(o.scales, "scales");
  if (sc.size() != 3) throw ConfigError("--scales needs three values");
  const Exec exec{g.threads};
  std::mt19937_64 rng(g.seed);
  const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1p-52 - 1.0; };

  std::vector<identities::IdentityResult> rows;
  bool ok = true;
  std::vector<windows::SmoothWindow> V;
  for (double m : sc) {
    if (!(m >= 1.0)) throw ConfigError("--scales must be >= 1");
    V.push_back(windows::piece_at_scale(2.0, m));
  }

  std::vector<cplx> vals(p.value());
  for (auto& z : vals) z = cplx(uniform(), uniform());
  const trace::PeriodicFunction K(p, vals);
  for (const auto& w : V) {
    rows.push_back(identities::check_poisson(K, w, o.tol, exec));
    ok &= rows.back().residual <= o.tol;
  }
  rows.push_back(identities::check_tempered_voronoi(K, V[0], V[2], o.tol, exec));
  ok &= rows.back().residual <= o.tol;

  const double dual_tol = std::min(o.tol, 1e-9) / 10.0;
  const identities::DualWindow d1(V[0], p, dual_tol, exec), d2(V[1], p, dual_tol, exec),
      d3(V[2], p, dual_tol, exec);
  for (i64 a = 1; a < static_cast<i64>(p.value()); ++a) {
    const auto r = identities::compute_abcd(d1, d2, d3, trace::PeriodicFunction::delta(p, a), exec);
    rows.push_back({"combined_abcd", "p=" + csv::format(p.value()) + ";a=" + csv::format(a),
                    r.lhs, r.rhs(), r.residual, std::max({r.tail[0], r.tail[1], r.tail[2]})});
    ok &= r.residual <= std::max(1e-6 * std::abs(r.lhs), o.tol);
  }
  if (p.value() <= 53) {
    const double dev = identities::check_lemma_1060(p, exec);
    rows.push_back({"bessel_kloosterman", "p=" + csv::format(p.value()), 0.0, 0.0, dev, 0.0});
    ok &= dev <= 1e-10;
  }

  Output out(g, "identities.csv");
  identities::write_csv(out.stream(), rows);
  double worst = 0;
  for (const auto& r : rows) worst = std::max(worst, r.residual);
  std::cout << "verify-identities p=" << p.value() << " checks=" << rows.size()
            << " max_residual=" << csv::format(worst) << (ok ? " ok" : " FAILED") << "; wrote "
            << out.path() << "\n";
  return ok ? kOk : kCheckFailed;
}

struct ScanOpts {
  std::string x = "100000";
  double theta = 0.45;
  std::string Q;
  i64 a = 1;
  double A = 1.0;
  double B = 1.0;
  int max_moduli = 0;
  int unit_checks = 2;
  std::string cache;
  bool smooth = false;
};

experiments::ScanConfig to_config(const ScanOpts& o) {
  experiments::ScanConfig cfg;
  cfg.xs = parse_integers(o.x, "x");
  cfg.theta = o.theta;
  if (!o.Q.empty()) cfg.Qs = parse_list(o.Q, "Q");
  cfg.a = o.a;
  cfg.A = o.A;
  cfg.B = o.B;
  cfg.max_moduli = o.max_moduli;
  cfg.unit_checks = o.unit_checks;
  cfg.cache_dir = o.cache;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int run_divisor_scan(const Globals& g, const ScanOpts& o) {
  const auto cfg = to_config(o);
  const auto recs = experiments::single_scan(cfg, Exec{g.threads});
  Output out(g, "divisor_scan.csv");
  divisor::write_csv(out.stream(), recs);
  double worst = 0;
  for (const auto& r : recs) worst = std::max(worst, std::fabs(r.norm_delta));
  std::cout << "divisor-scan records=" << recs.size() << " max|q delta/x|=" << csv::format(worst)
            << "; wrote " << out.path() << "\n";
  return kOk;
}

int run_averaged_scan(const Globals& g, const ScanOpts& o) {
  const auto cfg = to_config(o);
  const Exec exec{g.threads};
  const auto reps = experiments::averaged_scan(cfg, exec);
  Output out(g, "averaged_scan.csv");
  experiments::write_csv(out.stream(), reps);
  bool ok = true;
  for (const auto& r : reps) {
    ok &= std::fabs(r.sigma0 - r.sigma1) <= r.sum_abs_delta * (1 + 1e-12) + 1e-9;
  }
  if (o.smooth) {
    std::vector<experiments::SmoothAveragedReport> sm;
    for (const auto& r : reps) {
      int levels[3];
      experiments::balanced_levels(static_cast<double>(r.x), cfg.B, levels);
      sm.push_back(experiments::smooth_averaged_sum(static_cast<double>(r.x), r.Q, cfg.a, cfg.B,
                                                    levels, exec));
    }
    std::filesystem::path sp(out.path());
    sp.replace_filename(sp.stem().string() + "_smooth.csv");
    std::ofstream s(sp);
    experiments::write_csv(s, sm);
  }
  std::cout << "averaged-scan reports=" << reps.size();
  if (!reps.empty()) std::cout << " last_ratio=" << csv::format(reps.back().ratio);
  std::cout << (ok ? "" : " TRIANGLE INEQUALITY FAILED") << "; wrote " << out.path() << "\n";
  return ok ? kOk : kCheckFailed;
}

struct WeightOpts {
  u64 p = 101;
  int k = 3;
  i64 h = 1;
};

trace::PeriodicFunction weight(const WeightOpts& o) {
  const Prime p = require_prime(o.p);
  if (o.k < 2 || o.k > 4) throw ConfigError("--k must be 2, 3 or 4");
  if (ff::reduce(o.h, p) == 0) throw ConfigError("--shift must be nonzero mod p");
  return trace::sheaf_weight_function(trace::KloostermanSpec(o.k, ff::Residue(o.h, p)));
}

int run_bilinear(const Globals& g, const WeightOpts& w, double M1, double M2) {
  if (!(M1 >= 1.0 && M2 >= 1.0)) throw ConfigError("--M1 and --M2 must be >= 1");
  const auto K = weight(w);
  const auto piece = windows::partition_piece(2.0, 0).window;
  const auto r = cancellation::bilinear_sum(K, piece, piece, M1, M2);
  Output out(g, "bilinear.csv");
  cancellation::write_csv(out.stream(), std::vector{r});
  const bool ok = std::abs(r.sum) <= r.trivial_bound;
  std::cout << "bilinear p=" << r.p << " |sum|=" << csv::format(std::abs(r.sum))
            << " ratio_trivial=" << csv::format(r.ratio_trivial)
            << " ratio_envelope=" << csv::format(r.ratio_envelope) << (ok ? "" : " TRIVIAL BOUND FAILED")
            << "; wrote " << out.path() << "\n";
  return ok ? kOk : kCheckFailed;
}

int run_trilinear(const Globals& g, const WeightOpts& w, i64 N1, i64 N2, i64 N3,
                  const std::string& coeffs) {
  if (N1 < 1 || N2 < 1 || N3 < 1) throw ConfigError("--N1, --N2, --N3 must be >= 1");
  if (coeffs != "ones" && coeffs != "random") throw ConfigError("--coeffs is ones or random");
  const auto K = weight(w);
  std::mt19937_64 rng(g.seed);
  const auto make = [&](i64 N) {
    if (coeffs == "ones") return cancellation::Coefficients::ones(N);
    std::vector<cplx> v(static_cast<std::size_t>(2 * N + 1));
    for (auto& z : v) z = std::polar(1.0, static_cast<double>(rng() >> 11) * 0x1p-53 * 6.283185307179586);
    v[static_cast<std::size_t>(N)] = 0.0;
    return cancellation::Coefficients(N, std::move(v));
  };
  const auto al = make(N1), be = make(N2), ga = make(N3);
  const auto r = cancellation::trilinear_sum(K, al, be, ga, Exec{g.threads});
  const auto grouped = cancellation::trilinear_grouped(K, al, be, ga);
  Output out(g, "trilinear.csv");
  cancellation::write_csv(out.stream(), std::vector{r});
  const double gap = std::abs(r.sum - grouped);
  const bool ok = gap <= 1e-10 && std::abs(r.sum) <= r.trivial_bound;
  std::cout << "trilinear p=" << r.p << " |sum|=" << csv::format(std::abs(r.sum))
            << " grouping_gap=" << csv::format(gap) << " ratio_envelope=" << csv::format(r.ratio_envelope)
            << (ok ? "" : " FAILED") << "; wrote " << out.path() << "\n";
  return ok ? kOk : kCheckFailed;
}

struct RegionOpts {
  double kappa = 0.5;
  double mu3 = 0.4;
  double mu1 = -1.0;
  double mu2 = -1.0;
  double eta = 1e-3;
  double B = 1.0;
};

int run_region_check(const Globals& g, const RegionOpts& o) {
  windows::ExponentProfile prof;
  prof.kappa = o.kappa;
  prof.mu3 = o.mu3;
  // Unspecified mu1, mu2 split the remaining mass evenly.
  prof.mu1 = o.mu1 >= 0 ? o.mu1 : (1.0 - o.mu3) / 2.0;
  prof.mu2 = o.mu2 >= 0 ? o.mu2 : (1.0 - o.mu3) / 2.0;
  prof.eta = o.eta;
  prof.B = o.B;
  windows::Region region;
  try {
    region = windows::region_check(prof);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!g.out.empty()) {
    Output out(g, g.out);
    const auto m = windows::region_margins(prof);
    csv::Writer w(out.stream(), {"kappa", "mu1", "mu2", "mu3", "eta", "region", "first_kappa",
                                 "first_mu3", "second_kappa", "second_lower", "second_upper"});
    w.row(prof.kappa, prof.mu1, prof.mu2, prof.mu3, prof.eta, windows::to_string(region),
          m.first_kappa, m.first_mu3, m.second_kappa, m.second_lower, m.second_upper);
  }
  std::cout << windows::to_string(region) << "\n";
  return kOk;
}

int run_selftest(const Globals& g) {
  Output out(g, "selftest.csv");
  const auto res = selftest::run(out.stream(), g.seed, Exec{g.threads});
  std::cout << "selftest checks=" << res.checks << " failures=" << res.failures << "; wrote "
            << out.path() << "\n";
  return res.ok() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-field transforms, summation identities and d_3 progression scans"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Seed for randomized inputs");
  app.add_option("--out", g.out, "Output CSV path (relative paths go under $D3DIST_OUT_DIR)");
  std::string config_unused;
  app.add_option("--config", config_unused, "key = value file; flags override it");

  KloostermanOpts ko;
  auto* kl = app.add_subcommand("kloosterman", "Table of Kl_k(a h; p) for all a");
  kl->add_option("--p", ko.p, "Prime modulus");
  kl->add_option("--k", ko.k, "Rank");
  kl->add_option("--shift", ko.h, "Nonzero shift h");

  IdentityOpts io;
  auto* vi = app.add_subcommand("verify-identities", "Poisson, tempered Voronoi, A+B+C+D, Bessel link");
  vi->add_option("--p", io.p, "Prime modulus");
  vi->add_option("--tol", io.tol, "Residual tolerance");
  vi->add_option("--scales", io.scales, "Three window scales, comma separated");

  ScanOpts so;
  auto add_scan = [&](CLI::App* sub) {
    sub->add_option("--x", so.x, "x values, comma separated, ascending");
    sub->add_option("--theta", so.theta, "Moduli q ~ x^theta");
    sub->add_option("--Q", so.Q, "Explicit Q values (override theta)");
    sub->add_option("--a", so.a, "Residue class");
    sub->add_option("--A", so.A, "Log power in the comparison scale x / L^A");
    sub->add_option("--B", so.B, "Partition parameter");
    sub->add_option("--max-moduli", so.max_moduli, "Cap on moduli per x (0 = all)");
    sub->add_option("--unit-checks", so.unit_checks, "Moduli per x with a full unit sweep");
    sub->add_option("--cache", so.cache, "Directory for cached d_3 tables");
  };
  auto* ds = app.add_subcommand("divisor-scan", "Error terms Delta(x; q, a) for single moduli");
  add_scan(ds);
  auto* as = app.add_subcommand("averaged-scan", "Sum over q ~ Q of |Delta(x; q, a)|");
  add_scan(as);
  as->add_flag("--smooth", so.smooth, "Also report the smooth sign convention");

  WeightOpts wo;
  double M1 = 32, M2 = 32;
  auto* bl = app.add_subcommand("bilinear", "sum K(m1 m2) V(m1/M1) W(m2/M2)");
  i64 N1 = 8, N2 = 8, N3 = 16;
  std::string coeffs = "ones";
  auto* tl = app.add_subcommand("trilinear", "Type III sum with arbitrary coefficients");
  for (auto* sub : {bl, tl}) {
    sub->add_option("--p", wo.p, "Prime modulus");
    sub->add_option("--k", wo.k, "Kloosterman rank of the weight");
    sub->add_option("--shift", wo.h, "Nonzero shift h");
  }
  bl->add_option("--M1", M1, "First scale");
  bl->add_option("--M2", M2, "Second scale");
  tl->add_option("--N1", N1, "First length");
  tl->add_option("--N2", N2, "Second length");
  tl->add_option("--N3", N3, "Third length");
  tl->add_option("--coeffs", coeffs, "ones or random");

  RegionOpts ro;
  auto* rc = app.add_subcommand("region-check", "Which estimate covers (kappa, mu)");
  rc->add_option("--kappa", ro.kappa, "log q / log x")->required();
  rc->add_option("--mu3", ro.mu3, "log M3 / log x")->required();
  rc->add_option("--mu1", ro.mu1, "log M1 / log x (default (1 - mu3)/2)");
  rc->add_option("--mu2", ro.mu2, "log M2 / log x (default (1 - mu3)/2)");
  rc->add_option("--eta", ro.eta, "Margin eta > 0");
  rc->add_option("--B", ro.B, "Partition parameter");

  auto* st = app.add_subcommand("selftest", "Run every module's invariants");

  try {
    auto args = expand_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }

  try {
    if (*kl) return run_kloosterman(g, ko);
    if (*vi) return run_verify_identities(g, io);
    if (*ds) return run_divisor_scan(g, so);
    if (*as) return run_averaged_scan(g, so);
    if (*bl) return run_bilinear(g, wo, M1, M2);
    if (*tl) return run_trilinear(g, wo, N1, N2, N3, coeffs);
    if (*rc) return run_region_check(g, ro);
    if (*st) return run_selftest(g);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const identities::TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::logic_error& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kConfigError;
}
