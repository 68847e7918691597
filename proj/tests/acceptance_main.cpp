// Acceptance suite: one criterion per section, one pass/fail line each.
// Statistical criteria run at 3 sigma with a single fresh-seed retry; with
// ~60 such comparisons the expected false-failure rate of a full run stays
// below a few percent (Bonferroni note printed at the end).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dyson/correlation_kernels.hpp"
#include "dyson/dyson_simulators.hpp"
#include "dyson/entire_functions.hpp"
#include "dyson/suites.hpp"
#include "dyson/verification.hpp"

using namespace dyson;

namespace {

constexpr std::uint64_t kSeed = 0xD75054;
constexpr int kWorkers = 0;  // hardware concurrency

struct Outcome {
  bool pass;
  std::string detail;
};

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// ---- criterion 1 ---------------------------------------------------------

Outcome determinant_identity() {
  RngStream rng(kSeed, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 7.0);
    std::vector<double> u;
    while (u.size() < n) {
      const double cand = -3.0 + 6.0 * rng.uniform();
      bool ok = true;
      for (double v : u) ok = ok && std::abs(v - cand) >= 1e-2;
      if (ok) u.push_back(cand);
    }
    std::sort(u.begin(), u.end());
    std::vector<Complex> z(n);
    for (auto& zz : z) {
      double re, im;
      do {
        re = -5.0 + 10.0 * rng.uniform();
        im = -5.0 + 10.0 * rng.uniform();
      } while (re * re + im * im > 25.0);
      zz = Complex(re, im);
    }
    const Configuration xi(u);
    const Complex det = det_martingale(xi, z);
    const Complex ratio = vandermonde(std::span<const Complex>(z)) /
                          vandermonde(std::span<const double>(xi.points()));
    worst = std::max(worst, std::abs(det - ratio) / std::max(1.0, std::abs(ratio)));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max relative deviation %.2e", worst);
  return {worst <= 1e-8, buf};
}

// ---- criteria driven by the shipped suites -------------------------------

Outcome suite_outcome(const SuiteResult& res) {
  std::size_t failed = 0;
  for (const auto& nr : res.reports) failed += nr.report.pass ? 0 : 1;
  return {res.pass, std::to_string(res.reports.size() - failed) + "/" +
                        std::to_string(res.reports.size()) + " cases passed"};
}

// ---- criterion 4 ---------------------------------------------------------

struct Histogram {
  static constexpr int kBins = 80;
  static constexpr double kLo = -4.0;
  static constexpr double kHi = 4.0;
  static double width() { return (kHi - kLo) / kBins; }
  static int bin(double x) {
    if (x < kLo || x >= kHi) return -1;
    return static_cast<int>((x - kLo) / width());
  }
};

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]) * Histogram::width();
  return s;
}

Outcome three_way_agreement() {
  const Configuration xi({-1.0, 1.0});
  const std::vector<double> times{0.25, 1.0};
  const std::size_t n_paths = 100000;

  // per-bin expected counts from the kernel density (4-point rule per bin)
  KernelContext ctx(xi);
  const auto bin_rule = quadrature::gauss_legendre(0.0, 1.0, 4);
  std::vector<std::vector<double>> exact(times.size(), std::vector<double>(Histogram::kBins));
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (int b = 0; b < Histogram::kBins; ++b) {
      const double lo = Histogram::kLo + b * Histogram::width();
      double mass = 0.0;
      for (std::size_t q = 0; q < bin_rule.size(); ++q)
        mass += bin_rule.weights[q] *
                density(ctx, times[ti], lo + bin_rule.nodes[q] * Histogram::width());
      exact[ti][b] = mass;  // mean density over the bin
    }
  }

  const std::size_t dims = times.size() * Histogram::kBins;
  auto histogram_of = [&](auto simulate) {
    const auto m = mc_accumulate(n_paths, dims, kWorkers,
                                 [&](std::size_t item, std::vector<double>& out) {
                                   const Trajectory traj = simulate(item);
                                   for (std::size_t ti = 0; ti < times.size(); ++ti)
                                     for (double x : traj.at_time(times[ti])) {
                                       const int b = Histogram::bin(x);
                                       if (b >= 0) out[ti * Histogram::kBins + b] += 1.0;
                                     }
                                 });
    std::vector<std::vector<double>> hist(times.size(), std::vector<double>(Histogram::kBins));
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (int b = 0; b < Histogram::kBins; ++b)
        hist[ti][b] = m.sum[ti * Histogram::kBins + b] /
                      (static_cast<double>(n_paths) * Histogram::width());
    return hist;
  };

  const TimeGrid sde_grid = TimeGrid::uniform(1.0, 100);
  const auto sde_hist = histogram_of([&](std::size_t item) {
    RngStream rng(kSeed, item);
    return simulate_sde(xi, sde_grid, rng);
  });
  const TimeGrid gue_grid({0.0, 0.25, 1.0});
  const auto gue_hist = histogram_of([&](std::size_t item) {
    RngStream rng(kSeed, n_paths + item);
    return simulate_gue(xi, gue_grid, rng);
  });

  double worst = 0.0;
  std::string detail;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double sg = l1_distance(sde_hist[ti], gue_hist[ti]);
    const double se = l1_distance(sde_hist[ti], exact[ti]);
    const double ge = l1_distance(gue_hist[ti], exact[ti]);
    worst = std::max({worst, sg, se, ge});
    char buf[96];
    std::snprintf(buf, sizeof(buf), "t=%.2f L1(sde,gue)=%.3f (sde,exact)=%.3f (gue,exact)=%.3f ",
                  times[ti], sg, se, ge);
    detail += buf;
  }
  return {worst <= 0.05, detail};
}

// ---- criterion 5 ---------------------------------------------------------

Outcome route_equivalence() {
  double worst = 0.0;
  for (const auto& pts : {std::vector<double>{-1.0, 0.0, 2.0},
                          std::vector<double>{-2.0, -0.6, 0.6, 2.0}}) {
    // Tight contour: the trapezoid summand grows like exp(R^2/2s), so the
    // default radius rule would put ~1e11 of cancellation noise against a
    // 1e-6 gate for the spread-4 configuration at s = 0.3.
    const double center = 0.5 * (pts.front() + pts.back());
    KernelOptions opt;
    opt.contour = ContourSpec{Complex(center, 0.0), 0.5 * (pts.back() - pts.front()) + 1.0, 256};
    KernelContext ctx{Configuration(pts), opt};
    for (double s : {0.3, 0.7}) {
      for (double t : {0.3, 0.7}) {
        for (int i = 0; i < 5; ++i) {
          for (int j = 0; j < 5; ++j) {
            const double x = -2.0 + i;
            const double y = -2.0 + j;
            const double direct = kernel_K(ctx, s, x, t, y);
            const double contour = contour_kernel_K(ctx, s, x, t, y);
            worst = std::max(worst, std::abs(direct - contour));
          }
        }
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max abs route difference %.2e", worst);
  return {worst <= 1e-6, buf};
}

// ---- criterion 6 ---------------------------------------------------------

Outcome determinantal_structure() {
  const Configuration xi({0.0, 1.0});
  KernelContext ctx(xi);
  const double t = 0.5;

  double worst_reproducing = 0.0;
  for (const auto& [x, z] : std::vector<std::pair<double, double>>{
           {0.2, 0.9}, {-0.5, 0.4}, {1.3, -0.2}}) {
    double composed = 0.0;
    const int nq = 2000;
    const double a = -8.0, b = 8.0, h = (b - a) / nq;
    for (int k = 0; k <= nq; ++k) {
      const double y = a + h * k;
      const double w = (k == 0 || k == nq) ? 0.5 : 1.0;
      composed += w * h * green_G(ctx, t, t, x, y) * green_G(ctx, t, t, y, z);
    }
    worst_reproducing = std::max(worst_reproducing, std::abs(composed - green_G(ctx, t, t, x, z)));
  }

  double trace = 0.0;
  {
    const int nq = 2000;
    const double a = -7.0, b = 8.0, h = (b - a) / nq;
    for (int k = 0; k <= nq; ++k)
      trace += ((k == 0 || k == nq) ? 0.5 : 1.0) * h * density(ctx, t, a + h * k);
  }

  SuiteParams sp;
  sp.n_paths = 1000000;
  sp.seed = kSeed;
  sp.workers = kWorkers;
  const SuiteResult two_time = run_corollary2_suite(sp);

  const bool pass =
      worst_reproducing <= 1e-6 && std::abs(trace - 2.0) <= 1e-6 && two_time.pass;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "reproducing %.2e, |trace-2| %.2e, two-time z=%.2f at 1e6 paths",
                worst_reproducing, std::abs(trace - 2.0),
                two_time.reports[0].report.z_score);
  return {pass, buf};
}

// ---- criterion 7 ---------------------------------------------------------

Outcome fredholm_consistency() {
  const Configuration pair({0.0, 1.0});
  KernelContext ctx(pair);
  const GridSpec grid{-1.0, 2.0, 200};

  auto zero = [](double) { return 0.0; };
  const double identity = fredholm_mgf(ctx, {0.5}, {zero}, grid).value;

  const double eps = 1e-5;
  auto chi_p = [eps](double) { return eps; };
  auto chi_m = [eps](double) { return -eps; };
  const double derivative = (fredholm_mgf(ctx, {0.5}, {chi_p}, grid).value -
                             fredholm_mgf(ctx, {0.5}, {chi_m}, grid).value) /
                            (2.0 * eps);
  double mass = 0.0;
  {
    const int nq = 4000;
    const double h = (grid.b - grid.a) / nq;
    for (int k = 0; k <= nq; ++k)
      mass += ((k == 0 || k == nq) ? 0.5 : 1.0) * h * density(ctx, 0.5, grid.a + h * k);
  }

  KernelContext single{Configuration({0.0})};
  auto window = [](double) { return -1.0; };
  const double t = 0.7;
  const double gap = fredholm_mgf(single, {t}, {window}, grid).value;
  const double gap_exact =
      1.0 - (normal_cdf(grid.b / std::sqrt(t)) - normal_cdf(grid.a / std::sqrt(t)));

  const bool pass = identity == 1.0 && std::abs(derivative - mass) <= 1e-5 &&
                    std::abs(gap - gap_exact) <= 1e-8;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "identity %.17g, |dDet-mass| %.2e, |gap-exact| %.2e",
                identity, std::abs(derivative - mass), std::abs(gap - gap_exact));
  return {pass, buf};
}

// ---- criterion 10 --------------------------------------------------------

Outcome infinite_configuration() {
  const auto lattice = InfiniteConfigSpec::lattice();
  const ConditionParams params{1.0, 1.5, 4.0, 0.5, 10.0};
  const auto conditions =
      check_conditions(lattice, params, {1.0, 10.0, 100.0, 1000.0, 10000.0});

  TruncationProbe probe;
  probe.t = 0.2;
  for (int k = -4; k <= 4; ++k) probe.x_grid.push_back(0.5 * k);
  TruncationOptions opt;
  opt.with_mgf = true;
  const auto table =
      truncation_convergence(lattice, {800.0, 1600.0, 3200.0, 6400.0}, probe, opt);

  const bool pass = conditions.satisfied_C1 && conditions.satisfied_C2 && table.pass;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "C1 %s, C2 %s; density diffs %.2e>%.2e>%.2e, mgf final %.2e",
                conditions.satisfied_C1 ? "ok" : "FAIL",
                conditions.satisfied_C2 ? "ok" : "FAIL", table.density_sup_diffs[0],
                table.density_sup_diffs[1], table.density_sup_diffs[2],
                table.mgf_diffs.back());
  return {pass, buf};
}

// ---- criterion 11 --------------------------------------------------------

Outcome determinism() {
  SuiteParams sp;
  sp.n_paths = 20000;
  sp.seed = kSeed;
  sp.build_id = "acceptance";
  sp.workers = 1;
  const std::string one = run_corollary2_suite(sp).json;
  sp.workers = 2;
  const std::string two = run_corollary2_suite(sp).json;
  sp.workers = 3;
  const std::string three = run_martingale_suite([&] {
                              SuiteParams m = sp;
                              m.n_paths = 5000;
                              return m;
                            }()).json;
  sp.workers = 1;
  const std::string three_b = run_martingale_suite([&] {
                                SuiteParams m = sp;
                                m.n_paths = 5000;
                                return m;
                              }()).json;
  const bool pass = (one == two) && (three == three_b);
  return {pass, pass ? "reports byte-identical across worker counts"
                     : "worker count leaked into a report"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };

  const std::vector<Criterion> criteria = {
      {1, "determinant identity, 200 random instances n in 2..8", determinant_identity},
      {2, "martingale suite, 20 grid times x 2 configurations",
       [] {
         SuiteParams sp;
         sp.n_paths = 100000;
         sp.seed = kSeed;
         sp.workers = kWorkers;
         return suite_outcome(run_martingale_suite(sp));
       }},
      {3, "weighted-CBM identity, 12 shipped cases",
       [] {
         SuiteParams sp;
         sp.n_paths = 100000;
         sp.seed = kSeed;
         sp.workers = kWorkers;
         return suite_outcome(run_theorem1_suite(sp));
       }},
      {4, "three-way realization agreement, L1 over 80 bins", three_way_agreement},
      {5, "kernel route equivalence on the 5x5x4 lattice, n <= 4", route_equivalence},
      {6, "determinantal structure: reproducing, trace, two-time counts",
       determinantal_structure},
      {7, "Fredholm consistency: identity, derivative, gap probability",
       fredholm_consistency},
      {8, "fourth-moment scaling slope in [1.7, 2.3]",
       [] {
         SuiteParams sp;
         sp.n_paths = 100000;
         sp.seed = kSeed;
         sp.workers = kWorkers;
         const SuiteResult res = run_moment_suite(sp);
         return Outcome{res.pass,
                        "slope " + std::to_string(res.reports[0].report.lhs.value)};
       }},
      {9, "noncolliding: zero breakdowns over 1e4 adaptive runs",
       [] {
         SuiteParams sp;
         sp.n_paths = 10000;
         sp.seed = kSeed;
         sp.workers = kWorkers;
         const SuiteResult res = run_collision_suite(sp);
         return Outcome{res.pass, res.reports[0].report.note};
       }},
      {10, "infinite configuration: conditions and truncation convergence",
       infinite_configuration},
      {11, "determinism: byte-identical reports across worker counts", determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome{false, "exception"};
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::printf("[%s] criterion %2d: %s (%s; %lld ms)\n", outcome.pass ? "PASS" : "FAIL",
                c.id, c.name, outcome.detail.c_str(), static_cast<long long>(ms));
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d/11 criteria passed. Statistical cases run at 3 sigma with one fresh-seed "
              "retry; a clean run has a false-failure chance of a few percent, so rerun "
              "once before treating a red statistical criterion as real.\n",
              11 - failures);
  return failures;
}
