#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dyson/configuration.hpp"
#include "dyson/correlation_kernels.hpp"
#include "dyson/dyson_simulators.hpp"
#include "dyson/stochastic_paths.hpp"

namespace dyson {

struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(n_paths)
  std::size_t n_paths = 0;
};

struct SideValue {
  double value = 0.0;
  double stderr_ = 0.0;
  bool exact = false;
};

struct ComparisonReport {
  SideValue lhs;
  SideValue rhs;
  double z_score = 0.0;
  bool pass = false;
  std::string note;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  std::size_t n_paths = 0;
};

/// Two-sided comparison: z pooled over whatever stderr is available; two
/// exact values compare against abs_tol instead.
ComparisonReport compare(SideValue lhs, SideValue rhs, double abs_tol = 1e-12);

// -------------------------------------------------------------------------
// Deterministic parallel Monte Carlo driver.
//
// Work is split into fixed chunks; a worker pool claims chunks dynamically
// but per-chunk partial sums are merged in chunk order, so every statistic is
// bit-identical for any worker count. Each item derives its own RNG streams
// from (seed, stream_base + item * streams_per_item); the driver never owns
// random state.
// -------------------------------------------------------------------------

struct McMoments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::size_t n = 0;

  MCEstimate estimate(std::size_t dim = 0) const;
};

McMoments mc_accumulate(std::size_t n_items, std::size_t dims, int workers,
                        const std::function<void(std::size_t item, std::vector<double>& out)>& eval);

int resolve_workers(int workers);

// -------------------------------------------------------------------------
// Bounded test functionals: products over evaluation times of either a sum of
// bump values over particles or a product of (1 + bump) factors.
// -------------------------------------------------------------------------

struct BumpSpec {
  double center = 0.0;
  double halfwidth = 1.0;
  double amplitude = 1.0;
};

/// Smooth compactly supported bump: amplitude * exp(1 - 1/(1-u^2)) inside
/// |u| < 1 with u = (x - center)/halfwidth, zero outside.
double bump_value(const BumpSpec& b, double x);

struct FunctionalSpec {
  enum class Kind { Constant, SumOfBumps, ProductOnePlusBump };
  Kind kind = Kind::Constant;
  std::vector<double> times;      // strictly increasing, all below the horizon
  std::vector<BumpSpec> bumps;    // one per time (ignored for Constant)
};

/// F applied to the particle states at the functional's times.
double evaluate_functional(const FunctionalSpec& f,
                           const std::vector<const std::vector<double>*>& states_at_times);

// -------------------------------------------------------------------------
// Verification operations.
// -------------------------------------------------------------------------

struct VerifyParams {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  int workers = 0;  // 0 = hardware concurrency
  double grid_step = 0.01;
};

/// Interacting-system expectation of F versus the weighted free-CBM
/// expectation of F(real parts) * det martingale at horizon T. The two sides
/// use disjoint stream ranges: [base, base + n) and [base + n, base + n(1+2n)).
/// Throws WeightBlowup when the weighted side's stderr exceeds 10% of |mean|.
ComparisonReport verify_theorem_1(const Configuration& xi, const FunctionalSpec& F, double T,
                                  const VerifyParams& params);

struct Box {
  double lo;
  double hi;
};

/// Multitime correlation versus box-counting frequencies from the SDE
/// simulator: lhs is the joint hit probability per unit box volume, rhs the
/// kernel block determinant at the box centers. Bin-width bias is O(h^2) and
/// recorded in the note. Throws InsufficientCounts below 100 joint hits.
ComparisonReport verify_corollary_2(const Configuration& xi, const std::vector<double>& times,
                                    const std::vector<Box>& boxes, const VerifyParams& params);

struct FourthMomentResult {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> gaps;
  std::vector<MCEstimate> moments;
  bool pass = false;  // slope >= 1.7
};

/// log-log regression of E[(<phi,Xi(t)> - <phi,Xi(s)>)^4] against |t - s|.
/// Throws InsufficientPaths when any moment's stderr exceeds 20% of its mean.
FourthMomentResult fourth_moment_scaling(const Configuration& xi, const BumpSpec& phi,
                                         const std::vector<std::pair<double, double>>& pairs,
                                         const VerifyParams& params);

struct CollisionScanResult {
  double min_gap_observed = 0.0;  // +inf convention for a single particle
  std::size_t breakdown_count = 0;
  std::size_t paths_below_floor = 0;  // paths whose minimal gap dipped under gap_floor
};

/// Runs the SDE simulator n_paths times and records the global minimum
/// inter-particle gap plus every CollisionBreakdown. Failure of a path is
/// counted, not propagated.
CollisionScanResult collision_scan(const Configuration& xi, const TimeGrid& grid,
                                   std::size_t n_paths, double gap_floor,
                                   const VerifyParams& params, const SdeOptions& options = {});

struct TruncationProbe {
  double t = 0.2;
  std::vector<double> x_grid;
};

struct TruncationTable {
  std::vector<double> L_values;
  std::vector<std::vector<double>> density_profiles;
  std::vector<double> density_sup_diffs;  // between consecutive L
  std::vector<double> mgf_values;         // empty unless the MGF variant ran
  std::vector<double> mgf_diffs;
  bool monotone = false;
  bool pass = false;  // monotone and final difference < 1e-4
};

struct TruncationOptions {
  bool with_mgf = false;
  double mgf_half_window = 0.5;  // chi = -1 on [-w, w]
  GridSpec mgf_grid{-0.5, 0.5, 100};
  std::size_t gh_order = 64;
};

/// Density (and optionally gap-probability MGF) profiles across a widening
/// window list, with successive sup-norm differences.
TruncationTable truncation_convergence(const InfiniteConfigSpec& spec,
                                       const std::vector<double>& L_list,
                                       const TruncationProbe& probe,
                                       const TruncationOptions& options = {});

/// MC mean of the determinantal weight at every grid time (flat at 1 for a
/// martingale). One estimate per grid index, skipping t = 0.
std::vector<MCEstimate> martingale_flatness(const Configuration& xi, const TimeGrid& grid,
                                            const VerifyParams& params);

// -------------------------------------------------------------------------
// Report serialization. Worker counts are deliberately excluded so reruns
// with different pool sizes emit byte-identical documents.
// -------------------------------------------------------------------------

struct NamedReport {
  std::string name;
  ComparisonReport report;
};

std::string report_collection_json(const std::string& suite, std::uint64_t seed,
                                   std::uint64_t stream_base, std::size_t n_paths,
                                   const std::string& build_id,
                                   const std::vector<NamedReport>& reports);

}  // namespace dyson
