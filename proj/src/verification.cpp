#include "dyson/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dyson/entire_functions.hpp"
#include "dyson/errors.hpp"

namespace dyson {

namespace {
constexpr std::size_t kChunkSize = 512;
}

MCEstimate McMoments::estimate(std::size_t dim) const {
  if (n < 2) throw std::invalid_argument("McMoments: need at least 2 samples");
  MCEstimate e;
  e.n_paths = n;
  e.mean = sum[dim] / static_cast<double>(n);
  const double var =
      std::max(0.0, (sum_sq[dim] - static_cast<double>(n) * e.mean * e.mean) /
                        static_cast<double>(n - 1));
  e.stderr_ = std::sqrt(var / static_cast<double>(n));
  return e;
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

McMoments mc_accumulate(std::size_t n_items, std::size_t dims, int workers,
                        const std::function<void(std::size_t, std::vector<double>&)>& eval) {
  const std::size_t n_chunks = (n_items + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<double>> chunk_sum(n_chunks);
  std::vector<std::vector<double>> chunk_sq(n_chunks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    std::vector<double> out(dims);
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      std::vector<double> s(dims, 0.0);
      std::vector<double> sq(dims, 0.0);
      const std::size_t lo = c * kChunkSize;
      const std::size_t hi = std::min(n_items, lo + kChunkSize);
      try {
        for (std::size_t item = lo; item < hi; ++item) {
          std::fill(out.begin(), out.end(), 0.0);
          eval(item, out);
          for (std::size_t d = 0; d < dims; ++d) {
            s[d] += out[d];
            sq[d] += out[d] * out[d];
          }
        }
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n_chunks);
        return;
      }
      chunk_sum[c] = std::move(s);
      chunk_sq[c] = std::move(sq);
    }
  };

  const int n_workers = std::min<int>(resolve_workers(workers), static_cast<int>(n_chunks));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Merge strictly in chunk order: results do not depend on the pool size.
  McMoments m;
  m.sum.assign(dims, 0.0);
  m.sum_sq.assign(dims, 0.0);
  m.n = n_items;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    for (std::size_t d = 0; d < dims; ++d) {
      m.sum[d] += chunk_sum[c][d];
      m.sum_sq[d] += chunk_sq[c][d];
    }
  }
  return m;
}

ComparisonReport compare(SideValue lhs, SideValue rhs, double abs_tol) {
  ComparisonReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  const double diff = lhs.value - rhs.value;
  if (lhs.exact && rhs.exact) {
    rep.z_score = 0.0;
    rep.pass = std::abs(diff) <= abs_tol;
    return rep;
  }
  const double pooled = std::sqrt(lhs.stderr_ * lhs.stderr_ + rhs.stderr_ * rhs.stderr_);
  rep.z_score = (pooled > 0.0) ? diff / pooled : (diff == 0.0 ? 0.0 : std::copysign(1e12, diff));
  rep.pass = std::abs(rep.z_score) <= 3.0;
  return rep;
}

double bump_value(const BumpSpec& b, double x) {
  const double u = (x - b.center) / b.halfwidth;
  if (!(std::abs(u) < 1.0)) return 0.0;
  return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double evaluate_functional(const FunctionalSpec& f,
                           const std::vector<const std::vector<double>*>& states_at_times) {
  if (f.kind == FunctionalSpec::Kind::Constant) return 1.0;
  if (states_at_times.size() != f.times.size())
    throw DimensionMismatch("evaluate_functional: one state per functional time required");
  double value = 1.0;
  for (std::size_t m = 0; m < f.times.size(); ++m) {
    const std::vector<double>& xs = *states_at_times[m];
    if (f.kind == FunctionalSpec::Kind::SumOfBumps) {
      double s = 0.0;
      for (double x : xs) s += bump_value(f.bumps[m], x);
      value *= s;
    } else {
      for (double x : xs) value *= 1.0 + bump_value(f.bumps[m], x);
    }
  }
  return value;
}

namespace {

// Uniform lattice of the given step with the required times spliced in
// exactly (a lattice point within 1e-9 of a required time yields to it).
TimeGrid grid_covering(const std::vector<double>& required, double step, double t_end) {
  std::vector<double> keep(required.begin(), required.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
             keep.end());
  auto near_required = [&](double t) {
    auto it = std::lower_bound(keep.begin(), keep.end(), t - 1e-9);
    return it != keep.end() && std::abs(*it - t) <= 1e-9;
  };
  std::vector<double> ts;
  ts.push_back(0.0);
  for (std::size_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * step;
    if (t >= t_end - 1e-12) break;
    if (!near_required(t)) ts.push_back(t);
  }
  if (!near_required(t_end)) ts.push_back(t_end);
  for (double t : keep)
    if (t > 1e-12) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  return TimeGrid(std::move(ts));
}

std::vector<const std::vector<double>*> states_at(const Trajectory& traj,
                                                  const std::vector<double>& times) {
  std::vector<const std::vector<double>*> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(&traj.at_time(t));
  return out;
}

}  // namespace

ComparisonReport verify_theorem_1(const Configuration& xi, const FunctionalSpec& F, double T,
                                  const VerifyParams& params) {
  const std::size_t n = xi.size();
  const bool constant = F.kind == FunctionalSpec::Kind::Constant;
  if (!constant && F.times.empty())
    throw std::invalid_argument("verify_theorem_1: functional needs evaluation times");
  for (double t : F.times)
    if (!(t > 0.0 && t < T))
      throw std::invalid_argument("verify_theorem_1: functional times must lie in (0, T)");

  SideValue lhs;
  if (constant) {
    lhs = SideValue{1.0, 0.0, true};
  } else {
    const double t_last = *std::max_element(F.times.begin(), F.times.end());
    const TimeGrid sde_grid = grid_covering(F.times, params.grid_step, t_last);
    const auto moments = mc_accumulate(
        params.n_paths, 1, params.workers, [&](std::size_t item, std::vector<double>& out) {
          RngStream rng(params.seed, params.stream_base + item);
          const Trajectory traj = simulate_sde(xi, sde_grid, rng);
          out[0] = evaluate_functional(F, states_at(traj, F.times));
        });
    const MCEstimate e = moments.estimate();
    lhs = SideValue{e.mean, e.stderr_, false};
  }

  std::vector<double> cbm_times = F.times;
  cbm_times.push_back(T);
  TimeGrid cbm_grid = [&] {
    std::vector<double> ts{0.0};
    std::sort(cbm_times.begin(), cbm_times.end());
    for (double t : cbm_times)
      if (ts.empty() || t > ts.back() + 1e-12) ts.push_back(t);
    return TimeGrid(std::move(ts));
  }();

  const std::uint64_t rhs_base = params.stream_base + params.n_paths;
  const auto rhs_moments = mc_accumulate(
      params.n_paths, 1, params.workers, [&](std::size_t item, std::vector<double>& out) {
        const auto paths =
            sample_cbm_system(xi, cbm_grid, params.seed, rhs_base + 2 * n * item);
        double f = 1.0;
        if (!constant) {
          std::vector<std::vector<double>> v_states(F.times.size(), std::vector<double>(n));
          std::vector<const std::vector<double>*> ptrs(F.times.size());
          for (std::size_t m = 0; m < F.times.size(); ++m) {
            const std::size_t k = cbm_grid.index_of(F.times[m]);
            for (std::size_t i = 0; i < n; ++i) v_states[m][i] = paths[i].re.values[k];
            ptrs[m] = &v_states[m];
          }
          f = evaluate_functional(F, ptrs);
        }
        out[0] = f * det_martingale_along_path(xi, paths, T).real();
      });
  const MCEstimate rhs_e = rhs_moments.estimate();
  if (rhs_e.stderr_ > 0.1 * std::abs(rhs_e.mean))
    throw WeightBlowup("verify_theorem_1: weighted estimator stderr exceeds 10% of its mean");

  ComparisonReport rep = compare(lhs, SideValue{rhs_e.mean, rhs_e.stderr_, false});
  rep.seed = params.seed;
  rep.stream_base = params.stream_base;
  rep.n_paths = params.n_paths;
  return rep;
}

ComparisonReport verify_corollary_2(const Configuration& xi, const std::vector<double>& times,
                                    const std::vector<Box>& boxes, const VerifyParams& params) {
  if (times.size() != boxes.size() || times.empty())
    throw std::invalid_argument("verify_corollary_2: one box per time required");
  double volume = 1.0;
  double max_width = 0.0;
  for (const Box& b : boxes) {
    if (!(b.hi > b.lo)) throw std::invalid_argument("verify_corollary_2: empty box");
    volume *= b.hi - b.lo;
    max_width = std::max(max_width, b.hi - b.lo);
  }

  // Group boxes by time for the kernel request (times may repeat for
  // equal-time multi-box probes).
  CorrelationRequest req;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && times[i] < times[i - 1] - 1e-12)
      throw std::invalid_argument("verify_corollary_2: times must be nondecreasing");
    const double center = 0.5 * (boxes[i].lo + boxes[i].hi);
    if (!req.times.empty() && std::abs(times[i] - req.times.back()) <= 1e-12) {
      req.points.back().push_back(center);
    } else {
      req.times.push_back(times[i]);
      req.points.push_back({center});
    }
  }

  std::vector<double> unique_times = req.times;
  const double t_last = unique_times.back();
  const TimeGrid grid = grid_covering(unique_times, params.grid_step, t_last);

  const auto moments = mc_accumulate(
      params.n_paths, 1, params.workers, [&](std::size_t item, std::vector<double>& out) {
        RngStream rng(params.seed, params.stream_base + item);
        const Trajectory traj = simulate_sde(xi, grid, rng);
        double ind = 1.0;
        for (std::size_t i = 0; i < times.size() && ind > 0.0; ++i) {
          const auto& xs = traj.at_time(times[i]);
          bool hit = false;
          for (double x : xs) hit = hit || (x >= boxes[i].lo && x <= boxes[i].hi);
          if (!hit) ind = 0.0;
        }
        out[0] = ind;
      });
  const double hits = moments.sum[0];
  if (hits < 100.0)
    throw InsufficientCounts("verify_corollary_2: only " + std::to_string(hits) +
                             " joint hits; need 100");
  MCEstimate e = moments.estimate();
  e.mean /= volume;
  e.stderr_ /= volume;

  KernelContext ctx(xi);
  const double rho = multitime_correlation(ctx, req);

  ComparisonReport rep = compare(SideValue{e.mean, e.stderr_, false}, SideValue{rho, 0.0, true});
  rep.note = "bin width " + std::to_string(max_width) + "; O(h^2) bin bias uncorrected";
  rep.seed = params.seed;
  rep.stream_base = params.stream_base;
  rep.n_paths = params.n_paths;
  return rep;
}

FourthMomentResult fourth_moment_scaling(const Configuration& xi, const BumpSpec& phi,
                                         const std::vector<std::pair<double, double>>& pairs,
                                         const VerifyParams& params) {
  if (pairs.empty()) throw std::invalid_argument("fourth_moment_scaling: no pairs");
  std::vector<double> needed;
  double t_end = 0.0;
  for (auto [s, t] : pairs) {
    if (s > 0.0) needed.push_back(s);
    if (t > 0.0) needed.push_back(t);
    t_end = std::max({t_end, s, t});
  }
  const TimeGrid grid = grid_covering(needed, params.grid_step, t_end);

  const auto moments = mc_accumulate(
      params.n_paths, pairs.size(), params.workers,
      [&](std::size_t item, std::vector<double>& out) {
        RngStream rng(params.seed, params.stream_base + item);
        const Trajectory traj = simulate_sde(xi, grid, rng);
        auto field = [&](double t) {
          double s = 0.0;
          for (double x : traj.at_time(t)) s += bump_value(phi, x);
          return s;
        };
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          const double d = field(pairs[p].second) - field(pairs[p].first);
          out[p] = d * d * d * d;
        }
      });

  FourthMomentResult res;
  std::vector<double> log_gap;
  std::vector<double> log_moment;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double gap = std::abs(pairs[p].second - pairs[p].first);
    const MCEstimate e = moments.estimate(p);
    res.gaps.push_back(gap);
    res.moments.push_back(e);
    if (gap == 0.0) continue;  // exactly zero moment, excluded from the fit
    if (e.stderr_ > 0.2 * e.mean)
      throw InsufficientPaths("fourth_moment_scaling: stderr above 20% of the moment at gap " +
                              std::to_string(gap));
    log_gap.push_back(std::log(gap));
    log_moment.push_back(std::log(e.mean));
  }
  if (log_gap.size() < 2)
    throw std::invalid_argument("fourth_moment_scaling: need at least two distinct gaps");

  const double k = static_cast<double>(log_gap.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_gap.size(); ++i) {
    sx += log_gap[i];
    sy += log_moment[i];
    sxx += log_gap[i] * log_gap[i];
    sxy += log_gap[i] * log_moment[i];
  }
  res.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  res.intercept = (sy - res.slope * sx) / k;
  res.pass = res.slope >= 1.7;
  return res;
}

CollisionScanResult collision_scan(const Configuration& xi, const TimeGrid& grid,
                                   std::size_t n_paths, double gap_floor,
                                   const VerifyParams& params, const SdeOptions& options) {
  const std::size_t n_chunks = (n_paths + kChunkSize - 1) / kChunkSize;
  struct ChunkResult {
    double min_gap = std::numeric_limits<double>::infinity();
    std::size_t breakdowns = 0;
    std::size_t below = 0;
  };
  std::vector<ChunkResult> partial(n_chunks);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    while (true) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      ChunkResult r;
      const std::size_t lo = c * kChunkSize;
      const std::size_t hi = std::min(n_paths, lo + kChunkSize);
      for (std::size_t item = lo; item < hi; ++item) {
        RngStream rng(params.seed, params.stream_base + item);
        try {
          const Trajectory traj = simulate_sde(xi, grid, rng, options);
          double path_min = std::numeric_limits<double>::infinity();
          for (const auto& state : traj.states)
            for (std::size_t i = 1; i < state.size(); ++i)
              path_min = std::min(path_min, state[i] - state[i - 1]);
          r.min_gap = std::min(r.min_gap, path_min);
          if (path_min < gap_floor) ++r.below;
        } catch (const CollisionBreakdown&) {
          ++r.breakdowns;
        }
      }
      partial[c] = r;
    }
  };

  const int n_workers = std::min<int>(resolve_workers(params.workers), static_cast<int>(n_chunks));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  CollisionScanResult res;
  res.min_gap_observed = std::numeric_limits<double>::infinity();
  for (const ChunkResult& r : partial) {
    res.min_gap_observed = std::min(res.min_gap_observed, r.min_gap);
    res.breakdown_count += r.breakdowns;
    res.paths_below_floor += r.below;
  }
  return res;
}

TruncationTable truncation_convergence(const InfiniteConfigSpec& spec,
                                       const std::vector<double>& L_list,
                                       const TruncationProbe& probe,
                                       const TruncationOptions& options) {
  if (L_list.size() < 3)
    throw std::invalid_argument("truncation_convergence: need at least 3 window sizes");
  for (std::size_t i = 1; i < L_list.size(); ++i)
    if (!(L_list[i] > L_list[i - 1]))
      throw std::invalid_argument("truncation_convergence: L list must increase");

  TruncationTable table;
  table.L_values = L_list;
  for (double L : L_list) {
    KernelOptions kopt;
    kopt.gh_order = options.gh_order;
    KernelContext ctx(restrict(spec, L), kopt);
    std::vector<double> profile;
    profile.reserve(probe.x_grid.size());
    for (double x : probe.x_grid) profile.push_back(density(ctx, probe.t, x));
    table.density_profiles.push_back(std::move(profile));
    if (options.with_mgf) {
      const double w = options.mgf_half_window;
      auto chi = [w](double x) { return (std::abs(x) <= w) ? -1.0 : 0.0; };
      table.mgf_values.push_back(
          fredholm_mgf(ctx, {probe.t}, {chi}, options.mgf_grid).value);
    }
  }

  for (std::size_t k = 1; k < L_list.size(); ++k) {
    double sup = 0.0;
    for (std::size_t i = 0; i < probe.x_grid.size(); ++i)
      sup = std::max(sup,
                     std::abs(table.density_profiles[k][i] - table.density_profiles[k - 1][i]));
    table.density_sup_diffs.push_back(sup);
    if (options.with_mgf)
      table.mgf_diffs.push_back(std::abs(table.mgf_values[k] - table.mgf_values[k - 1]));
  }

  auto monotone_down = [](const std::vector<double>& d) {
    for (std::size_t i = 1; i < d.size(); ++i)
      if (d[i] > d[i - 1]) return false;
    return true;
  };
  table.monotone = monotone_down(table.density_sup_diffs) &&
                   (!options.with_mgf || monotone_down(table.mgf_diffs));
  bool last_ok = table.density_sup_diffs.back() < 1e-4;
  if (options.with_mgf) last_ok = last_ok && table.mgf_diffs.back() < 1e-4;
  table.pass = table.monotone && last_ok;
  return table;
}

std::vector<MCEstimate> martingale_flatness(const Configuration& xi, const TimeGrid& grid,
                                            const VerifyParams& params) {
  const std::size_t n = xi.size();
  const std::size_t dims = grid.size() - 1;  // t = 0 is exactly 1, skipped
  const auto moments = mc_accumulate(
      params.n_paths, dims, params.workers, [&](std::size_t item, std::vector<double>& out) {
        const auto paths =
            sample_cbm_system(xi, grid, params.seed, params.stream_base + 2 * n * item);
        for (std::size_t k = 1; k < grid.size(); ++k)
          out[k - 1] = det_martingale_along_path(xi, paths, grid[k]).real();
      });
  std::vector<MCEstimate> out;
  out.reserve(dims);
  for (std::size_t d = 0; d < dims; ++d) out.push_back(moments.estimate(d));
  return out;
}

std::string report_collection_json(const std::string& suite, std::uint64_t seed,
                                   std::uint64_t stream_base, std::size_t n_paths,
                                   const std::string& build_id,
                                   const std::vector<NamedReport>& reports) {
  nlohmann::json doc;
  doc["suite"] = suite;
  doc["seed"] = seed;
  doc["stream_base"] = stream_base;
  doc["n_paths"] = n_paths;
  doc["build_id"] = build_id;
  bool all_pass = true;
  nlohmann::json cases = nlohmann::json::array();
  for (const NamedReport& nr : reports) {
    nlohmann::json c;
    c["name"] = nr.name;
    c["lhs"] = {{"value", nr.report.lhs.value},
                {"stderr", nr.report.lhs.stderr_},
                {"exact", nr.report.lhs.exact}};
    c["rhs"] = {{"value", nr.report.rhs.value},
                {"stderr", nr.report.rhs.stderr_},
                {"exact", nr.report.rhs.exact}};
    c["z_score"] = nr.report.z_score;
    c["pass"] = nr.report.pass;
    c["note"] = nr.report.note;
    cases.push_back(c);
    all_pass = all_pass && nr.report.pass;
  }
  doc["cases"] = cases;
  doc["pass"] = all_pass;
  return doc.dump(2) + "\n";
}

}  // namespace dyson
