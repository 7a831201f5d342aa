#pragma once

// Maximization of the creatable-region metrics over (t, b, lambda0).
//
// Coarse grid scan followed by coordinatewise golden-section refinement.  The
// objective has kinks (positivity boundary, real/complex boundary of the
// first-order spectrum), so no derivatives are used.  The uniform-scaling case
// lives on the curve lambda1(t, b) = lambda2(t) and is parameterized by b.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "mqscale/errors.hpp"
#include "mqscale/state_space.hpp"

namespace mqscale {

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  int points() const {
    if (hi <= lo) return 1;
    return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  }
  double at(int i) const { return std::min(lo + i * step, hi); }
  double clamp(double x) const { return std::clamp(x, lo, hi); }
};

/// First maximum of |lambda2(t)| on [0, t_max]: the first local maximum that
/// reaches half of the global maximum, polished by golden section.
struct Lambda2Peak {
  double t = 0.0;
  double value = 0.0;  // |lambda2|
};

inline Lambda2Peak first_lambda2_peak(const ModeBasis& basis, double t_max, double step = 0.01) {
  basis.spec().validate_two_qubit();
  if (!(t_max > 0.0)) throw ConfigError("empty time window");
  auto mod = [&](double t) { return std::abs(alpha_table(basis, t, 0.0).second); };
  const Window w{0.0, t_max, step};
  std::vector<double> v(w.points());
  for (int i = 0; i < w.points(); ++i) v[i] = mod(w.at(i));
  const double global = *std::max_element(v.begin(), v.end());
  int k = static_cast<int>(v.size()) - 1;
  for (int i = 1; i + 1 < static_cast<int>(v.size()); ++i) {
    if (v[i] >= v[i - 1] && v[i] >= v[i + 1] && v[i] >= 0.5 * global) {
      k = i;
      break;
    }
  }
  double a = w.at(std::max(k - 1, 0)), b = w.at(std::min(k + 1, w.points() - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = mod(c), fd = mod(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a); fc = mod(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a); fd = mod(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, mod(t)};
}

enum class Lambda0Mode { free, fixed_one };

struct OptProblem {
  Case objective_case = Case::both;
  Lambda0Mode lambda0_mode = Lambda0Mode::free;
  Window t;
  Window b{0.0, 10.0, 0.25};
  Window lambda0{0.5, 2.0, 0.02};
  double refine_tol = 1e-4;
  int max_passes = 200;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Windows: t in [0.5N, 1.5N] step 0.05, b in [0, 10] step 0.25,
  /// lambda0 in [0.5, 2] step 0.02 (or pinned to 1).
  static OptProblem defaults(Case c, Lambda0Mode mode, const ChainSpec& spec) {
    OptProblem p;
    p.objective_case = c;
    p.lambda0_mode = mode;
    p.t = {0.5 * spec.n_sites, 1.5 * spec.n_sites, 0.05};
    if (mode == Lambda0Mode::fixed_one) p.lambda0 = {1.0, 1.0, 1.0};
    return p;
  }

  /// As defaults(), with the time window ending shortly after the first maximum
  /// of |lambda2|, i.e. restricted to the first arrival of the excitation
  /// packet at the receiver.  For long chains the wider default window also
  /// contains the packet's trailing oscillations, whose optima can be larger.
  static OptProblem first_arrival(Case c, Lambda0Mode mode, const ModeBasis& basis) {
    OptProblem p = defaults(c, mode, basis.spec());
    const double peak = first_lambda2_peak(basis, p.t.hi).t;
    p.t.hi = std::min(p.t.hi, peak + 2.0 * p.t.step);
    return p;
  }

  void validate() const {
    for (const Window* w : {&t, &b, &lambda0}) {
      if (w->hi < w->lo || !(w->step > 0.0)) throw ConfigError("empty or malformed search window");
    }
    if (b.lo < 0.0) throw ConfigError("inverse-temperature window must be non-negative");
    if (lambda0_mode == Lambda0Mode::fixed_one && (lambda0.lo != 1.0 || lambda0.hi != 1.0)) {
      throw ConfigError("fixed lambda0 mode requires the lambda0 window [1, 1]");
    }
  }
};

struct OptResult {
  bool feasible = false;
  Case objective_case = Case::both;
  Lambda0Mode lambda0_mode = Lambda0Mode::free;
  double objective = 0.0;
  RegionReport best;  // t, b, lambda0, scale factors, semi-axes, X0, X1
  long evaluations = 0;
};

struct LandscapeSample {
  double t, b, lambda0, value;
};

namespace detail {

/// Golden-section maximization of g on [a, b]; returns (argmax, max).
inline std::pair<double, double> golden_max(const std::function<double(double)>& g, double a,
                                            double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d; d = c; gd = gc;
      c = b - inv_phi * (b - a); gc = g(c);
    } else {
      a = c; c = d; gc = gd;
      d = a + inv_phi * (b - a); gd = g(d);
    }
  }
  return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

/// Deterministic parallel map over [0, count): worker w takes indices w, w+W, ...
inline void parallel_for(int count, unsigned threads, const std::function<void(int)>& body) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = static_cast<int>(w); i < count; i += static_cast<int>(workers)) body(i);
    });
  }
}

inline bool better(const RegionReport& cand, double value, const std::optional<RegionReport>& best,
                   double best_value) {
  if (!cand.feasible) return false;
  if (!best) return true;
  return value > best_value;
}

}  // namespace detail

/// lambda1(t, b) - lambda2(t) with lambda1 the selected real eigenvalue; empty
/// where the first-order spectrum has no real eigenvalue.
inline std::optional<double> uniform_gap(const ModeBasis& basis, double t, double b) {
  const AlphaTable table = alpha_table(basis, t, b);
  const auto sol = solve_first_order(table.first);
  if (!sol) return std::nullopt;
  return sol->lambda1() - table.second.real();
}

namespace detail {

/// Bisection of the gap on a bracket with a sign change.  Rejects jumps of the
/// selected eigenvalue (the gap must actually vanish at the root).
inline std::optional<double> bisect_gap(const ModeBasis& basis, double b, double lo, double hi,
                                        double g_lo) {
  for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto gm = uniform_gap(basis, mid, b);
    if (!gm) return std::nullopt;
    if ((*gm < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = *gm;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  const auto g = uniform_gap(basis, root, b);
  if (!g || std::abs(*g) > 1e-8) return std::nullopt;
  return root;
}

/// Last point of [real, other] where the gap is still defined (real lambda1).
inline std::pair<double, double> real_edge(const ModeBasis& basis, double b, double real, double other) {
  double g = *uniform_gap(basis, real, b);
  for (int it = 0; it < 50 && std::abs(other - real) > 1e-12; ++it) {
    const double mid = 0.5 * (real + other);
    if (const auto gm = uniform_gap(basis, mid, b)) {
      real = mid;
      g = *gm;
    } else {
      other = mid;
    }
  }
  return {real, g};
}

inline std::vector<double> gap_roots(const ModeBasis& basis, double b, double t_lo, double t_hi,
                                     double step) {
  std::vector<double> roots;
  const Window w{t_lo, t_hi, step};
  double t_prev = w.at(0);
  auto g_prev = uniform_gap(basis, t_prev, b);
  for (int i = 1; i < w.points(); ++i) {
    const double t = w.at(i);
    const auto g = uniform_gap(basis, t, b);
    if (g && g_prev && ((*g < 0.0) != (*g_prev < 0.0))) {
      if (auto r = bisect_gap(basis, b, t_prev, t, *g_prev)) roots.push_back(*r);
    } else if (g_prev && !g) {
      // Root just before the real branch ends.
      const auto [edge, g_edge] = real_edge(basis, b, t_prev, t);
      if ((g_edge < 0.0) != (*g_prev < 0.0)) {
        if (auto r = bisect_gap(basis, b, t_prev, edge, *g_prev)) roots.push_back(*r);
      }
    } else if (!g_prev && g) {
      // Root just after the real branch starts.
      const auto [edge, g_edge] = real_edge(basis, b, t, t_prev);
      if ((g_edge < 0.0) != (*g < 0.0)) {
        if (auto r = bisect_gap(basis, b, edge, t, g_edge)) roots.push_back(*r);
      }
    }
    t_prev = t;
    g_prev = g;
  }
  return roots;
}

}  // namespace detail

struct CurvePoint {
  double b, t, lambda;
};

/// Samples of the uniform-scaling curve lambda1 = lambda2 in the (b, t) plane:
/// every root in t of the gap, for each b on the grid.  Empty when the chain
/// admits no real intersection in the window.
inline std::vector<CurvePoint> uniform_curve(const ModeBasis& basis, const Window& b_window,
                                             const Window& t_window) {
  basis.spec().validate_two_qubit();
  std::vector<CurvePoint> out;
  for (int i = 0; i < b_window.points(); ++i) {
    const double b = b_window.at(i);
    for (double t : detail::gap_roots(basis, b, t_window.lo, t_window.hi, t_window.step)) {
      out.push_back({b, t, alpha_table(basis, t, b).second.real()});
    }
  }
  return out;
}

namespace detail {

inline OptResult optimize_free_point(const OptProblem& p, const ModeBasis& basis,
                                     std::vector<LandscapeSample>* landscape) {
  const Case c = p.objective_case;
  const int nt = p.t.points(), nb = p.b.points(), nl = p.lambda0.points();

  struct RowBest {
    std::optional<RegionReport> report;
    double value = 0.0;
    std::vector<LandscapeSample> samples;
  };
  std::vector<RowBest> rows(nt);
  parallel_for(nt, p.threads, [&](int i) {
    RowBest& row = rows[i];
    const double t = p.t.at(i);
    for (int j = 0; j < nb; ++j) {
      const ScalePoint sp(basis, t, p.b.at(j));
      for (int k = 0; k < nl; ++k) {
        const RegionReport r = sp.region(p.lambda0.at(k), c);
        const double v = r.objective(c);
        if (landscape) row.samples.push_back({t, sp.b(), r.lambda0, v});
        if (better(r, v, row.report, row.value)) {
          row.report = r;
          row.value = v;
        }
      }
    }
  });

  OptResult res;
  res.objective_case = c;
  res.lambda0_mode = p.lambda0_mode;
  res.evaluations = static_cast<long>(nt) * nb * nl;
  std::optional<RegionReport> best;
  double best_value = 0.0;
  for (auto& row : rows) {
    if (landscape) landscape->insert(landscape->end(), row.samples.begin(), row.samples.end());
    if (row.report && better(*row.report, row.value, best, best_value)) {
      best = row.report;
      best_value = row.value;
    }
  }
  if (!best) return res;

  // Coordinatewise golden-section refinement around the grid optimum.
  std::array<double, 3> x = {best->t, best->b, best->lambda0};
  const std::array<const Window*, 3> windows = {&p.t, &p.b, &p.lambda0};
  const int dims = p.lambda0_mode == Lambda0Mode::free ? 3 : 2;
  auto eval = [&](const std::array<double, 3>& y) {
    ++res.evaluations;
    return region_metrics(basis, y[0], y[1], y[2], c);
  };
  RegionReport current = *best;
  double fx = best_value;
  for (int pass = 0; pass < p.max_passes; ++pass) {
    double moved = 0.0;
    for (int d = 0; d < dims; ++d) {
      const Window& w = *windows[d];
      const double lo = w.clamp(x[d] - w.step), hi = w.clamp(x[d] + w.step);
      if (hi <= lo) continue;
      auto g = [&](double s) {
        auto y = x;
        y[d] = s;
        return eval(y).objective(c);
      };
      auto [s, gs] = golden_max(g, lo, hi, 0.1 * p.refine_tol);
      // The window edge is often the optimum (b at its cap); golden section
      // never samples it exactly.
      for (double edge : {lo, hi}) {
        if (edge == w.lo || edge == w.hi) {
          const double ge = g(edge);
          if (ge >= gs) { s = edge; gs = ge; }
        }
      }
      if (gs > fx) {
        moved = std::max(moved, std::abs(s - x[d]));
        x[d] = s;
        fx = gs;
      }
    }
    if (moved < p.refine_tol) break;
  }
  current = eval(x);
  res.feasible = current.feasible;
  res.best = current;
  res.objective = current.objective(c);
  return res;
}

inline OptResult optimize_uniform(const OptProblem& p, const ModeBasis& basis,
                                  std::vector<LandscapeSample>* landscape) {
  const Case c = Case::uniform;
  const int nb = p.b.points(), nl = p.lambda0.points();
  struct RowBest {
    std::optional<RegionReport> report;
    double value = 0.0;
    long evaluations = 0;
    std::vector<LandscapeSample> samples;
  };
  std::vector<RowBest> rows(nb);
  parallel_for(nb, p.threads, [&](int j) {
    RowBest& row = rows[j];
    const double b = p.b.at(j);
    for (double t : gap_roots(basis, b, p.t.lo, p.t.hi, p.t.step)) {
      const ScalePoint sp(basis, t, b);
      for (int k = 0; k < nl; ++k) {
        ++row.evaluations;
        const RegionReport r = sp.region(p.lambda0.at(k), c);
        const double v = r.objective(c);
        if (landscape) row.samples.push_back({t, b, r.lambda0, v});
        if (better(r, v, row.report, row.value)) {
          row.report = r;
          row.value = v;
        }
      }
    }
  });

  OptResult res;
  res.objective_case = c;
  res.lambda0_mode = p.lambda0_mode;
  std::optional<RegionReport> best;
  double best_value = 0.0;
  for (auto& row : rows) {
    res.evaluations += row.evaluations;
    if (landscape) landscape->insert(landscape->end(), row.samples.begin(), row.samples.end());
    if (row.report && better(*row.report, row.value, best, best_value)) {
      best = row.report;
      best_value = row.value;
    }
  }
  if (!best) return res;

  // Refine along the curve: b moves the root t(b), tracked from the last t.
  double b = best->b, t = best->t, lambda0 = best->lambda0;
  auto track = [&](double bb, double t_guess) -> std::optional<double> {
    const double span = 4.0 * p.t.step;
    const auto roots = gap_roots(basis, bb, std::max(p.t.lo, t_guess - span),
                                 std::min(p.t.hi, t_guess + span), 0.25 * p.t.step);
    if (roots.empty()) return std::nullopt;
    return *std::min_element(roots.begin(), roots.end(), [&](double u, double v) {
      return std::abs(u - t_guess) < std::abs(v - t_guess);
    });
  };
  auto eval = [&](double bb, double tt, double l0) {
    ++res.evaluations;
    return region_metrics(basis, tt, bb, l0, c);
  };
  double fx = best_value;
  for (int pass = 0; pass < p.max_passes; ++pass) {
    double moved = 0.0;
    {
      auto g = [&](double bb) {
        const auto tt = track(bb, t);
        return tt ? eval(bb, *tt, lambda0).objective(c) : 0.0;
      };
      const auto [s, gs] = golden_max(g, p.b.clamp(b - p.b.step), p.b.clamp(b + p.b.step),
                                      0.1 * p.refine_tol);
      if (gs > fx) {
        if (const auto tt = track(s, t)) {
          moved = std::max({moved, std::abs(s - b), std::abs(*tt - t)});
          b = s;
          t = *tt;
          fx = gs;
        }
      }
    }
    if (p.lambda0_mode == Lambda0Mode::free) {
      auto g = [&](double l0) { return eval(b, t, l0).objective(c); };
      const auto [s, gs] = golden_max(g, p.lambda0.clamp(lambda0 - p.lambda0.step),
                                      p.lambda0.clamp(lambda0 + p.lambda0.step),
                                      0.1 * p.refine_tol);
      if (gs > fx) {
        moved = std::max(moved, std::abs(s - lambda0));
        lambda0 = s;
        fx = gs;
      }
    }
    if (moved < p.refine_tol) break;
  }
  res.best = eval(b, t, lambda0);
  res.feasible = res.best.feasible;
  res.objective = res.best.objective(c);
  return res;
}

}  // namespace detail

/// Maximizes S2 (case 1), S1 (case 2) or S12 (cases 3, 4).  Ties on the grid
/// go to the smallest t, then the smallest b.  An empty feasible set is
/// reported through OptResult::feasible.
inline OptResult optimize(const OptProblem& problem, const ModeBasis& basis,
                          std::vector<LandscapeSample>* landscape = nullptr) {
  basis.spec().validate_two_qubit();
  problem.validate();
  if (problem.objective_case == Case::uniform) {
    return detail::optimize_uniform(problem, basis, landscape);
  }
  return detail::optimize_free_point(problem, basis, landscape);
}

/// optimize() with lambda0 pinned to 1 (perfect transfer of the zero-order block).
inline OptResult optimize_lambda0_one(OptProblem problem, const ModeBasis& basis,
                                      std::vector<LandscapeSample>* landscape = nullptr) {
  problem.lambda0_mode = Lambda0Mode::fixed_one;
  problem.lambda0 = {1.0, 1.0, 1.0};
  return optimize(problem, basis, landscape);
}

}  // namespace mqscale
