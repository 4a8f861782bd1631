#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kaqgeom/eom.hpp"
#include "kaqgeom/kaq.hpp"
#include "kaqgeom/metric.hpp"
#include "kaqgeom/parallel.hpp"

namespace kaqgeom {

struct CriticalPointRecord
{
  Family family = Family::BP;
  double a = 0.0;
  double t = 0.0;
  double s = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  double tol = kCriticalTol;
  double gradient_norm = 0.0;
  bool critical = true;   ///< false for points stationary only within the two-parameter family
  bool trivial = false;   ///< the Killing-Cartan point t = s = 0
  bool jensen = false;
  std::optional<bool> ad_r0_invariant;
  std::optional<bool> kaq;
  std::string note;
};

/// BP, UKAQ and PKAQ are Jensen exactly on t = s away from the origin; AB never is.
inline bool on_jensen_locus(Family f, double t, double s)
{
  if (f == Family::AB) return false;
  const double scale = std::max(1.0, std::max(std::abs(t), std::abs(s)));
  return std::abs(t - s) <= 1e-9 * scale && std::abs(t) > 1e-9;
}

inline Evaluation evaluate_family(Family f, double t, double s, double gamma)
{
  return evaluate(build_family(f, t, s), Couplings::gauss_bonnet(gamma));
}

inline CriticalPointRecord make_record(Family f, double t, double s, double gamma, const Evaluation & e, double tol)
{
  CriticalPointRecord r;
  r.family = f;
  r.t = t;
  r.s = s;
  r.a = t != 0.0 ? s / t : 0.0;
  r.gamma = gamma;
  r.lambda = e.stress.lambda_hat;
  r.residual = e.stress.residual;
  r.tol = tol;
  r.critical = e.stress.residual < tol;
  r.trivial = std::abs(t) < 1e-9 && std::abs(s) < 1e-9;
  r.jensen = on_jensen_locus(f, t, s);
  return r;
}

// ---------------------------------------------------------------------------

struct DiagonalClasses
{
  std::vector<int> representatives;
  std::vector<std::vector<int>> classes;
};

/// Groups the diagonal of the Gauss-Bonnet stress tensor into classes that
/// agree at two generic probe points; one representative (the smallest
/// index) per class.
inline DiagonalClasses independent_diagonals(Family f, double gamma = 1.0)
{
  const Vector p1 = evaluate_family(f, 0.731, -0.413, gamma).stress.diagonal();
  const Vector p2 = evaluate_family(f, -0.529, 0.887, gamma).stress.diagonal();
  const auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)}); };
  DiagonalClasses out;
  for (int i = 0; i < p1.size(); ++i) {
    bool placed = false;
    for (std::size_t k = 0; k < out.classes.size() && !placed; ++k) {
      const int r = out.representatives[k];
      if (close(p1[i], p1[r]) && close(p2[i], p2[r])) {
        out.classes[k].push_back(i);
        placed = true;
      }
    }
    if (!placed) {
      out.representatives.push_back(i);
      out.classes.push_back({i});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SliceSample
{
  double t = 0.0;
  double s = 0.0;
  std::vector<double> diagonals;  ///< stress diagonal at the independent representatives
  double residual = 0.0;
};

struct SliceOptions
{
  double t_min = -3.0;
  double t_max = 3.0;
  int steps = 600;
  double tol = kCriticalTol;
  /// Largest |s/t - a| accepted when a near-miss is polished in the full
  /// (t, s) plane; 0 disables polishing.
  double slope_window = 0.05;
  int workers = 1;
};

struct SliceScan
{
  Family family = Family::BP;
  double a = 0.0;
  double gamma = 0.0;
  std::vector<int> representatives;
  std::vector<SliceSample> samples;
  CriticalPointRecord trivial;
  std::vector<CriticalPointRecord> candidates;  ///< every bracketed root of a single difference
  std::vector<CriticalPointRecord> records;     ///< verified non-trivial critical points, sorted by t
};

namespace detail {

inline Vector diagonal_differences(const StressTensor & st, const std::vector<int> & reps)
{
  Vector d(static_cast<Eigen::Index>(reps.size()) - 1);
  for (std::size_t j = 1; j < reps.size(); ++j) d[static_cast<Eigen::Index>(j - 1)] = st.entries(reps[j], reps[j]) - st.entries(reps[0], reps[0]);
  return d;
}

/// Levenberg-Marquardt on the differences of the independent diagonals over
/// the (t, s) plane.
inline std::optional<std::pair<double, double>> equalize_diagonals(Family f, const std::vector<int> & reps, double gamma, double t0,
                                                                   double s0)
{
  auto residual = [&](double t, double s) { return diagonal_differences(evaluate_family(f, t, s, gamma).stress, reps); };
  Eigen::Vector2d x(t0, s0);
  Vector fx = residual(x[0], x[1]);
  double mu = 1e-3;
  const double h = 1e-6;
  for (int iter = 0; iter < 100; ++iter) {
    if (fx.lpNorm<Eigen::Infinity>() < 1e-13) break;
    if ((x - Eigen::Vector2d(t0, s0)).norm() > 2.0) return std::nullopt;
    Matrix jac(fx.size(), 2);
    jac.col(0) = (residual(x[0] + h, x[1]) - residual(x[0] - h, x[1])) / (2.0 * h);
    jac.col(1) = (residual(x[0], x[1] + h) - residual(x[0], x[1] - h)) / (2.0 * h);
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d jtf = jac.transpose() * fx;
    bool improved = false;
    bool stalled = false;
    for (int attempt = 0; attempt < 20 && !improved; ++attempt) {
      Eigen::Matrix2d damped = jtj;
      damped.diagonal() *= 1.0 + mu;
      Eigen::Vector2d dx = damped.ldlt().solve(-jtf);
      if (!dx.allFinite()) break;
      if (dx.norm() > 0.25) dx *= 0.25 / dx.norm();
      const Eigen::Vector2d xn = x + dx;
      const Vector fn = residual(xn[0], xn[1]);
      if (fn.squaredNorm() < fx.squaredNorm()) {
        x = xn;
        fx = fn;
        mu = std::max(mu / 3.0, 1e-12);
        improved = true;
        stalled = dx.norm() < 1e-14;
      } else {
        mu *= 4.0;
      }
    }
    if (!improved || stalled) break;
  }
  if (fx.lpNorm<Eigen::Infinity>() > 1e-9) return std::nullopt;
  return std::make_pair(x[0], x[1]);
}

inline void insert_unique(std::vector<CriticalPointRecord> & out, CriticalPointRecord r)
{
  for (const auto & e : out)
    if (std::abs(e.t - r.t) < 1e-6 && std::abs(e.s - r.s) < 1e-6) return;
  out.push_back(std::move(r));
}

}  // namespace detail

/// Samples the independent stress diagonals along s = a t, brackets sign
/// changes of their differences, bisects to |dt| < 1e-10 and accepts a root
/// only if the full criticality residual passes. Roots of single differences
/// that narrowly miss are optionally polished in the (t, s) plane within the
/// slope window and accepted with the polished slope.
inline SliceScan scan_slice(Family f, double a, double gamma, const SliceOptions & opt = {})
{
  if (!(opt.t_min < opt.t_max)) throw std::invalid_argument("scan_slice: need t_min < t_max");
  if (opt.steps < 2) throw std::invalid_argument("scan_slice: need steps >= 2");

  SliceScan out;
  out.family = f;
  out.a = a;
  out.gamma = gamma;
  out.representatives = independent_diagonals(f, gamma).representatives;
  const auto & reps = out.representatives;

  const int n = opt.steps + 1;
  out.samples.resize(static_cast<std::size_t>(n));
  std::vector<Vector> diffs(static_cast<std::size_t>(n));
  parallel_for(n, opt.workers, [&](int i) {
    const double t = opt.t_min + (opt.t_max - opt.t_min) * i / opt.steps;
    const Evaluation e = evaluate_family(f, t, a * t, gamma);
    SliceSample & smp = out.samples[static_cast<std::size_t>(i)];
    smp.t = t;
    smp.s = a * t;
    for (int r : reps) smp.diagonals.push_back(e.stress.entries(r, r));
    smp.residual = e.stress.residual;
    diffs[static_cast<std::size_t>(i)] = detail::diagonal_differences(e.stress, reps);
  });

  out.trivial = make_record(f, 0.0, 0.0, gamma, evaluate_family(f, 0.0, 0.0, gamma), opt.tol);
  out.trivial.a = a;
  out.trivial.note = "trivial";
  if (reps.size() < 2) return out;

  struct Bracket
  {
    int diff;
    double lo, hi;
  };
  // differences that vanish identically on this slice (classes merging, as on
  // t = s) carry only rounding noise and are not bracketed
  double diag_scale = 1.0;
  for (const auto & smp : out.samples)
    for (double v : smp.diagonals) diag_scale = std::max(diag_scale, std::abs(v));
  std::vector<Bracket> brackets;
  for (int j = 0; j < static_cast<int>(reps.size()) - 1; ++j) {
    double peak = 0.0;
    for (const auto & d : diffs) peak = std::max(peak, std::abs(d[j]));
    if (peak <= 1e-10 * diag_scale) continue;
    for (int i = 0; i + 1 < n; ++i) {
      const double d0 = diffs[static_cast<std::size_t>(i)][j];
      const double d1 = diffs[static_cast<std::size_t>(i + 1)][j];
      if (d0 == 0.0 && i > 0) continue;  // counted by the previous interval
      if (d0 == 0.0 || d0 * d1 < 0.0) brackets.push_back({j, out.samples[static_cast<std::size_t>(i)].t, out.samples[static_cast<std::size_t>(i + 1)].t});
    }
  }

  std::vector<double> roots(brackets.size());
  parallel_for(static_cast<int>(brackets.size()), opt.workers, [&](int k) {
    const Bracket & b = brackets[static_cast<std::size_t>(k)];
    auto g = [&](double t) { return detail::diagonal_differences(evaluate_family(f, t, a * t, gamma).stress, reps)[b.diff]; };
    double lo = b.lo, hi = b.hi;
    double glo = g(lo);
    if (glo == 0.0) {
      roots[static_cast<std::size_t>(k)] = lo;
      return;
    }
    while (hi - lo >= 1e-10) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    roots[static_cast<std::size_t>(k)] = 0.5 * (lo + hi);
  });

  for (double t : roots) {
    if (std::abs(t) < 1e-6) continue;
    CriticalPointRecord c = make_record(f, t, a * t, gamma, evaluate_family(f, t, a * t, gamma), opt.tol);
    c.a = a;
    out.candidates.push_back(c);
    if (c.critical) {
      detail::insert_unique(out.records, c);
      continue;
    }
    if (opt.slope_window <= 0.0) continue;
    const auto polished = detail::equalize_diagonals(f, reps, gamma, t, a * t);
    if (!polished) continue;
    const auto [pt, ps] = *polished;
    if (std::abs(pt) < 1e-6 || pt < opt.t_min || pt > opt.t_max || std::abs(ps / pt - a) > opt.slope_window) continue;
    CriticalPointRecord r = make_record(f, pt, ps, gamma, evaluate_family(f, pt, ps, gamma), opt.tol);
    if (!r.critical) continue;
    char buf[96];
    std::snprintf(buf, sizeof buf, "slope polished from a=%.6g", a);
    r.note = buf;
    detail::insert_unique(out.records, r);
  }
  std::sort(out.records.begin(), out.records.end(), [](const auto & x, const auto & y) { return x.t < y.t; });
  std::sort(out.candidates.begin(), out.candidates.end(), [](const auto & x, const auto & y) { return x.t < y.t; });
  return out;
}

struct SlopeProbe
{
  double a = 0.0;
  double t = 0.0;         ///< best non-trivial candidate on this slice
  double residual = 0.0;  ///< its criticality residual (infinity if no bracket)
  int verified = 0;       ///< exact roots on the unpolished slice
};

/// Coarse search for slopes carrying non-trivial critical points: one
/// unpolished scan per slope, reporting how close the best candidate comes.
inline std::vector<SlopeProbe> sweep_slopes(Family f, double gamma, double a_min, double a_max, double a_step,
                                            SliceOptions opt = {})
{
  if (!(a_step > 0.0) || a_max < a_min) throw std::invalid_argument("sweep_slopes: invalid slope range");
  opt.slope_window = 0.0;
  const int count = static_cast<int>(std::floor((a_max - a_min) / a_step + 1e-9)) + 1;
  std::vector<SlopeProbe> out(static_cast<std::size_t>(count));
  const int inner = opt.workers;
  opt.workers = 1;
  parallel_for(count, inner, [&](int k) {
    const double a = a_min + a_step * k;
    const SliceScan scan = scan_slice(f, a, gamma, opt);
    SlopeProbe p;
    p.a = a;
    p.residual = std::numeric_limits<double>::infinity();
    p.verified = static_cast<int>(scan.records.size());
    for (const auto & c : scan.candidates)
      if (c.residual < p.residual) {
        p.residual = c.residual;
        p.t = c.t;
      }
    out[static_cast<std::size_t>(k)] = p;
  });
  return out;
}

// ---------------------------------------------------------------------------

struct ContourOptions
{
  double t_lo = -3.0;
  double t_hi = 3.0;
  double s_lo = -3.0;
  double s_hi = 3.0;
  int grid = 200;
  double tol = kCriticalTol;
  int workers = 1;
};

struct ContourGrid
{
  Family family = Family::BP;
  double gamma = 0.0;
  std::vector<double> t_axis;
  std::vector<double> s_axis;
  Matrix loss_values;  ///< (t index, s index)
  Matrix residual;
  Matrix lambda;
  std::vector<CriticalPointRecord> critical_markers;  ///< critical and parameterization-only, sorted by (t, s)
};

namespace detail {

/// d(log omega_ii)/d(t, s) for the diagonal two-parameter families.
inline Matrix family_log_jacobian(Family f)
{
  const Vector wt = build_family(f, 1.0, 0.0).omega.diagonal().array().log();
  const Vector ws = build_family(f, 0.0, 1.0).omega.diagonal().array().log();
  Matrix j(wt.size(), 2);
  j.col(0) = wt;
  j.col(1) = ws;
  return j;
}

inline Eigen::Vector2d family_gradient(const StressTensor & st, const Matrix & jac)
{
  return 2.0 * jac.transpose() * st.entries.diagonal();
}

inline std::vector<double> linspace(double lo, double hi, int n)
{
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace detail

/// Evaluates the Gauss-Bonnet loss on a (t, s) grid, locates stationary
/// candidates from sign changes of central-difference gradients, polishes
/// each with Newton steps on the exact parameter gradient and sorts them into
/// true critical metrics and points stationary only within the family.
inline ContourGrid contour_grid(Family f, double gamma, const ContourOptions & opt = {})
{
  if (opt.grid < 16) throw std::invalid_argument("contour_grid: grid must be >= 16");
  if (!(opt.t_lo < opt.t_hi) || !(opt.s_lo < opt.s_hi)) throw std::invalid_argument("contour_grid: empty range");

  ContourGrid out;
  out.family = f;
  out.gamma = gamma;
  const int g = opt.grid;
  out.t_axis = detail::linspace(opt.t_lo, opt.t_hi, g);
  out.s_axis = detail::linspace(opt.s_lo, opt.s_hi, g);
  out.loss_values.resize(g, g);
  out.residual.resize(g, g);
  out.lambda.resize(g, g);

  parallel_for(g * g, opt.workers, [&](int k) {
    const int i = k / g, j = k % g;
    const Evaluation e = evaluate_family(f, out.t_axis[static_cast<std::size_t>(i)], out.s_axis[static_cast<std::size_t>(j)], gamma);
    out.loss_values(i, j) = e.loss;
    out.residual(i, j) = e.stress.residual;
    out.lambda(i, j) = e.stress.lambda_hat;
  });

  const double ht = out.t_axis[1] - out.t_axis[0];
  const double hs = out.s_axis[1] - out.s_axis[0];
  Matrix gt = Matrix::Zero(g, g), gs = Matrix::Zero(g, g);
  for (int i = 1; i + 1 < g; ++i)
    for (int j = 1; j + 1 < g; ++j) {
      gt(i, j) = (out.loss_values(i + 1, j) - out.loss_values(i - 1, j)) / (2.0 * ht);
      gs(i, j) = (out.loss_values(i, j + 1) - out.loss_values(i, j - 1)) / (2.0 * hs);
    }

  auto changes = [](double a, double b, double c, double d) {
    const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
    return lo <= 0.0 && hi >= 0.0;
  };
  struct Cell
  {
    int i, j;
    double score;
  };
  std::vector<Cell> cells;
  for (int i = 1; i + 2 < g; ++i)
    for (int j = 1; j + 2 < g; ++j)
      if (changes(gt(i, j), gt(i + 1, j), gt(i, j + 1), gt(i + 1, j + 1)) &&
          changes(gs(i, j), gs(i + 1, j), gs(i, j + 1), gs(i + 1, j + 1)))
        cells.push_back({i, j, std::hypot(gt(i, j) + gt(i + 1, j + 1), gs(i, j) + gs(i + 1, j + 1))});

  // merge cells within two grid cells of each other, keeping the flattest
  std::vector<int> group(cells.size(), -1);
  int n_groups = 0;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    if (group[a] < 0) group[a] = n_groups++;
    for (std::size_t b = a + 1; b < cells.size(); ++b)
      if (std::abs(cells[a].i - cells[b].i) <= 2 && std::abs(cells[a].j - cells[b].j) <= 2) {
        if (group[b] < 0) {
          group[b] = group[a];
        } else if (group[b] != group[a]) {
          const int from = group[b], to = group[a];
          for (auto & x : group)
            if (x == from) x = to;
        }
      }
  }
  std::vector<Cell> seeds;
  for (int k = 0; k < n_groups; ++k) {
    const Cell * best = nullptr;
    for (std::size_t a = 0; a < cells.size(); ++a)
      if (group[a] == k && (!best || cells[a].score < best->score)) best = &cells[a];
    if (best) seeds.push_back(*best);
  }

  const Matrix jac = detail::family_log_jacobian(f);
  const double reach = 3.0 * std::max(ht, hs);
  std::vector<std::optional<CriticalPointRecord>> found(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), opt.workers, [&](int k) {
    const Cell & c = seeds[static_cast<std::size_t>(k)];
    const Eigen::Vector2d start(0.5 * (out.t_axis[static_cast<std::size_t>(c.i)] + out.t_axis[static_cast<std::size_t>(c.i + 1)]),
                                0.5 * (out.s_axis[static_cast<std::size_t>(c.j)] + out.s_axis[static_cast<std::size_t>(c.j + 1)]));
    auto grad = [&](const Eigen::Vector2d & x) { return detail::family_gradient(evaluate_family(f, x[0], x[1], gamma).stress, jac); };
    Eigen::Vector2d x = start;
    Eigen::Vector2d gx = grad(x);
    const double h = 1e-5;
    for (int iter = 0; iter < 40 && gx.norm() > 1e-12; ++iter) {
      Eigen::Matrix2d hess;
      hess.col(0) = (grad(x + Eigen::Vector2d(h, 0)) - grad(x - Eigen::Vector2d(h, 0))) / (2.0 * h);
      hess.col(1) = (grad(x + Eigen::Vector2d(0, h)) - grad(x - Eigen::Vector2d(0, h))) / (2.0 * h);
      hess = 0.5 * (hess + hess.transpose()).eval();
      Eigen::Vector2d step = hess.fullPivLu().solve(-gx);
      if (!step.allFinite()) break;
      if (step.norm() > ht) step *= ht / step.norm();
      x += step;
      gx = grad(x);
      if (step.norm() < 1e-14) break;
    }
    const Evaluation e = evaluate_family(f, x[0], x[1], gamma);
    const double gnorm = gx.norm();
    if ((x - start).norm() > reach || gnorm > opt.tol * std::max(1.0, e.stress.entries.cwiseAbs().maxCoeff())) return;
    CriticalPointRecord r = make_record(f, x[0], x[1], gamma, e, opt.tol);
    r.gradient_norm = gnorm;
    if (r.trivial) {
      r.t = 0.0;
      r.s = 0.0;
      r.note = "trivial";
    }
    if (!r.critical) r.note = "stationary in the family parameters only";
    found[static_cast<std::size_t>(k)] = r;
  });

  for (auto & r : found)
    if (r) detail::insert_unique(out.critical_markers, *r);
  std::sort(out.critical_markers.begin(), out.critical_markers.end(),
            [](const auto & x, const auto & y) { return std::make_pair(x.t, x.s) < std::make_pair(y.t, y.s); });
  return out;
}

/// Adds ad(R0)-invariance and KAQ flags to a record.
inline CriticalPointRecord classify(CriticalPointRecord r)
{
  const MetricTransform m = build_family(r.family, r.t, r.s);
  r.jensen = on_jensen_locus(r.family, r.t, r.s);
  r.ad_r0_invariant = check_bi_invariance(m.frame->constants, m.metric(), r0_generators(r.family)) < 1e-10;
  r.kaq = kaq_verify(m).is_kaq;
  return r;
}

}  // namespace kaqgeom
