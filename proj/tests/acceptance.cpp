// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "kaqgeom/kaqgeom.hpp"

using namespace kaqgeom;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char * f, double a, double b = 0.0, double c = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Matrix random_unimodular(std::mt19937_64 & rng, double scale)
{
  std::normal_distribution<double> normal(0.0, scale);
  Matrix s(15, 15);
  for (int i = 0; i < 15; ++i)
    for (int j = i; j < 15; ++j) s(i, j) = s(j, i) = normal(rng);
  s.diagonal().array() -= s.trace() / 15.0;
  return symmetric_exp(s);
}

double bp_closed(int which, double t, double a, double g)
{
  auto e = [](double x) { return std::exp(x); };
  if (which == 0)
    return e((-7 * a - 10) * t / 9) *
           (-3 * g * e(a * t / 3) + 18.75 * g * e(4 * (a + 1) * t / 9) + 9 * g * e(2 * (a + 2) * t / 3) -
            1.125 * g * e((2 * a + 11) * t / 9) + 1.125 * g * e((8 * a + 5) * t / 9) + 0.375 * g * e((10 * a + 13) * t / 9) +
            0.75 * e(5 * (a + 1) * t / 9) + 0.25 * e((7 * a + 13) * t / 9) - 1.125 * g * e(t / 3));
  if (which == 1)
    return e((-10 * a - 7) * t / 9) *
           (-1.125 * g * e(a * t / 3) + 18.75 * g * e(4 * (a + 1) * t / 9) + 1.125 * g * e((5 * a + 8) * t / 9) -
            1.125 * g * e((11 * a + 2) * t / 9) + 0.375 * g * e((13 * a + 10) * t / 9) + 9 * g * e(2 * (2 * a * t + t) / 3) +
            0.75 * e(5 * (a + 1) * t / 9) + 0.25 * e((13 * a + 7) * t / 9) - 3 * g * e(t / 3));
  return e(-10 * (a + 1) * t / 9) *
         (2 * g * e(2 * a * t / 3) + 1.5 * g * e((a + 1) * t / 3) + 51.5 * g * e(8 * (a + 1) * t / 9) +
          3 * g * e((a + 4.0 / 3.0) * t) - 18.75 * g * e((4 * a + 7) * t / 9) - 0.75 * g * e((5 * a + 11) * t / 9) -
          18.75 * g * e((7 * a + 4) * t / 9) - 0.75 * g * e((11 * a + 5) * t / 9) + 3 * g * e(4 * a * t / 3 + t) -
          0.5 * e((5 * a + 8) * t / 9) - 0.5 * e((8 * a + 5) * t / 9) + 2 * e(a * t + t) + 2 * g * e(2 * t / 3));
}

Outcome a1()
{
  const double r = compute_curvature(gell_mann_frame(4)->constants).scalar;
  return {std::abs(r - 15.0) < 1e-9, fmt("R = %.15g", r)};
}

Outcome a2()
{
  const StructureTensor & c = gell_mann_frame(4)->constants;
  double worst = 0.0;
  for (int a = 0; a < 15; ++a)
    for (int b = 0; b < 15; ++b) worst = std::max(worst, std::abs((c.ad(a) * c.ad(b)).trace() + (a == b ? 4.0 : 0.0)));
  return {worst < 1e-12, fmt("max |tr(K_a K_b) + 4 delta_ab| = %.3e", worst)};
}

Outcome a3()
{
  const StressTensor so4 = gb_stress(transform_structure_constants(so4_jensen()), 0.0);
  const StressTensor sp2 = gb_stress(transform_structure_constants(sp2_jensen()), 0.0);
  const bool ok = is_critical(so4).critical && is_critical(sp2).critical && so4.residual < 1e-8 && sp2.residual < 1e-8;
  return {ok, fmt("so(4) residual %.3e, sp(2) residual %.3e", so4.residual, sp2.residual)};
}

Outcome a4()
{
  std::mt19937_64 rng(2024);
  const auto frame = gell_mann_frame(4);
  double worst = 0.0, min_laplacian = 1e300;
  for (int k = 0; k < 50; ++k) {
    const StructureTensor c = transform_structure_constants(random_unimodular(rng, 0.1), frame->constants);
    const CurvatureBundle b = compute_curvature(c);
    min_laplacian = std::min(min_laplacian, covariant_laplacian_ricci(b.gamma, b.ricci).cwiseAbs().maxCoeff());
    for (double g : {-1.0, 0.5, 1.0})
      worst = std::max(worst, (stress_tensor(b, {g, -4.0 * g, g}).entries - gb_stress(b, g).entries).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-9 && min_laplacian > 1e-6, fmt("max deviation %.3e over 150 cases (min |Laplacian Ric| %.3e)", worst, min_laplacian)};
}

Outcome a5()
{
  double worst = 0.0, origin = 0.0;
  const int slot[3] = {3, 0, 6};
  for (double g : {0.5, 1.0}) {
    for (double t : {-1.5, -0.75, 0.4, 1.0, 1.6})
      for (double a : {-2.0, -0.8, 0.3, 1.0, 2.2}) {
        const Vector d = gb_stress(transform_structure_constants(build_family(Family::BP, t, a * t)), g).diagonal();
        for (int w = 0; w < 3; ++w) {
          const double ref = bp_closed(w, t, a, g);
          worst = std::max(worst, std::abs(d[slot[w]] - ref) / std::abs(ref));
        }
      }
    const Vector d0 = gb_stress(transform_structure_constants(build_family(Family::BP, 0.0, 0.0)), g).diagonal();
    origin = std::max(origin, (d0.array() - (1.0 + 24.0 * g)).abs().maxCoeff());
  }
  return {worst < 1e-6 && origin < 1e-9, fmt("max relative deviation %.3e, origin deviation %.3e", worst, origin)};
}

Outcome a6()
{
  const SliceScan bp = scan_slice(Family::BP, -2.06, 1.0);
  const SliceScan ab = scan_slice(Family::AB, 1.0, 1.0);
  const SliceScan none = scan_slice(Family::BP, 0.1, 1.0);
  auto has_root = [](const SliceScan & s, double t) {
    for (const auto & r : s.records)
      if (r.critical && std::abs(r.t - t) <= 0.05) return true;
    return false;
  };
  const bool ok = has_root(bp, -1.67) && has_root(ab, 1.45) && none.records.empty();
  const double tb = bp.records.empty() ? NAN : bp.records[0].t;
  const double ta = ab.records.empty() ? NAN : ab.records[0].t;
  return {ok, fmt("BP t = %.6f, AB t = %.6f, BP(a=0.1) non-trivial roots = %.0f", tb, ta, static_cast<double>(none.records.size()))};
}

Outcome a7()
{
  double worst_row = 0.0;
  for (const auto & r : dictionary()) worst_row = std::max(worst_row, r.residual);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  bool all = true;
  double worst_comm = 0.0;
  for (Family f : {Family::BP, Family::AB, Family::UKAQ, Family::PKAQ})
    for (int k = 0; k < 10; ++k) {
      const KAQCertificate cert = kaq_verify(build_family(f, u(rng), u(rng)));
      all = all && cert.is_kaq;
      worst_comm = std::max(worst_comm, cert.max_commutator_residual);
    }
  return {worst_row < 1e-12 && all && worst_comm < 1e-10,
          fmt("row residual %.3e, 40/40 KAQ = %.0f, commutator residual %.3e", worst_row, all ? 1.0 : 0.0, worst_comm)};
}

Outcome a8()
{
  ContourOptions opt;
  opt.grid = 200;
  opt.t_lo = opt.s_lo = -5.0;
  opt.t_hi = opt.s_hi = 5.0;
  const ContourGrid g = contour_grid(Family::PKAQ, 1.0, opt);
  int stationary_only = 0, off_line = 0, critical = 0;
  for (const auto & m : g.critical_markers) {
    if (!m.critical)
      ++stationary_only;
    else {
      ++critical;
      if (std::abs(m.t - m.s) > 1e-6 * std::max(1.0, std::abs(m.t))) ++off_line;
    }
  }
  return {stationary_only >= 1 && off_line == 0,
          fmt("parameterization-only %.0f, true markers %.0f (off t=s: %.0f)", stationary_only, critical, off_line)};
}

Outcome a9()
{
  ContourOptions opt;
  opt.grid = 100;
  const ContourGrid bp = contour_grid(Family::BP, 1.0, opt);
  const ContourGrid uk = contour_grid(Family::UKAQ, 1.0, opt);
  double worst = 0.0;
  for (int i = 0; i < opt.grid; ++i) worst = std::max(worst, std::abs(bp.loss_values(i, i) - uk.loss_values(i, i)));
  return {worst < 1e-9, fmt("max |L_BP - L_UKAQ| on t=s = %.3e", worst)};
}

Outcome a10()
{
  double worst = 0.0;
  bool identical = true;
  for (Family f : {Family::BP, Family::AB, Family::UKAQ, Family::PKAQ}) {
    const MetricTransform m = build_family(f, 1.0, -1.0);
    const EnsembleSample s = sample(m, 100000, 12345);
    worst = std::max(worst, (sample_covariance(s) - 0.5 * m.omega * m.omega).cwiseAbs().maxCoeff());
    identical = identical && sample(m, 1000, 12345).coefficients == s.coefficients.topRows(1000) &&
                sample(m, 1000, 12345, 2).coefficients == s.coefficients.topRows(1000);
  }
  return {worst < 5e-2 && identical, fmt("max covariance error %.3e, seeded reruns identical = %.0f", worst, identical ? 1.0 : 0.0)};
}

}  // namespace

int main()
{
  struct Criterion
  {
    const char * id;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {{"A1", 1, a1},  {"A2", 1, a2},  {"A3", 5, a3},   {"A4", 120, a4}, {"A5", 60, a5},
                                {"A6", 120, a6}, {"A7", 30, a7}, {"A8", 300, a8}, {"A9", 60, a9},  {"A10", 60, a10}};
  int failures = 0;
  for (const auto & c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_s;
    failures += !pass;
    std::printf("%-4s %s  %s  [%.2f s of %.0f s]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
