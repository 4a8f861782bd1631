#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kaqgeom/algebra.hpp"

namespace kaqgeom {

// All tensors here are components in an orthonormal left-invariant frame, so
// index placement carries no information and every metric factor is delta.

/// Ricci rotation coefficients Gamma_abc = <nabla_{X_b} X_c, X_a>
///   = (C_abc - C_bca - C_cba) / 2.
inline Tensor3 christoffel(const StructureTensor & c)
{
  const int n = c.dim();
  Tensor3 g(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) g(a, b, k) = 0.5 * (c(a, b, k) - c(b, k, a) - c(k, b, a));
  return g;
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// R_abcd = <R(X_c, X_d) X_b, X_a>
///        = Gamma^e_db Gamma_ace - Gamma^e_cb Gamma_ade - C^e_cd Gamma_aeb.
inline Tensor4 riemann(const Tensor3 & gamma, const StructureTensor & c)
{
  const int n = gamma.extent();
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;

  // first two terms share one product: P(ac, db) = sum_e Gamma[a][c][e] Gamma[e][d][b]
  Eigen::Map<const RowMajorMatrix> g_left(gamma.data(), n2, n);
  Eigen::Map<const RowMajorMatrix> g_right(gamma.data(), n, n2);
  const RowMajorMatrix p = g_left * g_right;

  // Q(ab, cd) = sum_e Gamma[a][e][b] C[e][c][d]
  RowMajorMatrix g_aeb(n2, n);
  for (int a = 0; a < n; ++a)
    for (int e = 0; e < n; ++e)
      for (int b = 0; b < n; ++b) g_aeb(a * n + b, e) = gamma(a, e, b);
  Eigen::Map<const RowMajorMatrix> c_right(c.entries.data(), n, n2);
  const RowMajorMatrix q = g_aeb * c_right;

  Tensor4 r(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int d = 0; d < n; ++d) r(a, b, k, d) = p(a * n + k, d * n + b) - p(a * n + d, k * n + b) - q(a * n + b, k * n + d);
  return r;
}

/// Ric_bd = sum_a R_abad.
inline Matrix ricci_from_riemann(const Tensor4 & r)
{
  const int n = r.extent();
  Matrix ric = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) ric(b, d) += r(a, b, a, d);
  return ric;
}

struct ScalarClosedForm
{
  double value = 0.0;
  double magnitude = 0.0;  ///< sum of absolute term sizes, the cancellation scale
};

/// R = -1/2 C_abc C_cba - 1/4 C_abc C_abc.
inline ScalarClosedForm scalar_closed_form_terms(const StructureTensor & c)
{
  const int n = c.dim();
  double cross = 0.0;
  double cross_abs = 0.0;
  double square = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) {
        const double x = c(a, b, k) * c(k, b, a);
        cross += x;
        cross_abs += std::abs(x);
        square += c(a, b, k) * c(a, b, k);
      }
  return {-0.5 * cross - 0.25 * square, 0.5 * cross_abs + 0.25 * square};
}

inline double scalar_closed_form(const StructureTensor & c) { return scalar_closed_form_terms(c).value; }

/// Structure-constant closed form for Ricci, companion to the scalar
/// formula; only used as a diagnostic against the Riemann trace.
inline Matrix ricci_closed_form(const StructureTensor & c)
{
  const int n = c.dim();
  Matrix ric = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int d = 0; d < n; ++d) s += c(d, a, k) * c(k, b, d) + c(k, a, d) * c(k, b, d) - 0.5 * c(a, k, d) * c(b, k, d);
      ric(a, b) = -0.5 * s;
    }
  return ric;
}

struct RicciScalar
{
  Matrix ricci;
  double scalar = 0.0;
};

inline constexpr double kScalarConsistencyTol = 1e-8;

inline void check_scalar_consistency(double traced, const ScalarClosedForm & closed)
{
  const double scale = std::max(1.0, closed.magnitude);
  if (std::abs(traced - closed.value) > kScalarConsistencyTol * scale)
    throw Error("Ricci trace (" + std::to_string(traced) + ") disagrees with the closed scalar formula (" +
                std::to_string(closed.value) + ")");
}

inline RicciScalar ricci_and_scalar(const StructureTensor & c)
{
  const Tensor4 r = riemann(christoffel(c), c);
  RicciScalar out{ricci_from_riemann(r), 0.0};
  out.scalar = out.ricci.trace();
  check_scalar_consistency(out.scalar, scalar_closed_form_terms(c));
  return out;
}

struct QuadraticInvariants
{
  double r0 = 0.0;  ///< R^2
  double r2 = 0.0;  ///< Ric . Ric
  double r4 = 0.0;  ///< Riem . Riem
};

inline QuadraticInvariants quadratic_invariants(const Tensor4 & riem, const Matrix & ricci, double scalar)
{
  return {scalar * scalar, ricci.squaredNorm(), riem.squared_norm()};
}

struct CurvatureBundle
{
  Tensor3 gamma;
  Tensor4 riemann;
  Matrix ricci;
  double scalar = 0.0;
  double inv0 = 0.0;
  double inv2 = 0.0;
  double inv4 = 0.0;
};

inline CurvatureBundle compute_curvature(const StructureTensor & c)
{
  CurvatureBundle b;
  b.gamma = christoffel(c);
  b.riemann = riemann(b.gamma, c);
  b.ricci = ricci_from_riemann(b.riemann);
  b.scalar = b.ricci.trace();
  check_scalar_consistency(b.scalar, scalar_closed_form_terms(c));
  const QuadraticInvariants q = quadratic_invariants(b.riemann, b.ricci, b.scalar);
  b.inv0 = q.r0;
  b.inv2 = q.r2;
  b.inv4 = q.r4;
  return b;
}

/// Rough Laplacian nabla_k nabla_k Ric on a homogeneous space: component
/// functions are constant, so only connection terms survive.
///   (nabla Ric)_kij = -Gamma_lki Ric_lj - Gamma_lkj Ric_il
/// and the second derivative corrects all three slots before tracing over k.
inline Matrix covariant_laplacian_ricci(const Tensor3 & gamma, const Matrix & ric)
{
  const int n = gamma.extent();
  Tensor3 d1(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s -= gamma(l, k, i) * ric(l, j) + gamma(l, k, j) * ric(i, l);
        d1(k, i, j) = s;
      }

  Vector trace_gamma = Vector::Zero(n);  // sum_k Gamma[l][k][k]
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) trace_gamma[l] += gamma(l, k, k);

  Matrix lap = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) {
        s -= trace_gamma[l] * d1(l, i, j);
        for (int k = 0; k < n; ++k) s -= gamma(l, k, i) * d1(k, l, j) + gamma(l, k, j) * d1(k, i, l);
      }
      lap(i, j) = s;
    }
  return lap;
}

// ---------------------------------------------------------------------------
// Structure-constant networks for the quadratic invariants

/// One term coef * C[x0] C[x1] C[x2] C[x3] where each x is three index letters.
/// Letters are summed; 'f' is identified with 'e' and 'l' with 'k' (the two
/// metric contractions in the network expressions).
struct NetworkTerm
{
  double coef;
  std::array<const char *, 4> factors;
};

namespace detail {
inline int letter_slot(char ch)
{
  switch (ch) {
    case 'a': return 0;
    case 'b': return 1;
    case 'c': return 2;
    case 'd': return 3;
    case 'e':
    case 'f': return 4;
    case 'k':
    case 'l': return 5;
  }
  throw Error(std::string("unexpected network index '") + ch + "'");
}
}  // namespace detail

inline double evaluate_network(const StructureTensor & c, const std::vector<NetworkTerm> & terms)
{
  const int n = c.dim();
  const std::size_t n2 = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  double total = 0.0;
  for (const auto & term : terms) {
    std::array<std::array<int, 3>, 4> slots{};
    for (int f = 0; f < 4; ++f)
      for (int p = 0; p < 3; ++p) slots[f][p] = detail::letter_slot(term.factors[f][p]);
    for (int f = 0; f < 2; ++f)
      for (int p = 0; p < 3; ++p)
        if (slots[f][p] == 5) throw Error("network term: the first two factors must not carry the k/l index");
    double sum = 0.0;
    std::array<int, 6> idx{};
    auto value = [&](int f) {
      return c.entries.data()[static_cast<std::size_t>(idx[slots[f][0]]) * n2 +
                              static_cast<std::size_t>(idx[slots[f][1]]) * static_cast<std::size_t>(n) +
                              static_cast<std::size_t>(idx[slots[f][2]])];
    };
    for (idx[0] = 0; idx[0] < n; ++idx[0])
      for (idx[1] = 0; idx[1] < n; ++idx[1])
        for (idx[2] = 0; idx[2] < n; ++idx[2])
          for (idx[3] = 0; idx[3] < n; ++idx[3])
            for (idx[4] = 0; idx[4] < n; ++idx[4]) {
              const double head = value(0) * value(1);
              if (head == 0.0) continue;
              for (idx[5] = 0; idx[5] < n; ++idx[5]) sum += head * value(2) * value(3);
            }
    total += term.coef * sum;
  }
  return total;
}

inline const std::vector<NetworkTerm> & r2_network_terms()
{
  static const std::vector<NetworkTerm> terms = {
      {4.0 / 16, {"dbf", "ace", "dbk", "acl"}},  {-4.0 / 16, {"dbf", "ace", "bdk", "cla"}},
      {-8.0 / 16, {"dbf", "ace", "dbk", "cla"}}, {1.0 / 16, {"fdb", "eca", "kdb", "lca"}},
      {-4.0 / 16, {"fdb", "ace", "kdb", "acl"}}, {4.0 / 16, {"fdb", "ace", "kdb", "cla"}},
  };
  return terms;
}

inline const std::vector<NetworkTerm> & r4_network_terms()
{
  static const std::vector<NetworkTerm> terms = {
      {4.0 / 8, {"dbf", "ace", "dbk", "acl"}},   {-4.0 / 8, {"dbf", "ace", "bdk", "cla"}},
      {-8.0 / 8, {"dbf", "ace", "dbk", "cla"}},  {3.0 / 8, {"fdb", "eca", "kdb", "lca"}},
      {8.0 / 8, {"fdb", "ace", "kdb", "acl"}},   {8.0 / 8, {"fdb", "ace", "kdb", "lca"}},
      {-1.0 / 8, {"fcd", "eba", "kdb", "lca"}},  {-2.0 / 8, {"fcd", "aeb", "dbk", "lca"}},
      {-4.0 / 8, {"fcd", "aeb", "bdk", "acl"}},  {-8.0 / 8, {"fcd", "aeb", "kdb", "lca"}},
      {8.0 / 8, {"fcd", "aeb", "kdb", "cla"}},   {-28.0 / 8, {"fcd", "aeb", "kdb", "acl"}},
  };
  return terms;
}

struct NetworkCrossCheck
{
  double r2_direct = 0.0;
  double r2_network = 0.0;
  double r4_direct = 0.0;
  double r4_network = 0.0;
  double r2_deviation = 0.0;  ///< |network - direct| / max(1, |direct|)
  double r4_deviation = 0.0;
};

/// Evaluates the four-structure-constant networks for Ric.Ric and
/// Riem.Riem and compares them with direct contraction (the reference).
inline NetworkCrossCheck cross_check_networks(const StructureTensor & c)
{
  NetworkCrossCheck out;
  const CurvatureBundle b = compute_curvature(c);
  out.r2_direct = b.inv2;
  out.r4_direct = b.inv4;
  out.r2_network = evaluate_network(c, r2_network_terms());
  out.r4_network = evaluate_network(c, r4_network_terms());
  out.r2_deviation = std::abs(out.r2_network - out.r2_direct) / std::max(1.0, std::abs(out.r2_direct));
  out.r4_deviation = std::abs(out.r4_network - out.r4_direct) / std::max(1.0, std::abs(out.r4_direct));
  return out;
}

}  // namespace kaqgeom
