#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "kaqgeom/curvature.hpp"
#include "kaqgeom/metric.hpp"

namespace kaqgeom {

struct Couplings
{
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static Couplings gauss_bonnet(double gamma) { return {gamma, -4.0 * gamma, gamma}; }
};

/// Symmetric tensor whose trace-free part vanishes exactly at critical points
/// of the loss; lambda_hat is the mean diagonal.
struct StressTensor
{
  Matrix entries;
  Couplings couplings;
  double lambda_hat = 0.0;
  double residual = 0.0;

  Vector diagonal() const { return entries.diagonal(); }
};

inline constexpr double kCriticalTol = 1e-8;

/// max|T - lambda_hat I| / max(1, max|T|).
inline StressTensor finish_stress(Matrix t, Couplings k)
{
  const int n = static_cast<int>(t.rows());
  StressTensor out{std::move(t), k, 0.0, 0.0};
  out.lambda_hat = out.entries.trace() / n;
  const double dev = (out.entries - out.lambda_hat * Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  out.residual = dev / std::max(1.0, out.entries.cwiseAbs().maxCoeff());
  return out;
}

/// R_ikjl Ric_kl.
inline Matrix riemann_ricci(const Tensor4 & r, const Matrix & ric)
{
  const int n = r.extent();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += r(i, k, j, l) * ric(k, l);
        out(i, j) += s;
      }
  return out;
}

/// R_iklm R_jklm.
inline Matrix riemann_square(const Tensor4 & r)
{
  const auto rows = r.leading_rows();
  return rows * rows.transpose();
}

/// Stress tensor of R + alpha R0 + beta R2 + gamma R4 on a homogeneous space:
///   T     = Ric
///   T(0)  = 2 R Ric
///   T(2)  = 2 R_ikjl Ric_kl + lap Ric
///   T(4)  = 2 R_iklm R_jklm + 4 R_ikjl Ric_kl + 4 lap Ric - 4 Ric Ric
/// Terms proportional to delta_ij (the Lagrangian density itself and the
/// vanishing derivatives of R) are absorbed into lambda.
inline StressTensor stress_tensor(const CurvatureBundle & b, Couplings k)
{
  Matrix t = b.ricci;
  if (k.alpha != 0.0) t += k.alpha * 2.0 * b.scalar * b.ricci;
  if (k.beta != 0.0 || k.gamma != 0.0) {
    const Matrix rr = riemann_ricci(b.riemann, b.ricci);
    const Matrix lap = covariant_laplacian_ricci(b.gamma, b.ricci);
    if (k.beta != 0.0) t += k.beta * (2.0 * rr + lap);
    if (k.gamma != 0.0) t += k.gamma * (2.0 * riemann_square(b.riemann) + 4.0 * rr + 4.0 * lap - 4.0 * b.ricci * b.ricci);
  }
  return finish_stress(std::move(t), k);
}

inline StressTensor stress_tensor(const StructureTensor & c, double alpha, double beta, double gamma)
{
  return stress_tensor(compute_curvature(c), Couplings{alpha, beta, gamma});
}

/// Gauss-Bonnet combination (gamma, -4 gamma, gamma), assembled without the
/// Laplacian: Ric + gamma (2 R Ric + 2 R_iklm R_jklm - 4 R_iljk Ric_lk - 4 Ric Ric).
inline StressTensor gb_stress(const CurvatureBundle & b, double gamma)
{
  Matrix t = b.ricci;
  if (gamma != 0.0)
    t += gamma * (2.0 * b.scalar * b.ricci + 2.0 * riemann_square(b.riemann) - 4.0 * riemann_ricci(b.riemann, b.ricci) -
                  4.0 * b.ricci * b.ricci);
  return finish_stress(std::move(t), Couplings::gauss_bonnet(gamma));
}

inline StressTensor gb_stress(const StructureTensor & c, double gamma) { return gb_stress(compute_curvature(c), gamma); }

inline double loss(const CurvatureBundle & b, Couplings k)
{
  return b.scalar + k.alpha * b.inv0 + k.beta * b.inv2 + k.gamma * b.inv4;
}

inline double loss(const StructureTensor & c, double alpha, double beta, double gamma)
{
  return loss(compute_curvature(c), Couplings{alpha, beta, gamma});
}

inline double gb_loss(const CurvatureBundle & b, double gamma) { return loss(b, Couplings::gauss_bonnet(gamma)); }

struct Criticality
{
  bool critical = false;
  double lambda = 0.0;
};

inline Criticality is_critical(const StressTensor & t, double tol = kCriticalTol)
{
  return {t.residual < tol, t.lambda_hat};
}

/// Everything the search layer needs at one metric.
struct Evaluation
{
  double loss = 0.0;
  StressTensor stress;
};

inline Evaluation evaluate(const MetricTransform & m, Couplings k)
{
  const CurvatureBundle b = compute_curvature(transform_structure_constants(m));
  const bool gb = k.alpha == k.gamma && k.beta == -4.0 * k.gamma;
  return {loss(b, k), gb ? gb_stress(b, k.gamma) : stress_tensor(b, k)};
}

/// Derivative of the loss along omega -> exp(eps H) omega for symmetric
/// traceless H: 2 <T, H>.
inline double directional_derivative(const StressTensor & t, const Matrix & h)
{
  return 2.0 * (t.entries.array() * h.array()).sum();
}

}  // namespace kaqgeom
