#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "kaqgeom/metric.hpp"
#include "kaqgeom/parallel.hpp"

namespace kaqgeom {

/// Counter-based normal variates: SplitMix64 applied to
/// seed + golden * counter, two uniforms per Box-Muller pair. Draw k
/// component j uses counters 2 * (k * stride + j / 2) and that plus one, so
/// any draw can be regenerated independently of the others.
class CounterNormal
{
public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z)
  {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1].
  double uniform(std::uint64_t counter) const
  {
    const std::uint64_t bits = mix(seed_ + 0x9e3779b97f4a7c15ULL * (counter + 1));
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal number `index` of the stream.
  double normal(std::uint64_t index) const
  {
    const std::uint64_t pair = index / 2;
    const double r = std::sqrt(-2.0 * std::log(uniform(2 * pair)));
    const double phi = 2.0 * M_PI * uniform(2 * pair + 1);
    return index % 2 == 0 ? r * std::cos(phi) : r * std::sin(phi);
  }

private:
  std::uint64_t seed_;
};

struct EnsembleSample
{
  Matrix coefficients;  ///< one row per draw, in the metric's frame
  std::uint64_t seed = 0;
  int count = 0;
};

/// Draws c with density proportional to exp(-c^T g c), g = omega^-2, i.e.
/// c = omega z / sqrt(2) with z standard normal (covariance omega^2 / 2).
inline EnsembleSample sample(const MetricTransform & m, int count, std::uint64_t seed, int workers = 1)
{
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  const int n = m.dim();
  const std::uint64_t stride = static_cast<std::uint64_t>(n + (n % 2));
  const CounterNormal rng(seed);
  EnsembleSample out{Matrix(count, n), seed, count};
  const Matrix scaled = m.omega / std::sqrt(2.0);
  parallel_for(count, workers, [&](int k) {
    Vector z(n);
    for (int j = 0; j < n; ++j) z[j] = rng.normal(static_cast<std::uint64_t>(k) * stride + static_cast<std::uint64_t>(j));
    out.coefficients.row(k) = (scaled * z).transpose();
  });
  return out;
}

inline Matrix sample_covariance(const EnsembleSample & s)
{
  const Vector mean = s.coefficients.colwise().mean();
  const Matrix centered = s.coefficients.rowwise() - mean.transpose();
  return centered.transpose() * centered / std::max(1, s.count - 1);
}

/// H = sum_a c_a (i X_a)^dagger for anti-Hermitian frame elements X_a; the
/// result is Hermitian and traceless.
inline CMatrix hamiltonian(const OperatorBasis & basis, const Vector & c)
{
  CMatrix h = CMatrix::Zero(basis.n_hilbert, basis.n_hilbert);
  for (int a = 0; a < basis.size(); ++a)
    h += c[a] * (std::complex<double>(0.0, 1.0) * basis.elements[static_cast<std::size_t>(a)]).adjoint();
  return h;
}

}  // namespace kaqgeom
