#pragma once

#include <random>

#include "kaqgeom/kaqgeom.hpp"

namespace kaqtest {

/// exp(S) for a random symmetric traceless S with entries of size `scale`.
inline kaqgeom::Matrix random_unimodular(int n, std::mt19937_64 & rng, double scale = 0.08)
{
  std::normal_distribution<double> normal(0.0, scale);
  kaqgeom::Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = s(j, i) = normal(rng);
  s.diagonal().array() -= s.trace() / n;
  return kaqgeom::symmetric_exp(s);
}

inline kaqgeom::Matrix random_symmetric_traceless(int n, std::mt19937_64 & rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  kaqgeom::Matrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) h(i, j) = h(j, i) = normal(rng);
  h.diagonal().array() -= h.trace() / n;
  return h / h.norm();
}

inline kaqgeom::StructureTensor random_constants(std::mt19937_64 & rng, double scale = 0.08)
{
  const auto frame = kaqgeom::gell_mann_frame(4);
  return kaqgeom::transform_structure_constants(random_unimodular(15, rng, scale), frame->constants);
}

inline kaqgeom::StructureTensor kc_constants(int n = 4) { return kaqgeom::gell_mann_frame(n)->constants; }

}  // namespace kaqtest
