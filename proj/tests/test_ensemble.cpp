#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace kaqgeom;

TEST(CounterNormal, DeterministicAndIndexAddressed)
{
  CounterNormal a(7), b(7), c(8);
  EXPECT_EQ(a.normal(12345), b.normal(12345));
  EXPECT_NE(a.normal(12345), c.normal(12345));
  double mean = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = a.normal(static_cast<std::uint64_t>(i));
    mean += z;
    sq += z * z;
  }
  EXPECT_NEAR(mean / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Sample, IdentityGivesHalfVariance)
{
  const EnsembleSample s = sample(build_family(Family::BP, 0.0, 0.0), 40000, 1);
  const Matrix cov = sample_covariance(s);
  EXPECT_LT((cov - 0.5 * Matrix::Identity(15, 15)).cwiseAbs().maxCoeff(), 0.03);
}

TEST(Sample, WorkerCountDoesNotChangeDraws)
{
  const MetricTransform m = build_family(Family::AB, 1.0, -1.0);
  const EnsembleSample one = sample(m, 777, 99, 1);
  const EnsembleSample many = sample(m, 777, 99, 4);
  EXPECT_EQ(one.coefficients, many.coefficients);
  EXPECT_NE(sample(m, 777, 100, 1).coefficients, one.coefficients);
}

TEST(Sample, CovarianceConvergesToHalfOmegaSquared)
{
  for (Family f : {Family::BP, Family::PKAQ}) {
    const MetricTransform m = build_family(f, 1.0, -1.0);
    const Matrix expected = 0.5 * m.omega * m.omega;
    const double e_small = (sample_covariance(sample(m, 2000, 5)) - expected).cwiseAbs().maxCoeff();
    const double e_large = (sample_covariance(sample(m, 50000, 5)) - expected).cwiseAbs().maxCoeff();
    EXPECT_LT(e_large, 0.05) << to_string(f);
    EXPECT_LT(e_large, e_small) << to_string(f);
  }
}

TEST(Sample, JensenVarianceRatio)
{
  const MetricTransform m = so4_jensen();
  const Matrix cov = sample_covariance(sample(m, 60000, 3));
  const std::vector<int> r = indices_of(m.frame->basis, so4_labels());
  double r_var = 0.0, m_var = 0.0;
  for (int i = 0; i < 15; ++i) (std::find(r.begin(), r.end(), i) != r.end() ? r_var : m_var) += cov(i, i);
  const double ratio = (r_var / 6.0) / (m_var / 9.0);
  const double tau = jensen_tau(6, 9);
  EXPECT_NEAR(ratio / std::exp(2.0 * tau * (1.0 / 6.0 + 1.0 / 9.0)), 1.0, 0.03);
}

TEST(Hamiltonian, IsHermitianAndTraceless)
{
  const OperatorBasis b = build_gell_mann(4);
  const EnsembleSample s = sample(build_family(Family::UKAQ, 0.3, 0.2), 3, 11);
  const CMatrix h = hamiltonian(b, s.coefficients.row(0).transpose());
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(std::abs(h.trace()), 1e-14);
  EXPECT_GT(h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Parallel, CoversEveryIndexOnceAndRethrows)
{
  std::vector<int> hits(103, 0);
  parallel_for(103, 4, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](int i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}
