#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace kaqgeom;

TEST(GellMann, CountsAndNormalization)
{
  for (int n : {2, 3, 4, 5}) {
    const OperatorBasis b = build_gell_mann(n);
    ASSERT_EQ(b.size(), n * n - 1);
    EXPECT_LT(gram_matrix(b).cwiseAbs().maxCoeff() - 1.0, 1e-12);
    EXPECT_LT((gram_matrix(b) - Matrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 1e-12);
    for (const CMatrix & g : b.elements) {
      EXPECT_LT((g + g.adjoint()).cwiseAbs().maxCoeff(), 1e-15);  // anti-Hermitian
      EXPECT_LT(std::abs(g.trace()), 1e-15);
    }
  }
}

TEST(GellMann, GroupLabels)
{
  const OperatorBasis b = build_gell_mann(4);
  int a = 0, s = 0, d = 0;
  for (const auto & l : b.labels) {
    a += l[0] == 'A';
    s += l[0] == 'S';
    d += l[0] == 'D';
  }
  EXPECT_EQ(a, 6);
  EXPECT_EQ(s, 6);
  EXPECT_EQ(d, 3);
  EXPECT_EQ(b.index_of("A1"), 0);
  EXPECT_THROW(b.index_of("Q9"), Error);
}

TEST(GellMann, RejectsSmallN) { EXPECT_THROW(build_gell_mann(1), std::invalid_argument); }

TEST(PauliWords, CountsLabelsAndLengths)
{
  const OperatorBasis b = build_pauli_words(2);
  ASSERT_EQ(b.size(), 15);
  EXPECT_LT((gram_matrix(b) - Matrix::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-12);
  std::set<std::string> seen(b.site_letters.begin(), b.site_letters.end());
  EXPECT_EQ(seen.size(), 15u);
  EXPECT_EQ(seen.count("II"), 0u);
  EXPECT_EQ(word_length("IX"), 1);
  EXPECT_EQ(word_length("ZY"), 2);
  EXPECT_EQ(pauli_label("XI"), "X1");
  EXPECT_EQ(pauli_label("IZ"), "Z2");
  EXPECT_EQ(pauli_label("YX"), "Y1X2");
  EXPECT_EQ(build_pauli_words(3).size(), 63);
  EXPECT_THROW(build_pauli_words(0), std::invalid_argument);
}

TEST(PauliWords, SingleQubitBracket)
{
  // [X1, Y1] points purely along Z1.
  const OperatorBasis b = build_pauli_words(2);
  const StructureTensor c = structure_constants(b);
  const int x = b.index_of("X1"), y = b.index_of("Y1"), z = b.index_of("Z1");
  int nonzero = 0;
  for (int k = 0; k < 15; ++k)
    if (std::abs(c(k, x, y)) > 1e-12) ++nonzero;
  EXPECT_EQ(nonzero, 1);
  EXPECT_GT(std::abs(c(z, x, y)), 0.1);
}

TEST(StructureConstants, KillingNormalizationSu4)
{
  const StructureTensor c = kaqtest::kc_constants(4);
  Matrix trace(15, 15);
  for (int a = 0; a < 15; ++a)
    for (int b = 0; b < 15; ++b) trace(a, b) = (c.ad(a) * c.ad(b)).trace();
  EXPECT_LT((trace + 4.0 * Matrix::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StructureConstants, InvariantSuite)
{
  for (const OperatorBasis & b : {build_gell_mann(3), build_gell_mann(4), build_pauli_words(2)}) {
    const AlgebraReport r = check_algebra(b);
    EXPECT_TRUE(r.passed) << r.flavor << " N=" << r.n_hilbert;
    EXPECT_LT(r.reconstruction_residual, 1e-12);
    EXPECT_LT(r.total_antisymmetry, 1e-12);
    EXPECT_LT(r.jacobi, 1e-12);
  }
}

TEST(StructureConstants, RejectsNonClosedBasis)
{
  OperatorBasis b = build_gell_mann(3);
  b.elements.pop_back();
  b.labels.pop_back();
  EXPECT_THROW(structure_constants(b), Error);
}

TEST(Frames, CacheReturnsSameObject)
{
  EXPECT_EQ(gell_mann_frame(4).get(), gell_mann_frame(4).get());
  EXPECT_NE(gell_mann_frame(4).get(), pauli_frame(2).get());
}

TEST(CartanDecomposition, Sp2AndSo4)
{
  const auto frame = gell_mann_frame(4);
  EXPECT_TRUE(check_cartan_decomposition(frame->constants, indices_of(frame->basis, so4_labels())));
  const auto pauli = pauli_frame(2);
  EXPECT_TRUE(check_cartan_decomposition(pauli->constants, indices_of(pauli->basis, sp2_labels())));
  EXPECT_FALSE(check_cartan_decomposition(frame->constants, std::vector<int>{0, 1}));
}

TEST(BiInvariance, KillingCartanIsBiInvariant)
{
  const StructureTensor c = kaqtest::kc_constants(4);
  std::vector<int> all(15);
  for (int i = 0; i < 15; ++i) all[static_cast<std::size_t>(i)] = i;
  EXPECT_LT(check_bi_invariance(c, Matrix::Identity(15, 15), all), 1e-12);
  Matrix g = Matrix::Identity(15, 15);
  g(0, 0) = 2.0;
  EXPECT_GT(check_bi_invariance(c, g, all), 1e-3);
}

TEST(Metric, ValidateRejectsBadOmega)
{
  MetricTransform m = build_family(Family::BP, 0.0, 0.0);
  EXPECT_NO_THROW(validate(m));
  m.omega(0, 0) = 2.0;
  EXPECT_THROW(validate(m), Error);  // det != 1
  m = build_family(Family::BP, 0.0, 0.0);
  m.omega(0, 1) = 0.1;
  EXPECT_THROW(validate(m), Error);  // asymmetric
  m.omega = Matrix::Identity(3, 3);
  EXPECT_THROW(validate(m), Error);  // wrong size
}

TEST(Metric, FamiliesAreUnimodularAndKcAtOrigin)
{
  for (Family f : {Family::BP, Family::AB, Family::UKAQ, Family::PKAQ}) {
    const MetricTransform origin = build_family(f, 0.0, 0.0);
    EXPECT_LT((origin.omega - Matrix::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-14) << to_string(f);
    const MetricTransform m = build_family(f, 0.7, -1.3);
    EXPECT_NEAR(m.omega.determinant(), 1.0, 1e-10) << to_string(f);
    EXPECT_NO_THROW(validate(m));
  }
}

TEST(Metric, IdentityTransformKeepsConstants)
{
  const auto frame = gell_mann_frame(4);
  const StructureTensor c = transform_structure_constants(Matrix::Identity(15, 15), frame->constants);
  EXPECT_LT(c.entries.max_abs_diff(frame->constants.entries), 1e-15);
}

TEST(Metric, JensenTauValues)
{
  EXPECT_NEAR(jensen_tau(6, 9), 3.5026383, 1e-6);
  EXPECT_NEAR(jensen_tau(10, 5), 0.8513760, 1e-6);
  EXPECT_THROW(jensen_tau(5, 10), std::domain_error);
  const MetricTransform so4 = so4_jensen();
  const MetricTransform sp2 = sp2_jensen();
  EXPECT_NEAR(so4.omega.determinant(), 1.0, 1e-10);
  EXPECT_NEAR(sp2.omega.determinant(), 1.0, 1e-10);
}

TEST(Metric, Parsing)
{
  EXPECT_EQ(parse_family("BP"), Family::BP);
  EXPECT_EQ(parse_family("pkaq"), Family::PKAQ);
  EXPECT_FALSE(parse_family("nope").has_value());
  EXPECT_EQ(parse_general_family("ukaq_full"), GeneralFamily::UKAQ_full);
}

TEST(Metric, GeneralFamilyWeights)
{
  const auto keys = general_family_keys(GeneralFamily::UKAQ_full);
  std::map<std::string, double> w;
  for (const auto & k : keys) w[k] = 0.1;
  EXPECT_NO_THROW(validate(build_general_family(GeneralFamily::UKAQ_full, w)));
  w.erase(w.begin());
  EXPECT_THROW(build_general_family(GeneralFamily::UKAQ_full, w), std::invalid_argument);
}
