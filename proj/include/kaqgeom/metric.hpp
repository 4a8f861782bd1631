#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kaqgeom/algebra.hpp"

namespace kaqgeom {

/// Left-invariant metric given by the symmetric positive-definite transform omega
/// acting on a Killing-Cartan orthonormal frame; the metric is g = omega^-2 and
/// the rows of omega (in frame coordinates) form a g-orthonormal basis.
struct MetricTransform
{
  FramePtr frame;
  Matrix omega;
  std::string family_tag = "custom";
  std::map<std::string, double> params;

  int dim() const { return static_cast<int>(omega.rows()); }

  Matrix metric() const
  {
    const Matrix inv = omega.inverse();
    return inv * inv;
  }

  bool is_diagonal() const { return omega.isDiagonal(0.0); }
};

/// Throws unless omega is symmetric, positive definite and unimodular.
inline void validate(const MetricTransform & m, double det_tol = 1e-10)
{
  if (!m.frame) throw Error("metric transform has no frame");
  if (m.omega.rows() != m.frame->dim() || m.omega.cols() != m.frame->dim())
    throw Error("omega is " + std::to_string(m.omega.rows()) + "x" + std::to_string(m.omega.cols()) +
                " but the frame has dimension " + std::to_string(m.frame->dim()));
  if ((m.omega - m.omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.omega.cwiseAbs().maxCoeff()))
    throw Error("omega is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.omega, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error("omega is not positive definite");
  const double log_det = es.eigenvalues().array().log().sum();
  if (std::abs(std::expm1(log_det)) > det_tol)
    throw Error("omega does not have unit determinant (det = " + std::to_string(std::exp(log_det)) + ")");
}

inline Matrix symmetric_exp(const Matrix & s)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

/// Structure constants of the frame X~_a = sum_b M_ab X_b:
/// K~_cad = sum M_ab M_df K_ebf (M^-1)_ec.
inline StructureTensor structure_constants_in_frame(const Matrix & frame_rows, const StructureTensor & k)
{
  const int n = k.dim();
  if (frame_rows.rows() != n || frame_rows.cols() != n) throw Error("frame transform has the wrong shape");
  StructureTensor out{Tensor3(n), k.frame_tag + "~"};
  if (frame_rows.isDiagonal(0.0)) {
    const Vector w = frame_rows.diagonal();
    if (!(w.array().abs() > 0.0).all() || !w.allFinite()) throw Error("frame transform is singular");
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) out(c, a, d) = w[a] * w[d] / w[c] * k(c, a, d);
    return out;
  }

  Eigen::FullPivLU<Matrix> lu(frame_rows);
  if (!lu.isInvertible()) throw Error("frame transform is singular");
  const Matrix inv = lu.inverse();

  // sandwiched[e] = M K_e M^T with (K_e)_{bf} = K[e][b][f]
  std::vector<Matrix> sandwiched(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    Matrix ke(n, n);
    for (int b = 0; b < n; ++b)
      for (int f = 0; f < n; ++f) ke(b, f) = k(e, b, f);
    sandwiched[static_cast<std::size_t>(e)] = frame_rows * ke * frame_rows.transpose();
  }
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) {
      const double w = inv(e, c);
      if (w == 0.0) continue;
      const Matrix & s = sandwiched[static_cast<std::size_t>(e)];
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) out(c, a, d) += w * s(a, d);
    }
  return out;
}

/// K~_a = sum_b omega_ab [omega^-1 K_b omega] for symmetric omega.
inline StructureTensor transform_structure_constants(const Matrix & omega, const StructureTensor & k)
{
  return structure_constants_in_frame(omega, k);
}

inline StructureTensor transform_structure_constants(const MetricTransform & m)
{
  return structure_constants_in_frame(m.omega, m.frame->constants);
}

// ---------------------------------------------------------------------------
// Jensen metrics

/// Jensen's critical exponent for a Cartan decomposition with dim R = r, dim M = m.
inline double jensen_tau(double r, double m)
{
  if (r <= 0.0 || m < 0.0) throw std::invalid_argument("jensen_tau: need r > 0 and m >= 0");
  if (2.0 * r == m) throw std::domain_error("jensen_tau: 2r = m makes the logarithm singular");
  if (m == 0.0) return 0.0;
  return r * m / (2.0 * (r + m)) * std::log((2.0 * r + m) / (2.0 * r - m));
}

/// omega = exp(tau B) with B = 1/r on R and -1/m on its complement.
inline MetricTransform build_jensen(FramePtr frame, const Matrix & r_span, std::string tag = "jensen")
{
  const StructureTensor & c = frame->constants;
  if (!check_cartan_decomposition(c, r_span)) throw Error("build_jensen: subspace does not give a Cartan decomposition");
  const int n = c.dim();
  const Matrix r = Eigen::HouseholderQR<Matrix>(r_span).householderQ() * Matrix::Identity(n, r_span.cols());
  const double rd = static_cast<double>(r.cols());
  const double md = static_cast<double>(n) - rd;
  const double tau = jensen_tau(rd, md);
  const Matrix pr = r * r.transpose();
  const Matrix pm = Matrix::Identity(n, n) - pr;
  MetricTransform out;
  out.frame = std::move(frame);
  out.omega = std::exp(tau / rd) * pr + std::exp(-tau / md) * pm;
  out.omega = 0.5 * (out.omega + out.omega.transpose()).eval();
  out.family_tag = std::move(tag);
  out.params = {{"tau", tau}, {"r", rd}, {"m", md}};
  return out;
}

inline MetricTransform build_jensen(FramePtr frame, const std::vector<int> & r_indices, std::string tag = "jensen")
{
  const int n = frame->dim();
  return build_jensen(std::move(frame), coordinate_span(n, r_indices), std::move(tag));
}

/// Labels of the sp(2) subalgebra of su(4) in the two-qubit Pauli frame.
inline const std::vector<std::string> & sp2_labels()
{
  static const std::vector<std::string> labels = {"Z1X2", "Z1Y2", "X1", "Y1", "X1X2", "Y1Y2", "Y1X2", "X1Y2", "Z2", "Z1"};
  return labels;
}

/// Labels of so(4) (the real antisymmetric letters) in the su(4) Gell-Mann frame.
inline const std::vector<std::string> & so4_labels()
{
  static const std::vector<std::string> labels = {"A1", "A2", "A3", "A4", "A5", "A6"};
  return labels;
}

inline std::vector<int> indices_of(const OperatorBasis & basis, const std::vector<std::string> & labels)
{
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto & l : labels) out.push_back(basis.index_of(l));
  return out;
}

inline MetricTransform so4_jensen()
{
  auto f = gell_mann_frame(4);
  return build_jensen(f, indices_of(f->basis, so4_labels()), "jensen_so4");
}

inline MetricTransform sp2_jensen()
{
  auto f = pauli_frame(2);
  return build_jensen(f, indices_of(f->basis, sp2_labels()), "jensen_sp2");
}

// ---------------------------------------------------------------------------
// Parameterized families over su(4)

enum class Family { BP, AB, UKAQ, PKAQ };
enum class GeneralFamily { UKAQ_full, PKAQ_full, FKAQ_full, AB_full };

inline std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

inline const char * to_string(Family f)
{
  switch (f) {
    case Family::BP: return "bp";
    case Family::AB: return "ab";
    case Family::UKAQ: return "ukaq";
    case Family::PKAQ: return "pkaq";
  }
  return "?";
}

inline const char * to_string(GeneralFamily f)
{
  switch (f) {
    case GeneralFamily::UKAQ_full: return "ukaq_full";
    case GeneralFamily::PKAQ_full: return "pkaq_full";
    case GeneralFamily::FKAQ_full: return "fkaq_full";
    case GeneralFamily::AB_full: return "ab_full";
  }
  return "?";
}

inline std::optional<Family> parse_family(const std::string & name)
{
  const std::string s = lower(name);
  if (s == "bp") return Family::BP;
  if (s == "ab") return Family::AB;
  if (s == "ukaq") return Family::UKAQ;
  if (s == "pkaq") return Family::PKAQ;
  return std::nullopt;
}

inline std::optional<GeneralFamily> parse_general_family(const std::string & name)
{
  const std::string s = lower(name);
  if (s == "ukaq_full") return GeneralFamily::UKAQ_full;
  if (s == "pkaq_full") return GeneralFamily::PKAQ_full;
  if (s == "fkaq_full") return GeneralFamily::FKAQ_full;
  if (s == "ab_full") return GeneralFamily::AB_full;
  return std::nullopt;
}

/// Frame of the partially translated family: eleven Pauli words and the four
/// Gell-Mann letters S3, S4, A3, A4 (which span X1X2, Y1Y2, Y1X2, X1Y2).
inline FramePtr pkaq_frame()
{
  return detail::cached_frame("pkaq-mixed", [] {
    const OperatorBasis gm = build_gell_mann(4);
    OperatorBasis b;
    b.n_hilbert = 4;
    b.flavor = BasisFlavor::Mixed;
    auto add_word = [&](const std::string & letters) {
      b.elements.push_back(pauli_word_element(letters));
      b.labels.push_back(pauli_label(letters));
      b.site_letters.push_back(letters);
    };
    auto add_letter = [&](const std::string & label) {
      b.elements.push_back(gm.elements[static_cast<std::size_t>(gm.index_of(label))]);
      b.labels.push_back(label);
      b.site_letters.emplace_back();
    };
    add_word("ZX");
    add_word("ZY");
    add_word("XI");
    add_word("YI");
    add_letter("S3");
    add_letter("S4");
    add_letter("A3");
    add_letter("A4");
    add_word("IZ");
    add_word("ZI");
    add_word("IX");
    add_word("IY");
    add_word("XZ");
    add_word("YZ");
    add_word("ZZ");
    return make_frame(std::move(b), "pkaq-mixed");
  });
}

/// A block of frame labels sharing one log-weight.
struct WeightGroup
{
  std::vector<std::string> labels;
  double log_weight = 0.0;
};

/// omega = sum over groups of exp(log_weight) on the listed frame axes.
/// Every frame axis must be assigned exactly once.
inline MetricTransform diagonal_metric(FramePtr frame, const std::vector<WeightGroup> & groups, std::string tag,
                                       std::map<std::string, double> params)
{
  const int n = frame->dim();
  Vector logw = Vector::Zero(n);
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto & g : groups)
    for (const auto & l : g.labels) {
      const int i = frame->basis.index_of(l);
      logw[i] = g.log_weight;
      ++seen[static_cast<std::size_t>(i)];
    }
  for (int i = 0; i < n; ++i)
    if (seen[static_cast<std::size_t>(i)] != 1)
      throw Error("diagonal_metric: axis " + frame->basis.labels[static_cast<std::size_t>(i)] + " assigned " +
                  std::to_string(seen[static_cast<std::size_t>(i)]) + " times");
  MetricTransform m;
  m.frame = std::move(frame);
  m.omega = logw.array().exp().matrix().asDiagonal();
  m.family_tag = std::move(tag);
  m.params = std::move(params);
  return m;
}

/// Two-parameter families: BP and AB in the Pauli frame, UKAQ in the Gell-Mann
/// frame and PKAQ in the mixed frame. omega is diagonal in each.
inline MetricTransform build_family(Family family, double t, double s)
{
  std::map<std::string, double> params{{"t", t}, {"s", s}};
  switch (family) {
    case Family::BP:
      return diagonal_metric(pauli_frame(2),
                             {{{"X1", "Y1", "Z1"}, t / 6.0},
                              {{"X2", "Y2", "Z2"}, s / 6.0},
                              {{"X1X2", "X1Y2", "X1Z2", "Y1X2", "Y1Y2", "Y1Z2", "Z1X2", "Z1Y2", "Z1Z2"}, -(t + s) / 18.0}},
                             "bp", params);
    case Family::AB:
      return diagonal_metric(pauli_frame(2),
                             {{{"Z1", "Z2", "Z1Z2"}, -(8.0 * t + 4.0 * s) / 30.0},
                              {{"X1", "Y1", "X2", "Y2", "X1Z2", "Y1Z2", "Z1X2", "Z1Y2"}, t / 10.0},
                              {{"X1X2", "Y1X2", "X1Y2", "Y1Y2"}, s / 10.0}},
                             "ab", params);
    case Family::UKAQ:
      return diagonal_metric(gell_mann_frame(4),
                             {{{"A1", "A6"}, t / 6.0},
                              {{"A2", "A5", "A3", "A4"}, s / 6.0},
                              {{"S1", "S2", "S3", "S4", "S5", "S6", "D1", "D2", "D3"}, -(t + 2.0 * s) / 27.0}},
                             "ukaq", params);
    case Family::PKAQ:
      // Every axis carries exactly one weight; no extra exp(m2) on Y2.
      return diagonal_metric(pkaq_frame(),
                             {{{"X2", "Y2", "X1Z2", "Y1Z2", "Z1Z2"}, -(3.0 * t + 2.0 * s) / 25.0},
                              {{"Z1X2", "Z1Y2", "X1", "Y1", "Z2", "Z1"}, t / 10.0},
                              {{"S3", "S4", "A3", "A4"}, s / 10.0}},
                             "pkaq", params);
  }
  throw Error("unknown family");
}

struct GeneralFamilyLayout
{
  FramePtr frame;
  std::vector<std::pair<std::string, std::vector<std::string>>> weighted;  ///< weight key -> axes
  std::vector<std::string> determinant_axes;                                ///< axes carrying exp(-Delta)
};

inline GeneralFamilyLayout general_family_layout(GeneralFamily family)
{
  switch (family) {
    case GeneralFamily::UKAQ_full:
      return {gell_mann_frame(4),
              {{"r1", {"A1", "A6"}},
               {"r2", {"A2", "A5"}},
               {"r3", {"A3", "A4"}},
               {"m1", {"S1", "S6"}},
               {"m2", {"S2", "S5"}},
               {"m3", {"S3", "S4"}}},
              {"D1", "D2", "D3"}};
    case GeneralFamily::PKAQ_full:
      return {pkaq_frame(),
              {{"r1", {"Z1X2"}},
               {"r2", {"Z1Y2"}},
               {"r3", {"X1"}},
               {"r4", {"Y1"}},
               {"r5", {"S3", "S4"}},
               {"r6", {"A3", "A4"}},
               {"r7", {"Z2"}},
               {"r8", {"Z1"}},
               {"m1", {"X2"}},
               {"m2", {"Y2"}},
               {"m3", {"X1Z2"}},
               {"m4", {"Y1Z2"}}},
              {"Z1Z2"}};
    case GeneralFamily::FKAQ_full:
      return {pauli_frame(2),
              {{"w1", {"X1"}},
               {"w2", {"Y1"}},
               {"w3", {"Z1"}},
               {"w4", {"X2"}},
               {"w5", {"Y2"}},
               {"w6", {"Z2"}},
               {"W1", {"X1X2"}},
               {"W2", {"X1Y2"}},
               {"W3", {"X1Z2"}},
               {"W4", {"Y1X2"}},
               {"W5", {"Y1Y2"}},
               {"W6", {"Y1Z2"}},
               {"W7", {"Z1X2"}},
               {"W8", {"Z1Y2"}}},
              {"Z1Z2"}};
    case GeneralFamily::AB_full:
      return {pauli_frame(2),
              {{"t1", {"X1", "X1Z2"}},
               {"t2", {"Y1", "Y1Z2"}},
               {"t3", {"X2", "Z1X2"}},
               {"t4", {"Y2", "Z1Y2"}},
               {"t5", {"X1X2", "Y1Y2"}},
               {"t6", {"X1Y2", "Y1X2"}}},
              {"Z1", "Z2", "Z1Z2"}};
  }
  throw Error("unknown general family");
}

/// Multi-weight families. Delta is fixed in closed form so that det omega = 1.
inline MetricTransform build_general_family(GeneralFamily family, const std::map<std::string, double> & weights)
{
  const GeneralFamilyLayout layout = general_family_layout(family);
  if (weights.size() != layout.weighted.size())
    throw std::invalid_argument(std::string(to_string(family)) + " takes " + std::to_string(layout.weighted.size()) +
                                " weights, got " + std::to_string(weights.size()));
  std::vector<WeightGroup> groups;
  double exponent_sum = 0.0;
  for (const auto & [key, axes] : layout.weighted) {
    auto it = weights.find(key);
    if (it == weights.end()) throw std::invalid_argument(std::string(to_string(family)) + " is missing weight '" + key + "'");
    groups.push_back({axes, it->second});
    exponent_sum += it->second * static_cast<double>(axes.size());
  }
  const double delta = exponent_sum / static_cast<double>(layout.determinant_axes.size());
  groups.push_back({layout.determinant_axes, -delta});
  auto params = weights;
  params["Delta"] = delta;
  return diagonal_metric(layout.frame, groups, to_string(family), std::move(params));
}

inline std::vector<std::string> general_family_keys(GeneralFamily family)
{
  std::vector<std::string> keys;
  for (const auto & [key, axes] : general_family_layout(family).weighted) keys.push_back(key);
  return keys;
}

/// Generators of the Cartan subalgebra R0 the two-parameter families are ad-invariant under,
/// as columns in the family's frame.
inline Matrix r0_generators(Family family)
{
  const MetricTransform probe = build_family(family, 0.0, 0.0);
  const OperatorBasis & basis = probe.frame->basis;
  if (family == Family::UKAQ) return coordinate_span(basis.size(), indices_of(basis, {"A1", "A6"}));
  return coordinate_span(basis.size(), indices_of(basis, {"Z1", "Z2"}));
}

}  // namespace kaqgeom
