#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "kaqgeom/dictionary.hpp"
#include "kaqgeom/metric.hpp"

namespace kaqgeom {

/// A principal axis rewritten as a Pauli word.
struct DecodedAxis
{
  std::string word;             ///< label such as "X1Z2"
  std::string letters;          ///< per-site letters such as "XZ"
  double eigenvalue = 0.0;      ///< metric eigenvalue of the containing eigenspace
  int cluster = -1;             ///< index into KAQCertificate::degeneracy_partition
  std::string frame_combination;
  int dictionary_row = -1;      ///< row of dictionary() realizing the combination, -1 if none needed
  CMatrix matrix;
};

struct KAQCertificate
{
  std::vector<double> eigenvalues;                    ///< metric eigenvalues, ascending
  std::vector<std::vector<int>> degeneracy_partition; ///< positions into `eigenvalues`
  std::vector<DecodedAxis> decoded_basis;             ///< in Pauli-word enumeration order
  std::vector<int> undecoded_clusters;
  int translated_axes = 0;                            ///< decoded words mixing several frame axes
  double max_commutator_residual = 0.0;
  bool is_kaq = false;
};

namespace detail {

inline int qubit_count(int n_hilbert)
{
  int d = 0;
  while ((1 << d) < n_hilbert) ++d;
  if ((1 << d) != n_hilbert) throw Error("Hilbert dimension " + std::to_string(n_hilbert) + " is not a power of two");
  return d;
}

/// Single-linkage clusters of ascending values with relative gap tolerance.
inline std::vector<std::vector<int>> cluster_sorted(const std::vector<double> & values, double rel_tol)
{
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    const bool join = i > 0 && std::abs(values[static_cast<std::size_t>(i)] - values[static_cast<std::size_t>(i - 1)]) <=
                                   rel_tol * std::max(std::abs(values[static_cast<std::size_t>(i)]),
                                                      std::abs(values[static_cast<std::size_t>(i - 1)]));
    if (!join) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

inline std::string describe_combination(const OperatorBasis & basis, const Vector & coeffs, double tol = 1e-10)
{
  std::string out;
  char buf[96];
  for (int i = 0; i < coeffs.size(); ++i) {
    if (std::abs(coeffs[i]) <= tol) continue;
    std::snprintf(buf, sizeof buf, "%s%.6f*%s", out.empty() ? "" : (coeffs[i] < 0 ? " " : " +"), coeffs[i],
                  basis.labels[static_cast<std::size_t>(i)].c_str());
    out += buf;
  }
  return out;
}

}  // namespace detail

/// Eigendecomposes the metric, groups degenerate principal axes and tries to
/// rewrite every eigenspace in terms of Pauli words: a word is accepted when
/// it lies entirely inside one eigenspace. When all eigenspaces decode, the
/// decoded basis's structure constants are compared against the Pauli-word
/// reference.
inline KAQCertificate kaq_verify(const MetricTransform & m, double deg_tol = 1e-8)
{
  const OperatorBasis & basis = m.frame->basis;
  const int n = m.dim();
  const int d = detail::qubit_count(basis.n_hilbert);
  const FramePtr pauli = pauli_frame(d);

  Eigen::SelfAdjointEigenSolver<Matrix> es(m.omega);
  // metric eigenvalue is omega^-2; omega ascending means metric descending
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());

  KAQCertificate cert;
  for (int k : order) cert.eigenvalues.push_back(1.0 / (es.eigenvalues()[k] * es.eigenvalues()[k]));
  cert.degeneracy_partition = detail::cluster_sorted(cert.eigenvalues, deg_tol);

  std::vector<Matrix> spaces;
  for (const auto & group : cert.degeneracy_partition) {
    Matrix v(n, static_cast<Eigen::Index>(group.size()));
    for (std::size_t j = 0; j < group.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(order[static_cast<std::size_t>(group[j])]);
    spaces.push_back(std::move(v));
  }

  const auto rows = basis.flavor == BasisFlavor::PauliWord || basis.n_hilbert != 4 ? std::vector<DictionaryRow>{} : dictionary();
  std::vector<int> found(spaces.size(), 0);
  const int n_words = pauli->dim();
  for (int w = 0; w < n_words; ++w) {
    const Vector cp = coefficients(basis, pauli->basis.elements[static_cast<std::size_t>(w)]);
    for (std::size_t k = 0; k < spaces.size(); ++k) {
      const Vector proj = spaces[k] * (spaces[k].transpose() * cp);
      if ((proj - cp).norm() > 1e-8) continue;
      DecodedAxis ax;
      ax.word = pauli->basis.labels[static_cast<std::size_t>(w)];
      ax.letters = pauli->basis.site_letters[static_cast<std::size_t>(w)];
      ax.eigenvalue = cert.eigenvalues[static_cast<std::size_t>(cert.degeneracy_partition[k].front())];
      ax.cluster = static_cast<int>(k);
      ax.frame_combination = detail::describe_combination(basis, proj);
      ax.matrix = combine(basis, proj);
      const int support = static_cast<int>((proj.array().abs() > 1e-10).count());
      if (support > 1) {
        ++cert.translated_axes;
        for (std::size_t r = 0; r < rows.size(); ++r)
          if (rows[r].word == ax.letters) ax.dictionary_row = static_cast<int>(r);
      }
      ++found[k];
      cert.decoded_basis.push_back(std::move(ax));
      break;
    }
  }

  for (std::size_t k = 0; k < spaces.size(); ++k)
    if (found[k] != spaces[k].cols()) cert.undecoded_clusters.push_back(static_cast<int>(k));

  if (!cert.undecoded_clusters.empty()) {
    cert.max_commutator_residual = std::numeric_limits<double>::infinity();
    return cert;
  }

  OperatorBasis decoded;
  decoded.n_hilbert = basis.n_hilbert;
  decoded.flavor = BasisFlavor::PauliWord;
  for (const auto & ax : cert.decoded_basis) {
    decoded.elements.push_back(ax.matrix);
    decoded.labels.push_back(ax.word);
    decoded.site_letters.push_back(ax.letters);
  }
  try {
    const StructureTensor c = structure_constants(decoded, 1e-10);
    cert.max_commutator_residual = c.entries.max_abs_diff(pauli->constants.entries);
  } catch (const Error &) {
    cert.max_commutator_residual = std::numeric_limits<double>::infinity();
  }
  cert.is_kaq = cert.max_commutator_residual < 1e-10;
  return cert;
}

/// Conjugates the block of principal axes with omega-weight above one by
/// exp(i pi/4 Y1 Y2) and reports whether the image spans exactly the
/// single-site Pauli words. An empty block is accepted.
inline bool many_body_automorphism_check(const MetricTransform & m, double tol = 1e-10)
{
  const OperatorBasis & basis = m.frame->basis;
  if (basis.n_hilbert != 4) throw Error("many_body_automorphism_check is defined for two qubits");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.omega);
  std::vector<CMatrix> block;
  for (int k = 0; k < m.dim(); ++k)
    if (es.eigenvalues()[k] > 1.0 + tol) block.push_back(combine(basis, es.eigenvectors().col(k)));
  if (block.empty()) return true;

  const double c = std::cos(M_PI / 4.0);
  const CMatrix u = c * CMatrix::Identity(4, 4) + std::complex<double>(0.0, std::sin(M_PI / 4.0)) * pauli_string("YY");

  const FramePtr pauli = pauli_frame(2);
  std::vector<int> local;
  for (int w = 0; w < pauli->dim(); ++w)
    if (word_length(pauli->basis.site_letters[static_cast<std::size_t>(w)]) == 1) local.push_back(w);
  if (block.size() != local.size()) return false;

  for (const CMatrix & e : block) {
    const CMatrix image = u * e * u.adjoint();
    CMatrix inside = CMatrix::Zero(4, 4);
    for (int w : local) {
      const CMatrix & p = pauli->basis.elements[static_cast<std::size_t>(w)];
      inside += kc_inner(p, image) * p;
    }
    if ((image - inside).norm() > tol) return false;
  }
  return true;
}

}  // namespace kaqgeom
