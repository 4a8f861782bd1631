#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaqgeom/tensor.hpp"

namespace kaqgeom {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kExactTol = 1e-12;

enum class BasisFlavor { GellMann, PauliWord, Mixed };

inline const char * to_string(BasisFlavor f)
{
  switch (f) {
    case BasisFlavor::GellMann: return "gellmann";
    case BasisFlavor::PauliWord: return "pauli";
    case BasisFlavor::Mixed: return "mixed";
  }
  return "?";
}

/// Ordered anti-Hermitian traceless basis of su(N).
///
/// `site_letters` is filled only for Pauli words: one letter from "IXYZ" per
/// qubit, qubit 1 leftmost (it is the most significant Kronecker factor).
struct OperatorBasis
{
  int n_hilbert = 0;
  BasisFlavor flavor = BasisFlavor::GellMann;
  std::vector<CMatrix> elements;
  std::vector<std::string> labels;
  std::vector<std::string> site_letters;

  int size() const { return static_cast<int>(elements.size()); }

  int index_of(const std::string & label) const
  {
    for (int i = 0; i < size(); ++i)
      if (labels[i] == label) return i;
    throw Error("basis has no element labelled '" + label + "'");
  }
};

/// Killing-Cartan pairing <A,B> = 2 tr(A^dagger B), real part.
inline double kc_inner(const CMatrix & a, const CMatrix & b)
{
  return 2.0 * (a.adjoint() * b).trace().real();
}

inline CMatrix commutator(const CMatrix & a, const CMatrix & b) { return a * b - b * a; }

/// Coordinates of `m` along each basis element under the Killing-Cartan pairing.
inline Vector coefficients(const OperatorBasis & basis, const CMatrix & m)
{
  Vector c(basis.size());
  for (int i = 0; i < basis.size(); ++i) c[i] = kc_inner(basis.elements[i], m);
  return c;
}

inline CMatrix combine(const OperatorBasis & basis, const Vector & coeffs)
{
  CMatrix m = CMatrix::Zero(basis.n_hilbert, basis.n_hilbert);
  for (int i = 0; i < basis.size(); ++i)
    if (coeffs[i] != 0.0) m += coeffs[i] * basis.elements[i];
  return m;
}

inline Matrix gram_matrix(const OperatorBasis & basis)
{
  const int n = basis.size();
  Matrix g(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g(a, b) = kc_inner(basis.elements[a], basis.elements[b]);
  return g;
}

/// Generalized Gell-Mann letters times i, normalized to tr(G^dagger G) = 1/2.
///
/// Order: A_l for the pairs (j,k), j<k, in lexicographic order, then S_l over
/// the same pairs, then D_p for p = 1..N-1.
inline OperatorBasis build_gell_mann(int N)
{
  if (N < 2) throw std::invalid_argument("build_gell_mann: N must be >= 2, got " + std::to_string(N));
  using cd = std::complex<double>;
  OperatorBasis b;
  b.n_hilbert = N;
  b.flavor = BasisFlavor::GellMann;
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k) pairs.emplace_back(j, k);

  int l = 1;
  for (auto [j, k] : pairs) {
    CMatrix m = CMatrix::Zero(N, N);
    m(j, k) = 0.5;
    m(k, j) = -0.5;
    b.elements.push_back(m);
    b.labels.push_back("A" + std::to_string(l++));
  }
  l = 1;
  for (auto [j, k] : pairs) {
    CMatrix m = CMatrix::Zero(N, N);
    m(j, k) = cd(0.0, 0.5);
    m(k, j) = cd(0.0, 0.5);
    b.elements.push_back(m);
    b.labels.push_back("S" + std::to_string(l++));
  }
  for (int p = 1; p < N; ++p) {
    CMatrix m = CMatrix::Zero(N, N);
    const double scale = 0.5 * std::sqrt(2.0 / (p * (p + 1.0)));
    for (int q = 0; q < p; ++q) m(q, q) = cd(0.0, scale);
    m(p, p) = cd(0.0, -p * scale);
    b.elements.push_back(m);
    b.labels.push_back("D" + std::to_string(p));
  }
  return b;
}

inline CMatrix pauli_matrix(char letter)
{
  using cd = std::complex<double>;
  CMatrix m(2, 2);
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument(std::string("unknown Pauli letter '") + letter + "'");
  }
  return m;
}

/// Hermitian Kronecker product of the site letters (qubit 1 leftmost).
inline CMatrix pauli_string(const std::string & letters)
{
  CMatrix m = CMatrix::Ones(1, 1);
  for (char c : letters) {
    const CMatrix p = pauli_matrix(c);
    CMatrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = m(i, j) * p;
    m = std::move(next);
  }
  return m;
}

/// "XIZ" -> "X1Z3"; identity letters are dropped.
inline std::string pauli_label(const std::string & letters)
{
  std::string out;
  for (std::size_t q = 0; q < letters.size(); ++q)
    if (letters[q] != 'I') out += letters[q] + std::to_string(q + 1);
  return out;
}

inline int word_length(const std::string & letters)
{
  return static_cast<int>(std::count_if(letters.begin(), letters.end(), [](char c) { return c != 'I'; }));
}

/// Basis element i * word * s with s chosen so that 2 tr(P^dagger P) = 1.
inline CMatrix pauli_word_element(const std::string & letters)
{
  const double dim = std::pow(2.0, static_cast<double>(letters.size()));
  return std::complex<double>(0.0, 1.0 / std::sqrt(2.0 * dim)) * pauli_string(letters);
}

/// The 4^d - 1 non-identity Pauli words, enumerated with qubit 1 most significant.
inline OperatorBasis build_pauli_words(int d)
{
  if (d < 1) throw std::invalid_argument("build_pauli_words: d must be >= 1, got " + std::to_string(d));
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  OperatorBasis b;
  b.n_hilbert = 1 << d;
  b.flavor = BasisFlavor::PauliWord;
  const long total = 1L << (2 * d);
  for (long code = 1; code < total; ++code) {
    std::string letters(static_cast<std::size_t>(d), 'I');
    long c = code;
    for (int q = d - 1; q >= 0; --q) {
      letters[static_cast<std::size_t>(q)] = kLetters[c & 3];
      c >>= 2;
    }
    b.elements.push_back(pauli_word_element(letters));
    b.labels.push_back(pauli_label(letters));
    b.site_letters.push_back(letters);
  }
  return b;
}

/// Structure constants C[c][a][b] with [X_a, X_b] = sum_c C[c][a][b] X_c.
struct StructureTensor
{
  Tensor3 entries;
  std::string frame_tag;

  int dim() const { return entries.extent(); }
  double operator()(int c, int a, int b) const { return entries(c, a, b); }
  double & operator()(int c, int a, int b) { return entries(c, a, b); }

  /// ad_a as a matrix: (K_a)_{cb} = C[c][a][b].
  Matrix ad(int a) const
  {
    const int n = dim();
    Matrix k(n, n);
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b) k(c, b) = entries(c, a, b);
    return k;
  }
};

/// Largest |G_ab - delta_ab| over the Gram matrix, plus the entry where it occurs.
struct GramDefect
{
  double value = 0.0;
  int row = 0;
  int col = 0;
};

inline GramDefect orthonormality_defect(const OperatorBasis & basis)
{
  GramDefect worst;
  const Matrix g = gram_matrix(basis);
  for (int a = 0; a < g.rows(); ++a)
    for (int b = 0; b < g.cols(); ++b) {
      const double d = std::abs(g(a, b) - (a == b ? 1.0 : 0.0));
      if (d > worst.value) worst = {d, a, b};
    }
  return worst;
}

inline StructureTensor structure_constants(const OperatorBasis & basis, double tol = kExactTol)
{
  const int n = basis.size();
  const int expected = basis.n_hilbert * basis.n_hilbert - 1;
  if (n != expected)
    throw Error("structure_constants: basis has " + std::to_string(n) + " elements, su(" +
                std::to_string(basis.n_hilbert) + ") needs " + std::to_string(expected));
  const GramDefect defect = orthonormality_defect(basis);
  if (defect.value > tol) {
    std::ostringstream msg;
    msg << "structure_constants: basis is not Killing-Cartan orthonormal; Gram entry (" << basis.labels[defect.row]
        << ", " << basis.labels[defect.col] << ") deviates by " << defect.value;
    throw Error(msg.str());
  }

  StructureTensor c{Tensor3(n), basis.flavor == BasisFlavor::Mixed ? "mixed" : to_string(basis.flavor)};
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const CMatrix br = commutator(basis.elements[a], basis.elements[b]);
      for (int k = 0; k < n; ++k) {
        const double v = kc_inner(basis.elements[k], br);
        c(k, a, b) = v;
        c(k, b, a) = -v;
      }
    }
  return c;
}

/// Largest Frobenius norm of [X_a, X_b] - sum_c C[c][a][b] X_c.
inline double reconstruction_residual(const OperatorBasis & basis, const StructureTensor & c)
{
  double worst = 0.0;
  const int n = basis.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CMatrix diff = commutator(basis.elements[a], basis.elements[b]);
      for (int k = 0; k < n; ++k) diff -= c(k, a, b) * basis.elements[k];
      worst = std::max(worst, diff.norm());
    }
  return worst;
}

/// A basis together with its structure constants. Shared read-only.
struct Frame
{
  OperatorBasis basis;
  StructureTensor constants;

  int dim() const { return basis.size(); }
};

using FramePtr = std::shared_ptr<const Frame>;

inline FramePtr make_frame(OperatorBasis basis, std::string tag = {})
{
  auto c = structure_constants(basis);
  if (!tag.empty()) c.frame_tag = std::move(tag);
  return std::make_shared<const Frame>(Frame{std::move(basis), std::move(c)});
}

namespace detail {
template <typename Build>
FramePtr cached_frame(const std::string & key, Build build)
{
  static std::mutex mu;
  static std::map<std::string, FramePtr> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  FramePtr f = build();
  cache.emplace(key, f);
  return f;
}
}  // namespace detail

inline FramePtr gell_mann_frame(int N)
{
  return detail::cached_frame("gellmann:" + std::to_string(N), [N] { return make_frame(build_gell_mann(N)); });
}

inline FramePtr pauli_frame(int d)
{
  return detail::cached_frame("pauli:" + std::to_string(d), [d] { return make_frame(build_pauli_words(d)); });
}

// ---------------------------------------------------------------------------
// Lie-algebraic invariants

/// max |C[c][a][b] + C[c][b][a]|
inline double bracket_antisymmetry_residual(const StructureTensor & c)
{
  const int n = c.dim();
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) worst = std::max(worst, std::abs(c(k, a, b) + c(k, b, a)));
  return worst;
}

/// max |C[c][a][b] + C[a][c][b]|; with bracket antisymmetry this covers every transposition.
inline double total_antisymmetry_residual(const StructureTensor & c)
{
  const int n = c.dim();
  double worst = bracket_antisymmetry_residual(c);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) worst = std::max(worst, std::abs(c(k, a, b) + c(a, k, b)));
  return worst;
}

inline double jacobi_residual(const StructureTensor & c)
{
  const int n = c.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int f = 0; f < n; ++f) {
          double s = 0.0;
          for (int e = 0; e < n; ++e)
            s += c(e, a, b) * c(f, e, k) + c(e, b, k) * c(f, e, a) + c(e, k, a) * c(f, e, b);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

/// Killing form tr(K_a K_b).
inline Matrix killing_form(const StructureTensor & c)
{
  const int n = c.dim();
  std::vector<Matrix> ads;
  ads.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) ads.push_back(c.ad(a));
  Matrix k(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) k(a, b) = (ads[a] * ads[b]).trace();
  return k;
}

/// Columns e_i for each listed index.
inline Matrix coordinate_span(int n, const std::vector<int> & indices)
{
  Matrix s = Matrix::Zero(n, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= n) throw std::out_of_range("index " + std::to_string(indices[j]) + " outside algebra");
    s(indices[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return s;
}

/// Infinitesimal ad-invariance defect of the inner product `g` (in the frame of `c`)
/// under the span of `generators` (columns, frame coordinates):
/// max over generators O and basis pairs of |g(ad_O A, B) + g(A, ad_O B)|.
inline double check_bi_invariance(const StructureTensor & c, const Matrix & g, const Matrix & generators)
{
  const int n = c.dim();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < generators.cols(); ++j) {
    Matrix ad = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
      if (generators(a, j) != 0.0) ad += generators(a, j) * c.ad(a);
    const Matrix defect = ad.transpose() * g + g * ad;
    worst = std::max(worst, defect.cwiseAbs().maxCoeff());
  }
  return worst;
}

inline double check_bi_invariance(const StructureTensor & c, const Matrix & g, const std::vector<int> & subalgebra)
{
  return check_bi_invariance(c, g, coordinate_span(c.dim(), subalgebra));
}

/// Orthonormal basis (columns) of the orthogonal complement of span(columns of `s`).
inline Matrix orthogonal_complement(const Matrix & s)
{
  const Eigen::Index n = s.rows();
  if (s.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU);
  const Eigen::Index rank = (svd.singularValues().array() > 1e-10).count();
  return svd.matrixU().rightCols(n - rank);
}

/// Checks [R,R] in R, [R,M] in M, [M,M] in R for R = span(columns of `r_span`)
/// and M its Killing-Cartan complement, on structure-constant entries.
inline bool check_cartan_decomposition(const StructureTensor & c, const Matrix & r_span, double tol = kExactTol)
{
  const int n = c.dim();
  const Matrix r = Eigen::HouseholderQR<Matrix>(r_span).householderQ() * Matrix::Identity(n, r_span.cols());
  const Matrix m = orthogonal_complement(r);
  if (r.cols() + m.cols() != n) return false;

  auto bracket = [&](const Vector & x, const Vector & y) {
    Vector out = Vector::Zero(n);
    for (int a = 0; a < n; ++a) {
      if (x[a] == 0.0) continue;
      for (int b = 0; b < n; ++b) {
        if (y[b] == 0.0) continue;
        const double w = x[a] * y[b];
        for (int k = 0; k < n; ++k) out[k] += w * c(k, a, b);
      }
    }
    return out;
  };
  auto stays_in = [&](const Matrix & left, const Matrix & right, const Matrix & target_complement) {
    for (Eigen::Index i = 0; i < left.cols(); ++i)
      for (Eigen::Index j = 0; j < right.cols(); ++j) {
        const Vector br = bracket(left.col(i), right.col(j));
        if (target_complement.cols() > 0 && (target_complement.transpose() * br).cwiseAbs().maxCoeff() > tol) return false;
      }
    return true;
  };
  return stays_in(r, r, m) && stays_in(r, m, r) && stays_in(m, m, m);
}

inline bool check_cartan_decomposition(const StructureTensor & c, const std::vector<int> & r_indices, double tol = kExactTol)
{
  return check_cartan_decomposition(c, coordinate_span(c.dim(), r_indices), tol);
}

/// Results of the full invariant suite on one basis.
struct AlgebraReport
{
  int n_hilbert = 0;
  int dim = 0;
  std::string flavor;
  double gram_defect = 0.0;
  double reconstruction_residual = 0.0;
  double bracket_antisymmetry = 0.0;
  double total_antisymmetry = 0.0;
  double jacobi = 0.0;
  double killing_defect = 0.0;  ///< max |tr(K_a K_b) + N delta_ab|
  bool passed = false;
};

inline AlgebraReport check_algebra(const OperatorBasis & basis, double tol = kExactTol)
{
  AlgebraReport r;
  r.n_hilbert = basis.n_hilbert;
  r.dim = basis.size();
  r.flavor = to_string(basis.flavor);
  r.gram_defect = orthonormality_defect(basis).value;
  const StructureTensor c = structure_constants(basis);
  r.reconstruction_residual = reconstruction_residual(basis, c);
  r.bracket_antisymmetry = bracket_antisymmetry_residual(c);
  r.total_antisymmetry = total_antisymmetry_residual(c);
  r.jacobi = jacobi_residual(c);
  const Matrix k = killing_form(c);
  r.killing_defect = (k + basis.n_hilbert * Matrix::Identity(r.dim, r.dim)).cwiseAbs().maxCoeff();
  r.passed = r.gram_defect < tol && r.reconstruction_residual < tol && r.total_antisymmetry < tol && r.jacobi < tol &&
             r.killing_defect < tol * basis.n_hilbert;
  return r;
}

}  // namespace kaqgeom
