#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "kaqgeom/algebra.hpp"

namespace kaqgeom {

/// One translation row: sum_l c_l G_l = (1/2) i P, with G_l Gell-Mann letters
/// and P a two-qubit Pauli word.
struct DictionaryRow
{
  std::vector<std::pair<std::string, double>> tabulated;///< coefficients as tabulated
  std::vector<std::pair<std::string, double>> terms;    ///< coefficients after validation
  std::string word;                                     ///< site letters, e.g. "IY"
  bool corrected = false;                               ///< tabulated coefficients failed the identity
  double tabulated_residual = 0.0;                        ///< Frobenius norm of the tabulated identity defect
  double residual = 0.0;                                ///< defect after validation

  std::string lhs() const
  {
    std::string out;
    char buf[64];
    for (const auto & [label, c] : terms) {
      std::snprintf(buf, sizeof buf, "%s%.6f*%s", out.empty() ? "" : (c < 0 ? " " : " +"), c, label.c_str());
      out += buf;
    }
    return out;
  }
};

namespace detail {

struct RawRow
{
  std::vector<std::pair<std::string, double>> terms;
  const char * word;
};

inline const std::vector<RawRow> & raw_dictionary()
{
  const double r13 = std::sqrt(1.0 / 3.0);
  const double r23 = std::sqrt(2.0 / 3.0);
  const double r43 = std::sqrt(4.0 / 3.0);
  static const std::vector<RawRow> rows = {
      {{{"A1", 1}, {"A6", 1}}, "IY"},
      {{{"A1", 1}, {"A6", -1}}, "ZY"},
      {{{"A2", 1}, {"A5", 1}}, "YI"},
      {{{"A2", 1}, {"A5", -1}}, "YZ"},
      {{{"A3", 1}, {"A4", 1}}, "YX"},
      {{{"A3", 1}, {"A4", -1}}, "XY"},
      {{{"S1", 1}, {"S6", 1}}, "IX"},
      {{{"S1", 1}, {"S6", -1}}, "ZX"},
      {{{"S2", 1}, {"S5", 1}}, "XI"},
      {{{"S2", 1}, {"S5", -1}}, "XZ"},
      {{{"S3", 1}, {"S4", 1}}, "XX"},
      {{{"S4", 1}, {"S3", -1}}, "YY"},
      {{{"D1", 1}, {"D2", -r13}, {"D3", r23}}, "IZ"},
      {{{"D1", 1}, {"D2", r13}, {"D3", -r23}}, "ZZ"},
      // One of the two published listings for Z1 carries sqrt(1/3) on D3.
      {{{"D1", 0}, {"D2", r43}, {"D3", r13}}, "ZI"},
  };
  return rows;
}

inline CMatrix row_lhs(const OperatorBasis & gm, const std::vector<std::pair<std::string, double>> & terms)
{
  CMatrix m = CMatrix::Zero(gm.n_hilbert, gm.n_hilbert);
  for (const auto & [label, c] : terms) m += c * gm.elements[static_cast<std::size_t>(gm.index_of(label))];
  return m;
}

inline CMatrix row_rhs(const std::string & word)
{
  return std::complex<double>(0.0, 0.5) * pauli_string(word);
}

}  // namespace detail

/// The 15 Gell-Mann to Pauli-word translation rows for su(4), each checked as
/// a matrix identity. Rows whose tabulated coefficients fail are replaced by
/// the Killing-Cartan projection of the word onto the same letters; if that
/// projection still leaves a defect the two conventions are incompatible and
/// an Error is thrown.
inline std::vector<DictionaryRow> dictionary(double tol = kExactTol)
{
  const OperatorBasis gm = build_gell_mann(4);
  std::vector<DictionaryRow> out;
  for (const auto & raw : detail::raw_dictionary()) {
    DictionaryRow row;
    row.tabulated = raw.terms;
    row.word = raw.word;
    const CMatrix rhs = detail::row_rhs(row.word);
    row.tabulated_residual = (detail::row_lhs(gm, row.tabulated) - rhs).norm();
    row.terms = row.tabulated;
    if (row.tabulated_residual > tol) {
      row.corrected = true;
      for (auto & [label, c] : row.terms) c = kc_inner(gm.elements[static_cast<std::size_t>(gm.index_of(label))], rhs);
    }
    row.residual = (detail::row_lhs(gm, row.terms) - rhs).norm();
    if (row.residual > tol)
      throw Error("dictionary row for " + pauli_label(row.word) + " cannot be realized over its Gell-Mann letters (defect " +
                  std::to_string(row.residual) + ")");
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace kaqgeom
