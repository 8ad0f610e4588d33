#pragma once

#include <complex>
#include <vector>

#include "stabkit/system.hpp"

namespace stabkit {

// All eigenvalues of A, sorted by (Re, Im) descending.
std::vector<std::complex<double>> spectrum(const Matrix& A);

// Eigenvalues with Re >= -1e-9 (the tolerance absorbs rounding of genuinely
// zero real parts), with multiplicity, sorted by (Re, Im) descending.
std::vector<std::complex<double>> spectrum_plus(const Matrix& A);

struct HautusVerdict {
  bool stabilizable = true;
  struct Check {
    std::complex<double> eigenvalue;
    int rank = 0;
    int required = 0;
  };
  std::vector<Check> checks;  // one entry per eigenvalue in spectrum_plus(A)
};

// PBH test: stabilizable iff rank[lambda*I - A | B] = n for every lambda in
// spectrum_plus(A). Ranks via complex SVD with cutoff 1e-8 * sigma_max.
HautusVerdict hautus_test(const Matrix& A, const Matrix& B);

struct RankVerdict {
  int rank = 0;
  bool full_row_rank = false;
  std::vector<double> singular_values;
};

// Row rank of [A | B] at the origin; full row rank is the criterion for
// stabilizability by a composition operator with a C1 stationary symbol.
RankVerdict full_row_rank_test(const VectorFieldSpec& sys);
RankVerdict row_rank_verdict(const Matrix& J);

}  // namespace stabkit
