#include "stabkit/linear_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

#include "stabkit/errors.hpp"

namespace stabkit {

namespace {

constexpr double kRealPartTol = 1e-9;
constexpr double kRankCutoff = 1e-8;  // relative to sigma_max

void sort_desc(std::vector<std::complex<double>>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

template <typename MatrixType>
int rank_from_singular_values(const MatrixType& M, std::vector<double>* out_sigma = nullptr) {
  Eigen::JacobiSVD<MatrixType> svd(M);
  const auto& sigma = svd.singularValues();
  if (out_sigma) out_sigma->assign(sigma.data(), sigma.data() + sigma.size());
  if (sigma.size() == 0) return 0;
  double cutoff = kRankCutoff * sigma[0];
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > cutoff && sigma[i] > 0) ++rank;
  return rank;
}

}  // namespace

std::vector<std::complex<double>> spectrum(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectrum requires a square matrix");
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericFailure("eigensolver did not converge");
  std::vector<std::complex<double>> out(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());
  sort_desc(out);
  return out;
}

std::vector<std::complex<double>> spectrum_plus(const Matrix& A) {
  std::vector<std::complex<double>> out;
  for (const auto& l : spectrum(A))
    if (l.real() >= -kRealPartTol) out.push_back(l);
  return out;
}

HautusVerdict hautus_test(const Matrix& A, const Matrix& B) {
  const int n = static_cast<int>(A.rows());
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw std::invalid_argument("hautus_test dimension mismatch");
  HautusVerdict verdict;
  for (const auto& lambda : spectrum_plus(A)) {
    Eigen::MatrixXcd M(n, n + B.cols());
    M.leftCols(n) = lambda * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
    M.rightCols(B.cols()) = B.cast<std::complex<double>>();
    int rank = rank_from_singular_values(M);
    verdict.checks.push_back({lambda, rank, n});
    if (rank < n) verdict.stabilizable = false;
  }
  return verdict;
}

RankVerdict row_rank_verdict(const Matrix& J) {
  RankVerdict v;
  v.rank = rank_from_singular_values(J, &v.singular_values);
  v.full_row_rank = (v.rank == J.rows());
  return v;
}

RankVerdict full_row_rank_test(const VectorFieldSpec& sys) {
  Linearization lin = linearize(sys);
  Matrix J(sys.state_dim, sys.state_dim + sys.control_dim);
  J.leftCols(sys.state_dim) = lin.A;
  J.rightCols(sys.control_dim) = lin.B;
  return row_rank_verdict(J);
}

}  // namespace stabkit
