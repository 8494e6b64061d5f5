#include "rvcop/matxform.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace rvcop {

const char* coord_name(Coord c) {
  return c == Coord::cholesky ? "cholesky" : "logmatrix";
}

Coord coord_from_name(const std::string& name) {
  if (name == "cholesky") return Coord::cholesky;
  if (name == "logmatrix") return Coord::logmatrix;
  throw DataError("unknown coordinate system '" + name + "' (expected cholesky or logmatrix)");
}

int vech_size(int n) { return n * (n + 1) / 2; }

int vech_dim(int m) {
  const int n = static_cast<int>(std::floor((std::sqrt(8.0 * m + 1.0) - 1.0) / 2.0 + 0.5));
  if (n < 1 || vech_size(n) != m)
    throw DataError("vech length " + std::to_string(m) + " is not a triangular number");
  return n;
}

int vech_index(int i, int j) { return j * (j + 1) / 2 + i; }

std::pair<int, int> vech_entry(int k) {
  int j = static_cast<int>(std::floor((std::sqrt(8.0 * k + 1.0) - 1.0) / 2.0));
  while (vech_index(0, j + 1) <= k) ++j;
  while (vech_index(0, j) > k) --j;
  return {k - vech_index(0, j), j};
}

std::vector<int> diagonal_vech_indices(int n) {
  std::vector<int> idx(n);
  for (int j = 0; j < n; ++j) idx[j] = vech_index(j, j);
  return idx;
}

void require_spd(const Matrix& g, const char* what) {
  if (g.rows() != g.cols() || g.rows() < 1)
    throw NumericError(std::string(what) + ": matrix is not square");
  const double scale = g.cwiseAbs().maxCoeff();
  const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale)
    throw NumericError(std::string(what) + ": asymmetry " + std::to_string(asym / scale) +
                       " exceeds 1e-12 relative tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo > 0.0))
    throw NumericError(std::string(what) + ": not positive definite (min eigenvalue " +
                       std::to_string(lo) + ")");
}

VechVector chol_vech(const Matrix& g) {
  require_spd(g, "chol_vech");
  const int n = static_cast<int>(g.rows());
  // g = L L' with L lower; P = L' is the upper factor with P'P = g.
  Eigen::LLT<Matrix> llt(Matrix((g + g.transpose()) / 2.0));
  if (llt.info() != Eigen::Success)
    throw NumericError("chol_vech: Cholesky factorization failed");
  Matrix P = llt.matrixL().transpose();
  Vector v(vech_size(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) v[vech_index(i, j)] = P(i, j);
  return VechVector{Coord::cholesky, std::move(v)};
}

Matrix unvech_chol(const VechVector& x, TransformStats* stats) {
  const int n = x.dim();
  Matrix P = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      double value = x.values[vech_index(i, j)];
      if (i == j && !(value > 0.0)) {
        value = std::fabs(value);
        if (value == 0.0) value = 1e-12;
        if (stats) ++stats->diagonal_repairs;
      }
      P(i, j) = value;
    }
  }
  return P.transpose() * P;
}

VechVector logm_vech(const Matrix& g, TransformStats* stats) {
  require_spd(g, "logm_vech");
  const int n = static_cast<int>(g.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((g + g.transpose()) / 2.0));
  Vector lam = es.eigenvalues();
  const double floor = 1e-12 * lam.maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (lam[i] < floor) {
      lam[i] = floor;
      if (stats) ++stats->eigenvalue_clamps;
    }
    lam[i] = std::log(lam[i]);
  }
  Matrix a = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return VechVector{Coord::logmatrix, vech_sym(a)};
}

Matrix expm_vech(const VechVector& a) {
  Matrix s = unvech_sym(a.values);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  Vector lam = es.eigenvalues().array().exp();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Vector vech_sym(const Matrix& s) {
  const int n = static_cast<int>(s.rows());
  Vector v(vech_size(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) v[vech_index(i, j)] = s(i, j);
  return v;
}

Matrix unvech_sym(const Vector& v) {
  const int n = vech_dim(static_cast<int>(v.size()));
  Matrix s(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) s(i, j) = s(j, i) = v[vech_index(i, j)];
  return s;
}

Matrix reconstruct_spd(const VechVector& x, TransformStats* stats) {
  return x.coord == Coord::cholesky ? unvech_chol(x, stats) : expm_vech(x);
}

VechVector to_coord(const Matrix& g, Coord coord, TransformStats* stats) {
  return coord == Coord::cholesky ? chol_vech(g) : logm_vech(g, stats);
}

}  // namespace rvcop
