#pragma once

#include <utility>
#include <vector>

#include "rvcop/common.hpp"

namespace rvcop {

/// Coordinate system for vech vectors: entries of the upper-triangular
/// Cholesky factor, or entries of the symmetric matrix logarithm.
enum class Coord { cholesky, logmatrix };

const char* coord_name(Coord c);
Coord coord_from_name(const std::string& name);

/// Half-vectorization of an n x n upper triangle, column-major:
/// position 0 = (0,0), 1 = (0,1), 2 = (1,1), 3 = (0,2), ...
/// All modules share this ordering; diagonal entries sit at positions
/// {0, 2, 5, 9, 14, 20, ...} = j(j+3)/2.
int vech_size(int n);
int vech_dim(int m);  // inverse of vech_size; throws DataError if not triangular
int vech_index(int i, int j);
std::pair<int, int> vech_entry(int k);
std::vector<int> diagonal_vech_indices(int n);

struct VechVector {
  Coord coord;
  Vector values;
  int dim() const { return vech_dim(static_cast<int>(values.size())); }
};

/// Warning counters accumulated by the transforms. None of these conditions
/// is fatal; callers that care pass a struct and inspect it.
struct TransformStats {
  int eigenvalue_clamps = 0;  // logm_vech hit the eigenvalue floor
  int diagonal_repairs = 0;   // unvech_chol flipped a non-positive diagonal
};

/// Validates symmetry (1e-12 relative) and positive definiteness.
/// Throws NumericError with a diagnostic if the matrix fails.
void require_spd(const Matrix& g, const char* what);

/// Upper-triangular P with positive diagonal and P'P = g, half-vectorized.
VechVector chol_vech(const Matrix& g);

/// Inverse of chol_vech: rebuilds P and returns P'P. Non-positive diagonal
/// entries are replaced by their absolute value (counted in stats).
Matrix unvech_chol(const VechVector& x, TransformStats* stats = nullptr);

/// vech of the symmetric matrix logarithm Q log(L) Q'. Eigenvalues below
/// 1e-12 * lambda_max are clamped to the floor (counted in stats).
VechVector logm_vech(const Matrix& g, TransformStats* stats = nullptr);

/// Symmetric matrix exponential of the unvech'd input; SPD for any real
/// symmetric argument.
Matrix expm_vech(const VechVector& a);

/// Plain symmetric (un)vectorization helpers sharing the same ordering.
Vector vech_sym(const Matrix& s);
Matrix unvech_sym(const Vector& v);

/// Reconstructs an SPD matrix from either coordinate system.
Matrix reconstruct_spd(const VechVector& x, TransformStats* stats = nullptr);

/// Transforms an SPD matrix into the requested coordinates.
VechVector to_coord(const Matrix& g, Coord coord, TransformStats* stats = nullptr);

}  // namespace rvcop
