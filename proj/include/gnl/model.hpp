#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gnl {

/// One stored coefficient entry: A_k(row, col) = val.
struct Entry {
  std::int32_t row = 0;
  std::int32_t col = 0;
  double val = 0.0;
};

/// Partition of the d x d index grid into cells; entries glued to the same
/// cell share one Gaussian. Cells may have unequal sizes.
struct GridGlue {
  int d = 0;
  std::vector<std::vector<std::pair<int, int>>> cells;

  GridGlue() = default;
  /// Validates that the cells are nonempty, in range, disjoint, and cover
  /// the whole grid; throws std::invalid_argument otherwise.
  GridGlue(int d, std::vector<std::vector<std::pair<int, int>>> cells);
};

/// Finite family of deterministic coefficient matrices A_1..A_n defining the
/// Gaussian model X = sum_k g_k A_k with i.i.d. standard normals g_k.
///
/// Entries are held in a compressed per-matrix list sorted by (row, col);
/// dense views are materialized on demand. The structural flags are always
/// recomputed from the entries, never taken from input.
class CoeffModel {
 public:
  /// Builds from per-matrix entry lists. Entries must be finite, in range,
  /// and free of duplicate positions within one matrix.
  CoeffModel(int rows, int cols, std::vector<std::vector<Entry>> mats);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  /// Number of coefficient matrices n.
  int size() const { return static_cast<int>(offsets_.size()) - 1; }

  /// True when every pair satisfies |Tr(A_i A_j^T)| <= 1e-10 ||A_i||_F ||A_j||_F.
  bool orthogonal_family() const { return orthogonal_; }
  /// True when the model is square and every A_k equals its transpose.
  bool selfadjoint_family() const { return selfadjoint_; }
  /// True when no stored entry is negative.
  bool nonnegative_entries() const { return nonnegative_; }

  /// Entries of A_k sorted by (row, col).
  std::span<const Entry> entries(int k) const;
  /// Entries of A_k^T sorted by (row, col); rows/cols already swapped.
  std::span<const Entry> entries_transposed(int k) const;

  Eigen::MatrixXd coeff(int k) const;
  std::vector<Eigen::MatrixXd> dense_coeffs() const;

  double frobenius(int k) const { return frob_[static_cast<std::size_t>(k)]; }
  double max_frobenius() const;

  /// sum_k A_k^T A_k (cols x cols).
  Eigen::MatrixXd gram_col() const;
  /// sum_k A_k A_k^T (rows x rows).
  Eigen::MatrixXd gram_row() const;

  /// One draw of X = sum_k g_k A_k. The k-th Gaussian is normal deviate k of
  /// the counter stream keyed by `seed`, so draws are bit-identical for a
  /// given (seed, model) on any platform with IEEE doubles.
  Eigen::MatrixXd sample(std::uint64_t seed) const;

  /// Covariance action B |-> sum_k Tr(B A_k^T) A_k. B must have the model's
  /// shape.
  Eigen::MatrixXd covariance_apply(const Eigen::MatrixXd& b) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Entry> entries_;       // concatenated, sorted per matrix
  std::vector<Entry> tentries_;      // same for the transposed matrices
  std::vector<std::int64_t> offsets_;  // size n + 1
  std::vector<double> frob_;
  bool orthogonal_ = false;
  bool selfadjoint_ = false;
  bool nonnegative_ = false;

  void compute_flags();
};

/// Builds a model from dense coefficient matrices (uniform shape required).
CoeffModel build_model(const std::vector<Eigen::MatrixXd>& coeffs);

/// Self-adjoint dilation: each A_k maps to [[0, A_k], [A_k^T, 0]] of size
/// (rows + cols). Frobenius norms scale by sqrt(2); orthogonality of the
/// family is preserved.
CoeffModel selfadjoint_dilation(const CoeffModel& m);

/// Equal-size random partition of the d x d grid into cells of size r
/// (requires r | d^2); used by the glued ensemble.
GridGlue random_grid_glue(int d, int r, std::uint64_t seed);

/// Parameters for gen_named. Unused fields are ignored by each family.
struct GenParams {
  int d = 0;     ///< ambient dimension
  int dim = 0;   ///< subspace: number of orthonormal coefficients
  int r = 0;     ///< cell size (glued, perm_glued) or block size (block)
  int d1 = 0;    ///< indep_rows: number of rows
  std::uint64_t seed = 0;
  std::vector<std::vector<std::pair<int, int>>> cells;  ///< glued: explicit cells
  std::vector<Eigen::MatrixXd> covariances;  ///< indep_rows: row covariances
  std::vector<Eigen::MatrixXd> blocks;       ///< block: d*d blocks, row-major
};

/// Named ensembles:
///   iid        d x d, one unit entry per matrix (n = d^2)
///   diagonal   e_i e_i^T (n = d)
///   subspace   `dim` orthonormalized Gaussian d x d matrices
///   block      d x d grid of r x r blocks; given or seeded Gaussian blocks
///   indep_rows rows with covariances B_1..B_d1 (each cols x cols PSD)
///   glued      indicator matrices of a grid partition (params.cells or a
///              seeded random equal-size partition with cell size r)
///   perm_glued partial-permutation cells of size r (requires r | d)
///   circulant  powers of the cyclic shift, n = d
///   toeplitz   indicators of the diagonals |i - j| = k - 1, n = d
CoeffModel gen_named(const std::string& name, const GenParams& params);

}  // namespace gnl
