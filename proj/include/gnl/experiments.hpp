#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gnl/bounds.hpp"
#include "gnl/model.hpp"

namespace gnl {

/// One CSV row: bound parameters next to the Monte Carlo norm statistics.
struct ExperimentRow {
  std::string family;
  int d = 0;
  long n = 0;        // family size of the reported model
  double param = 0;  // family-specific knob (dim, r, d1, ...), 0 if unused
  BoundReport report;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  std::uint64_t seed = 0;
};

/// Knobs shared by all experiment families; each family reads the fields it
/// understands and ignores the rest.
struct RunConfig {
  std::vector<int> dims;
  long n_samples = 0;  // 0: default per dimension
  std::uint64_t seed = 0;
  double eps = 0.1;
  int restarts = 32;
  int threads = 1;
  int r = 2;    // glued / perm_glued cell size, block size
  int dim = 0;  // subspace: 0 picks round(d^1.5)
  int d1 = 0;   // sample_cov: row count, 0 picks d
  std::vector<std::pair<double, Eigen::MatrixXd>> mixture;  // sample_cov
};

struct RunResult {
  std::vector<ExperimentRow> rows;
  /// Human-readable caveats (for example, parameters falling between a
  /// proven threshold and a conjectured one). Deterministic.
  std::vector<std::string> notes;
};

/// Model for one (family, dimension) cell plus the family-specific knob
/// actually used (subspace dim, cell size, ...).
struct FamilyCell {
  CoeffModel model;
  double param = 0.0;
};

/// Builds the model a direct-sampling experiment family uses at dimension d
/// (not valid for the sample_cov families, which have no single model).
FamilyCell build_family_cell(const std::string& name, int d,
                             const RunConfig& cfg);

/// Named experiment suites. Families: diagonal, iid, subspace, glued,
/// perm_glued, circulant, toeplitz, block, indep_rows, sample_cov,
/// sample_cov_counterexample. One row per dimension in config.dims.
RunResult run_example(const std::string& name, const RunConfig& config);

/// Everything the sample-covariance experiments measure: statistics of
/// ||Y|| and ||Y - EY|| for Y = sum_i z_i z_i^T with z_i = B_{J_i}^{1/2} g_i
/// and the two bound shapes they are compared against.
struct SampleCovStats {
  double mean_norm = 0.0;
  double stderr_norm = 0.0;
  double mean_centered = 0.0;
  double stderr_centered = 0.0;
  double rhs_sharp = 0.0;      // d1 ||mean B|| + E max_i Tr(B_{J_i})
  double norm_term = 0.0;      // d1 ||mean B||
  double trace_term = 0.0;     // E max_i Tr(B_{J_i}) (exact)
  double rhs_aggregate = 0.0;  // samplecov_bound of the annealed row models
  long n_samples = 0;
  std::uint64_t seed = 0;
};

SampleCovStats sample_cov_stats(
    int d1, int d2, const std::vector<std::pair<double, Eigen::MatrixXd>>& mixture,
    long n_samples, std::uint64_t seed, double eps, int threads = 1);

/// Mixture placing all weight on the identity.
std::vector<std::pair<double, Eigen::MatrixXd>> identity_mixture(int d2);
/// Uniform mixture over the rank-one projections e_j e_j^T.
std::vector<std::pair<double, Eigen::MatrixXd>> coordinate_mixture(int d2);

std::string csv_header();
std::string csv_line(const ExperimentRow& row);

/// Appends rows to `path` under the fixed 16-column header (header written
/// when the file is new or empty); one buffered write per call.
void emit_csv(const std::vector<ExperimentRow>& rows,
              const std::filesystem::path& path);

}  // namespace gnl
