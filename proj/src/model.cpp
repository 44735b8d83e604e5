#include "gnl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "gnl/linalg.hpp"
#include "gnl/rng.hpp"

namespace gnl {

namespace {

constexpr std::uint64_t kTagSubspace = 11;
constexpr std::uint64_t kTagBlock = 12;
constexpr std::uint64_t kTagGlue = 13;

bool entry_pos_less(const Entry& a, const Entry& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

}  // namespace

GridGlue::GridGlue(int d_, std::vector<std::vector<std::pair<int, int>>> c)
    : d(d_), cells(std::move(c)) {
  if (d <= 0) throw std::invalid_argument("GridGlue: dimension must be positive");
  std::vector<char> seen(static_cast<std::size_t>(d) * d, 0);
  std::size_t total = 0;
  for (const auto& cell : cells) {
    if (cell.empty()) throw std::invalid_argument("GridGlue: empty cell");
    for (auto [i, j] : cell) {
      if (i < 0 || i >= d || j < 0 || j >= d)
        throw std::invalid_argument("GridGlue: index out of range");
      auto& flag = seen[static_cast<std::size_t>(i) * d + j];
      if (flag) throw std::invalid_argument("GridGlue: cells overlap");
      flag = 1;
      ++total;
    }
  }
  if (total != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("GridGlue: cells do not cover the grid");
}

CoeffModel::CoeffModel(int rows, int cols, std::vector<std::vector<Entry>> mats)
    : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("CoeffModel: nonpositive shape");
  if (mats.empty())
    throw std::invalid_argument("CoeffModel: family must be nonempty");

  offsets_.reserve(mats.size() + 1);
  offsets_.push_back(0);
  std::size_t total = 0;
  for (const auto& m : mats) total += m.size();
  entries_.reserve(total);

  frob_.reserve(mats.size());
  for (auto& m : mats) {
    std::sort(m.begin(), m.end(), entry_pos_less);
    double f2 = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Entry& e = m[i];
      if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
        throw std::invalid_argument("CoeffModel: entry index out of range");
      if (!std::isfinite(e.val))
        throw std::invalid_argument("CoeffModel: entry value not finite");
      if (i > 0 && m[i - 1].row == e.row && m[i - 1].col == e.col)
        throw std::invalid_argument("CoeffModel: duplicate entry position");
      f2 += e.val * e.val;
      entries_.push_back(e);
    }
    frob_.push_back(std::sqrt(f2));
    offsets_.push_back(static_cast<std::int64_t>(entries_.size()));
  }

  tentries_.reserve(entries_.size());
  for (int k = 0; k < size(); ++k) {
    const auto lo = static_cast<std::size_t>(offsets_[k]);
    const auto hi = static_cast<std::size_t>(offsets_[k + 1]);
    const auto tlo = tentries_.size();
    for (std::size_t i = lo; i < hi; ++i)
      tentries_.push_back({entries_[i].col, entries_[i].row, entries_[i].val});
    std::sort(tentries_.begin() + static_cast<std::int64_t>(tlo),
              tentries_.end(), entry_pos_less);
  }

  compute_flags();
}

void CoeffModel::compute_flags() {
  nonnegative_ = true;
  for (const Entry& e : entries_)
    if (e.val < 0.0) {
      nonnegative_ = false;
      break;
    }

  selfadjoint_ = rows_ == cols_;
  if (selfadjoint_) {
    for (int k = 0; k < size() && selfadjoint_; ++k) {
      auto a = entries(k);
      auto t = entries_transposed(k);
      double maxabs = 0.0;
      for (const Entry& e : a) maxabs = std::max(maxabs, std::abs(e.val));
      const double tol = 1e-12 * (1.0 + maxabs);
      std::size_t i = 0, j = 0;
      while (i < a.size() || j < t.size()) {
        if (i < a.size() && j < t.size() && a[i].row == t[j].row &&
            a[i].col == t[j].col) {
          if (std::abs(a[i].val - t[j].val) > tol) {
            selfadjoint_ = false;
            break;
          }
          ++i, ++j;
        } else {
          const bool take_a =
              j >= t.size() || (i < a.size() && entry_pos_less(a[i], t[j]));
          const double v = take_a ? a[i].val : t[j].val;
          if (std::abs(v) > tol) {
            selfadjoint_ = false;
            break;
          }
          take_a ? ++i : ++j;
        }
      }
    }
  }

  // Pairwise trace inner products via shared positions; families with
  // disjoint supports never touch the accumulation map.
  struct PosEntry {
    std::int64_t pos;
    std::int32_t k;
    double val;
  };
  std::vector<PosEntry> by_pos;
  by_pos.reserve(entries_.size());
  for (int k = 0; k < size(); ++k)
    for (const Entry& e : entries(k))
      by_pos.push_back(
          {static_cast<std::int64_t>(e.row) * cols_ + e.col, k, e.val});
  std::sort(by_pos.begin(), by_pos.end(), [](const auto& a, const auto& b) {
    return a.pos != b.pos ? a.pos < b.pos : a.k < b.k;
  });

  std::unordered_map<std::uint64_t, double> cross;
  for (std::size_t lo = 0; lo < by_pos.size();) {
    std::size_t hi = lo + 1;
    while (hi < by_pos.size() && by_pos[hi].pos == by_pos[lo].pos) ++hi;
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = i + 1; j < hi; ++j) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(by_pos[i].k) << 32) |
            static_cast<std::uint32_t>(by_pos[j].k);
        cross[key] += by_pos[i].val * by_pos[j].val;
      }
    lo = hi;
  }

  orthogonal_ = true;
  for (const auto& [key, g] : cross) {
    const int k1 = static_cast<int>(key >> 32);
    const int k2 = static_cast<int>(key & 0xffffffffu);
    if (std::abs(g) > 1e-10 * frob_[k1] * frob_[k2]) {
      orthogonal_ = false;
      break;
    }
  }
}

std::span<const Entry> CoeffModel::entries(int k) const {
  return {entries_.data() + offsets_[k],
          static_cast<std::size_t>(offsets_[k + 1] - offsets_[k])};
}

std::span<const Entry> CoeffModel::entries_transposed(int k) const {
  return {tentries_.data() + offsets_[k],
          static_cast<std::size_t>(offsets_[k + 1] - offsets_[k])};
}

Eigen::MatrixXd CoeffModel::coeff(int k) const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows_, cols_);
  for (const Entry& e : entries(k)) a(e.row, e.col) = e.val;
  return a;
}

std::vector<Eigen::MatrixXd> CoeffModel::dense_coeffs() const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int k = 0; k < size(); ++k) out.push_back(coeff(k));
  return out;
}

double CoeffModel::max_frobenius() const {
  return *std::max_element(frob_.begin(), frob_.end());
}

namespace {

// sum_k M_k^T M_k over row-contiguous entry spans.
Eigen::MatrixXd gram_of(const std::vector<Entry>& all,
                        const std::vector<std::int64_t>& offsets, int n,
                        int dim) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    std::size_t lo = static_cast<std::size_t>(offsets[k]);
    const std::size_t end = static_cast<std::size_t>(offsets[k + 1]);
    while (lo < end) {
      std::size_t hi = lo + 1;
      while (hi < end && all[hi].row == all[lo].row) ++hi;
      for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = lo; j < hi; ++j)
          g(all[i].col, all[j].col) += all[i].val * all[j].val;
      lo = hi;
    }
  }
  return g;
}

}  // namespace

Eigen::MatrixXd CoeffModel::gram_col() const {
  return gram_of(entries_, offsets_, size(), cols_);
}

Eigen::MatrixXd CoeffModel::gram_row() const {
  return gram_of(tentries_, offsets_, size(), rows_);
}

Eigen::MatrixXd CoeffModel::sample(std::uint64_t seed) const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int k = 0; k < size(); ++k) {
    const double g = rng::normal(seed, static_cast<std::uint64_t>(k));
    for (const Entry& e : entries(k)) x(e.row, e.col) += g * e.val;
  }
  return x;
}

Eigen::MatrixXd CoeffModel::covariance_apply(const Eigen::MatrixXd& b) const {
  if (b.rows() != rows_ || b.cols() != cols_)
    throw std::invalid_argument("covariance_apply: shape mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int k = 0; k < size(); ++k) {
    double c = 0.0;
    for (const Entry& e : entries(k)) c += e.val * b(e.row, e.col);
    for (const Entry& e : entries(k)) out(e.row, e.col) += c * e.val;
  }
  return out;
}

CoeffModel build_model(const std::vector<Eigen::MatrixXd>& coeffs) {
  if (coeffs.empty())
    throw std::invalid_argument("build_model: family must be nonempty");
  const int rows = static_cast<int>(coeffs[0].rows());
  const int cols = static_cast<int>(coeffs[0].cols());
  std::vector<std::vector<Entry>> mats;
  mats.reserve(coeffs.size());
  for (const auto& a : coeffs) {
    if (a.rows() != rows || a.cols() != cols)
      throw std::invalid_argument("build_model: inconsistent shapes");
    std::vector<Entry> m;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (a(i, j) != 0.0)
          m.push_back({i, j, a(i, j)});
    mats.push_back(std::move(m));
  }
  return CoeffModel(rows, cols, std::move(mats));
}

CoeffModel selfadjoint_dilation(const CoeffModel& m) {
  const int r = m.rows();
  const int n = m.size();
  std::vector<std::vector<Entry>> mats(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto span = m.entries(k);
    auto& out = mats[static_cast<std::size_t>(k)];
    out.reserve(2 * span.size());
    for (const Entry& e : span) {
      out.push_back({e.row, r + e.col, e.val});
      out.push_back({r + e.col, e.row, e.val});
    }
  }
  return CoeffModel(r + m.cols(), r + m.cols(), std::move(mats));
}

GridGlue random_grid_glue(int d, int r, std::uint64_t seed) {
  if (d <= 0 || r <= 0)
    throw std::invalid_argument("random_grid_glue: nonpositive parameter");
  const std::int64_t total = static_cast<std::int64_t>(d) * d;
  if (total % r != 0)
    throw std::invalid_argument(
        "random_grid_glue: cell size must divide the grid size");
  std::vector<std::int64_t> pos(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) pos[static_cast<std::size_t>(i)] = i;
  const std::uint64_t key = rng::derive(seed, kTagGlue);
  for (std::int64_t i = total - 1; i > 0; --i) {
    const std::int64_t j = static_cast<std::int64_t>(
        rng::word(key, static_cast<std::uint64_t>(i)) %
        static_cast<std::uint64_t>(i + 1));
    std::swap(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);
  }
  std::vector<std::vector<std::pair<int, int>>> cells;
  cells.reserve(static_cast<std::size_t>(total / r));
  for (std::int64_t c = 0; c < total / r; ++c) {
    std::vector<std::pair<int, int>> cell;
    cell.reserve(static_cast<std::size_t>(r));
    for (std::int64_t t = c * r; t < (c + 1) * r; ++t) {
      const std::int64_t p = pos[static_cast<std::size_t>(t)];
      cell.emplace_back(static_cast<int>(p / d), static_cast<int>(p % d));
    }
    cells.push_back(std::move(cell));
  }
  return GridGlue(d, std::move(cells));
}

namespace {

CoeffModel gen_iid(int d) {
  if (d <= 0) throw std::invalid_argument("gen_named: d must be positive");
  std::vector<std::vector<Entry>> mats;
  mats.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) mats.push_back({{i, j, 1.0}});
  return CoeffModel(d, d, std::move(mats));
}

CoeffModel gen_diagonal(int d) {
  if (d <= 0) throw std::invalid_argument("gen_named: d must be positive");
  std::vector<std::vector<Entry>> mats;
  mats.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) mats.push_back({{i, i, 1.0}});
  return CoeffModel(d, d, std::move(mats));
}

CoeffModel gen_subspace(int d, int dim, std::uint64_t seed) {
  if (d <= 0) throw std::invalid_argument("gen_named: d must be positive");
  if (dim < 1 || dim > d * d)
    throw std::invalid_argument("gen_named: subspace dim must be in [1, d^2]");
  const Eigen::MatrixXd g =
      gaussian_matrix(d * d, dim, rng::derive(seed, kTagSubspace));
  const Eigen::MatrixXd q = orthonormal_columns(g);
  std::vector<Eigen::MatrixXd> coeffs;
  coeffs.reserve(static_cast<std::size_t>(dim));
  for (int m = 0; m < dim; ++m)
    coeffs.push_back(
        Eigen::Map<const Eigen::MatrixXd>(q.col(m).data(), d, d));
  return build_model(coeffs);
}

CoeffModel gen_block(int d, int r, std::uint64_t seed,
                     const std::vector<Eigen::MatrixXd>& blocks) {
  if (d <= 0 || r <= 0)
    throw std::invalid_argument("gen_named: block grid and size must be positive");
  std::vector<std::vector<Entry>> mats;
  mats.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd b;
      if (!blocks.empty()) {
        const auto idx = static_cast<std::size_t>(i) * d + j;
        if (blocks.size() != static_cast<std::size_t>(d) * d)
          throw std::invalid_argument("gen_named: need d*d blocks");
        if (blocks[idx].rows() != r || blocks[idx].cols() != r)
          throw std::invalid_argument("gen_named: block shape mismatch");
        b = blocks[idx];
      } else {
        b = gaussian_matrix(
            r, r,
            rng::derive(rng::derive(seed, kTagBlock),
                        static_cast<std::uint64_t>(i) * d + j));
      }
      std::vector<Entry> m;
      m.reserve(static_cast<std::size_t>(r) * r);
      for (int a = 0; a < r; ++a)
        for (int c = 0; c < r; ++c)
          if (b(a, c) != 0.0) m.push_back({i * r + a, j * r + c, b(a, c)});
      mats.push_back(std::move(m));
    }
  return CoeffModel(d * r, d * r, std::move(mats));
}

CoeffModel gen_indep_rows(const std::vector<Eigen::MatrixXd>& covs) {
  if (covs.empty())
    throw std::invalid_argument("gen_named: indep_rows needs covariances");
  const int d1 = static_cast<int>(covs.size());
  const int d2 = static_cast<int>(covs[0].rows());
  std::vector<std::vector<Entry>> mats;
  mats.reserve(static_cast<std::size_t>(d1) * d2);
  for (int i = 0; i < d1; ++i) {
    if (covs[i].rows() != d2 || covs[i].cols() != d2)
      throw std::invalid_argument("gen_named: covariance shape mismatch");
    auto [v, lam] = psd_eigs(covs[static_cast<std::size_t>(i)]);
    for (int j = 0; j < d2; ++j) {
      std::vector<Entry> m;
      const double s = std::sqrt(lam(j));
      if (s > 0.0) {
        m.reserve(static_cast<std::size_t>(d2));
        for (int c = 0; c < d2; ++c)
          if (v(c, j) != 0.0) m.push_back({i, c, s * v(c, j)});
      }
      mats.push_back(std::move(m));
    }
  }
  return CoeffModel(d1, d2, std::move(mats));
}

CoeffModel model_from_glue(const GridGlue& glue) {
  std::vector<std::vector<Entry>> mats;
  mats.reserve(glue.cells.size());
  for (const auto& cell : glue.cells) {
    std::vector<Entry> m;
    m.reserve(cell.size());
    for (auto [i, j] : cell) m.push_back({i, j, 1.0});
    mats.push_back(std::move(m));
  }
  return CoeffModel(glue.d, glue.d, std::move(mats));
}

CoeffModel gen_perm_glued(int d, int r) {
  if (d <= 0 || r <= 0)
    throw std::invalid_argument("gen_named: d and r must be positive");
  if (r > d || d % r != 0)
    throw std::invalid_argument("gen_named: perm_glued needs r | d");
  std::vector<std::vector<std::pair<int, int>>> cells;
  cells.reserve(static_cast<std::size_t>(d) * (d / r));
  for (int s = 0; s < d; ++s)
    for (int g = 0; g < d / r; ++g) {
      std::vector<std::pair<int, int>> cell;
      cell.reserve(static_cast<std::size_t>(r));
      for (int i = g * r; i < (g + 1) * r; ++i)
        cell.emplace_back(i, (i + s) % d);
      cells.push_back(std::move(cell));
    }
  return model_from_glue(GridGlue(d, std::move(cells)));
}

CoeffModel gen_circulant(int d) {
  if (d <= 0) throw std::invalid_argument("gen_named: d must be positive");
  std::vector<std::vector<Entry>> mats;
  mats.reserve(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) {
    std::vector<Entry> m;
    m.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) m.push_back({i, (i - k % d + d) % d, 1.0});
    mats.push_back(std::move(m));
  }
  return CoeffModel(d, d, std::move(mats));
}

CoeffModel gen_toeplitz(int d) {
  if (d <= 0) throw std::invalid_argument("gen_named: d must be positive");
  std::vector<std::vector<Entry>> mats;
  mats.reserve(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) {
    const int off = k - 1;
    std::vector<Entry> m;
    for (int i = 0; i < d; ++i) {
      if (i - off >= 0) m.push_back({i, i - off, 1.0});
      if (off > 0 && i + off < d) m.push_back({i, i + off, 1.0});
    }
    mats.push_back(std::move(m));
  }
  return CoeffModel(d, d, std::move(mats));
}

}  // namespace

CoeffModel gen_named(const std::string& name, const GenParams& p) {
  if (name == "iid") return gen_iid(p.d);
  if (name == "diagonal") return gen_diagonal(p.d);
  if (name == "subspace") return gen_subspace(p.d, p.dim, p.seed);
  if (name == "block") return gen_block(p.d, p.r, p.seed, p.blocks);
  if (name == "indep_rows") return gen_indep_rows(p.covariances);
  if (name == "glued") {
    if (!p.cells.empty()) return model_from_glue(GridGlue(p.d, p.cells));
    return model_from_glue(random_grid_glue(p.d, p.r, p.seed));
  }
  if (name == "perm_glued") return gen_perm_glued(p.d, p.r);
  if (name == "circulant") return gen_circulant(p.d);
  if (name == "toeplitz") return gen_toeplitz(p.d);
  throw std::invalid_argument(
      "gen_named: unknown family '" + name +
      "' (expected iid, diagonal, subspace, block, indep_rows, glued, "
      "perm_glued, circulant, toeplitz)");
}

}  // namespace gnl
