#include "gnl/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gnl/linalg.hpp"
#include "gnl/parallel.hpp"
#include "gnl/rng.hpp"

namespace gnl {

namespace {

constexpr std::uint64_t kTagVfrob = 31;
constexpr std::uint64_t kTagSigmaStar = 32;

double psd_top_eig(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

// Images u_k = M_k v for the whole family, stored as compressed
// (index, value) runs; M_k is A_k or A_k^T.
struct FamilyImage {
  std::vector<int> idx;
  std::vector<double> val;
  std::vector<std::int64_t> off;  // size n + 1
};

void apply_family(const CoeffModel& m, const Eigen::VectorXd& v,
                  bool transposed, FamilyImage& u) {
  u.idx.clear();
  u.val.clear();
  u.off.assign(1, 0);
  for (int k = 0; k < m.size(); ++k) {
    auto span = transposed ? m.entries_transposed(k) : m.entries(k);
    std::size_t lo = 0;
    while (lo < span.size()) {
      std::size_t hi = lo;
      double dot = 0.0;
      while (hi < span.size() && span[hi].row == span[lo].row) {
        dot += span[hi].val * v(span[hi].col);
        ++hi;
      }
      u.idx.push_back(span[lo].row);
      u.val.push_back(dot);
      lo = hi;
    }
    u.off.push_back(static_cast<std::int64_t>(u.idx.size()));
  }
}

// Top eigenpair of M = sum_k u_k u_k^T by power iteration; w holds the
// start vector and receives the eigenvector. Returns the top eigenvalue.
double image_top_eig(const FamilyImage& u, int n, Eigen::VectorXd& w) {
  Eigen::VectorXd next(w.size());
  double rho = 0.0, prev = -1.0;
  for (int it = 0; it < 500; ++it) {
    next.setZero();
    for (int k = 0; k < n; ++k) {
      double dot = 0.0;
      for (std::int64_t t = u.off[k]; t < u.off[k + 1]; ++t)
        dot += u.val[static_cast<std::size_t>(t)] *
               w(u.idx[static_cast<std::size_t>(t)]);
      for (std::int64_t t = u.off[k]; t < u.off[k + 1]; ++t)
        next(u.idx[static_cast<std::size_t>(t)]) +=
            dot * u.val[static_cast<std::size_t>(t)];
    }
    rho = w.dot(next);
    const double nn = next.norm();
    if (nn == 0.0) return 0.0;
    w = next / nn;
    if (prev >= 0.0 && std::abs(rho - prev) <= 1e-12 * rho) break;
    prev = rho;
  }
  return std::max(rho, 0.0);
}

double family_image_sq_norm(const FamilyImage& u) {
  double s = 0.0;
  for (double x : u.val) s += x * x;
  return s;
}

struct RestartOutcome {
  double value = 0.0;
  bool converged = false;
};

RestartOutcome sigma_star_restart(const CoeffModel& m, std::uint64_t key) {
  Eigen::VectorXd v(m.cols()), w(m.rows());
  {
    rng::NormalStream stream(key);
    for (int j = 0; j < m.cols(); ++j) v(j) = stream.next();
    const double nv = v.norm();
    if (nv == 0.0) v.setConstant(1.0 / std::sqrt(double(m.cols())));
    else v /= nv;
  }
  FamilyImage u;
  RestartOutcome out;
  double prev = -1.0;
  for (int it = 0; it < 500; ++it) {
    apply_family(m, v, false, u);
    if (family_image_sq_norm(u) == 0.0) {
      // v is annihilated by the whole family; the certified value is 0.
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    if (it == 0) {
      // start w on the largest image, ties to the smallest k
      int best_k = 0;
      double best = -1.0;
      for (int k = 0; k < m.size(); ++k) {
        double s = 0.0;
        for (std::int64_t t = u.off[k]; t < u.off[k + 1]; ++t)
          s += u.val[static_cast<std::size_t>(t)] *
               u.val[static_cast<std::size_t>(t)];
        if (s > best) {
          best = s;
          best_k = k;
        }
      }
      w.setZero();
      for (std::int64_t t = u.off[best_k]; t < u.off[best_k + 1]; ++t)
        w(u.idx[static_cast<std::size_t>(t)]) =
            u.val[static_cast<std::size_t>(t)];
      w /= w.norm();
    }
    image_top_eig(u, m.size(), w);

    apply_family(m, w, true, u);
    const double lam = image_top_eig(u, m.size(), v);
    out.value = std::sqrt(lam);
    if (prev >= 0.0 && std::abs(out.value - prev) <= 1e-8 * out.value) {
      out.converged = true;
      return out;
    }
    prev = out.value;
  }
  return out;
}

}  // namespace

std::pair<double, double> sigma_params(const CoeffModel& m) {
  return {std::sqrt(psd_top_eig(m.gram_col())),
          std::sqrt(psd_top_eig(m.gram_row()))};
}

double v_frob(const CoeffModel& m) {
  Eigen::MatrixXd b(m.rows(), m.cols());
  if (m.orthogonal_family()) {
    // A_k / ||A_k||_F are eigenvectors of the covariance operator; starting
    // on the top one converges immediately and reproduces max_k ||A_k||_F.
    int best_k = 0;
    for (int k = 1; k < m.size(); ++k)
      if (m.frobenius(k) > m.frobenius(best_k)) best_k = k;
    if (m.frobenius(best_k) == 0.0) return 0.0;
    b = m.coeff(best_k) / m.frobenius(best_k);
  } else {
    rng::NormalStream stream(rng::derive(0, kTagVfrob));
    for (int j = 0; j < m.cols(); ++j)
      for (int i = 0; i < m.rows(); ++i) b(i, j) = stream.next();
    b /= b.norm();
  }

  double prev = -1.0;
  std::vector<double> trace;
  for (int it = 0; it < 2000; ++it) {
    const Eigen::MatrixXd c = m.covariance_apply(b);
    const double rho = b.cwiseProduct(c).sum();
    trace.push_back(rho);
    const double nc = c.norm();
    if (nc == 0.0) return 0.0;
    if (prev >= 0.0 && std::abs(rho - prev) <= 1e-10 * std::max(rho, 0.0))
      return std::sqrt(std::max(rho, 0.0));
    prev = rho;
    b = c / nc;
  }
  std::ostringstream msg;
  msg << "v_frob: power iteration did not converge; Rayleigh trace tail:";
  for (std::size_t i = trace.size() >= 5 ? trace.size() - 5 : 0;
       i < trace.size(); ++i)
    msg << ' ' << trace[i];
  throw std::runtime_error(msg.str());
}

double v_frob_dense(const CoeffModel& m) {
  const long dim = static_cast<long>(m.rows()) * m.cols();
  if (dim > 4096)
    throw std::invalid_argument(
        "v_frob_dense: operator too large to materialize");
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < m.size(); ++k) {
    const Eigen::MatrixXd a = m.coeff(k);
    const Eigen::Map<const Eigen::VectorXd> vec(a.data(), dim);
    op.noalias() += vec * vec.transpose();
  }
  return std::sqrt(psd_top_eig(op));
}

double sigma_star_objective(const CoeffModel& m, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& w) {
  if (v.size() != m.cols() || w.size() != m.rows())
    throw std::invalid_argument("sigma_star_objective: shape mismatch");
  double s = 0.0;
  for (int k = 0; k < m.size(); ++k) {
    double c = 0.0;
    for (const Entry& e : m.entries(k)) c += w(e.row) * e.val * v(e.col);
    s += c * c;
  }
  return std::sqrt(s);
}

SigmaStarResult sigma_star(const CoeffModel& m, int restarts,
                           std::uint64_t seed, int threads) {
  if (restarts < 1)
    throw std::invalid_argument("sigma_star: need at least one restart");
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  const std::uint64_t base = rng::derive(seed, kTagSigmaStar);
  parallel_for(restarts, threads, [&](long r) {
    outcomes[static_cast<std::size_t>(r)] =
        sigma_star_restart(m, rng::derive(base, static_cast<std::uint64_t>(r)));
  });
  SigmaStarResult res;
  res.restarts = restarts;
  res.value = -1.0;
  for (int r = 0; r < restarts; ++r) {
    if (outcomes[static_cast<std::size_t>(r)].value > res.value) {
      res.value = outcomes[static_cast<std::size_t>(r)].value;
      res.converged = outcomes[static_cast<std::size_t>(r)].converged;
      res.best_restart = r;
    }
  }
  return res;
}

double w_proxy(const CoeffModel& m) {
  if (!m.selfadjoint_family()) return w_proxy(selfadjoint_dilation(m));
  return 2.0 * std::sqrt(m.max_frobenius()) *
         std::pow(psd_top_eig(m.gram_col()), 0.25);
}

BoundReport shape_report(double sigma_col, double sigma_row, double vf,
                         const SigmaStarResult& ss, double wp, int d,
                         double eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("shape_report: epsilon must be in (0, 1]");
  BoundReport rep;
  rep.epsilon = eps;
  rep.sigma_col = sigma_col;
  rep.sigma_row = sigma_row;
  rep.v_frob = vf;
  rep.sigma_star = ss.value;
  rep.sigma_star_converged = ss.converged;
  rep.sigma_star_restarts = ss.restarts;
  rep.w_proxy = wp;

  const double dd = static_cast<double>(d);
  const double log_factor = dd > 1.0 ? std::sqrt(std::log(dd)) : 1.0;
  rep.nck_lower = rep.sigma_col + rep.sigma_row;
  rep.nck_upper_shape = log_factor * rep.nck_lower;
  rep.main_bound_shape = rep.nck_lower + std::pow(dd, eps) * rep.v_frob;
  rep.conjecture_shape = rep.nck_lower + log_factor * rep.sigma_star;
  return rep;
}

BoundReport assemble(const CoeffModel& m, double eps, int restarts,
                     std::uint64_t seed, int threads) {
  const auto [sc, sr] = sigma_params(m);
  return shape_report(sc, sr, v_frob(m), sigma_star(m, restarts, seed, threads),
                      w_proxy(m), std::max(m.rows(), m.cols()), eps);
}

double samplecov_bound(const std::vector<CoeffModel>& models, double eps) {
  if (models.empty())
    throw std::invalid_argument("samplecov_bound: empty model list");
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("samplecov_bound: epsilon must be in (0, 1]");
  const int rows = models[0].rows(), cols = models[0].cols();
  const double d = static_cast<double>(std::max(rows, cols));
  double sum = 0.0;
  for (const auto& m : models) {
    if (m.rows() != rows || m.cols() != cols)
      throw std::invalid_argument("samplecov_bound: model shapes differ");
    const auto [sc, sr] = sigma_params(m);
    const double vf = v_frob(m);
    sum += std::pow(sc, 4) + std::pow(sr, 4) +
           std::pow(d, eps) * std::pow(vf, 4);
  }
  return std::sqrt(sum);
}

}  // namespace gnl
