#include "gnl/moments.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gnl/linalg.hpp"
#include "gnl/parallel.hpp"
#include "gnl/rng.hpp"

namespace gnl {

namespace {

void require_selfadjoint(const CoeffModel& m, const char* who) {
  if (!m.selfadjoint_family())
    throw std::invalid_argument(std::string(who) +
                                ": family must be self-adjoint");
}

void require_orthogonal(const CoeffModel& m, const char* who) {
  if (!m.orthogonal_family())
    throw std::invalid_argument(std::string(who) +
                                ": family must be trace-orthogonal");
}

double double_factorial(int p) {
  double v = 1.0;
  for (int k = p - 1; k > 1; k -= 2) v *= k;
  return v;
}

void check_budget(const CoeffModel& m, int p, double partitions) {
  const double labelings = std::pow(static_cast<double>(m.size()), p / 2);
  if (labelings * partitions > 1e8)
    throw std::runtime_error(
        "trace moment budget exceeded: n^(p/2) * partitions = " +
        std::to_string(labelings * partitions) + " > 1e8");
  const double dense_doubles = static_cast<double>(m.size()) *
                               static_cast<double>(m.rows()) * m.cols();
  if (dense_doubles > 6.4e7)
    throw std::runtime_error(
        "trace moment budget exceeded: dense coefficient storage too large");
}

// Depth-first sum over label maps constant on the blocks of nu, with shared
// prefix products: the product is extended once per distinct label prefix,
// and the final factor collapses to a trace inner product.
class PartitionTermEval {
 public:
  PartitionTermEval(const std::vector<Eigen::MatrixXd>& coeffs,
                    const PairPartition& nu)
      : coeffs_(coeffs), p_(nu.p) {
    block_of_.resize(static_cast<std::size_t>(p_) + 1);
    first_pos_.resize(nu.pairs.size());
    for (std::size_t b = 0; b < nu.pairs.size(); ++b) {
      block_of_[static_cast<std::size_t>(nu.pairs[b].first)] = b;
      block_of_[static_cast<std::size_t>(nu.pairs[b].second)] = b;
      first_pos_[b] = nu.pairs[b].first;
    }
    label_.assign(nu.pairs.size(), 0);
    const auto d = coeffs_[0].rows();
    stack_.assign(static_cast<std::size_t>(p_), Eigen::MatrixXd(d, d));
  }

  double run() {
    acc_ = 0.0;
    descend(1);
    return acc_;
  }

 private:
  void descend(int pos) {
    const std::size_t blk = block_of_[static_cast<std::size_t>(pos)];
    if (first_pos_[blk] == pos) {
      for (std::size_t l = 0; l < coeffs_.size(); ++l) {
        label_[blk] = l;
        emit(pos);
      }
    } else {
      emit(pos);
    }
  }

  void emit(int pos) {
    const Eigen::MatrixXd& a =
        coeffs_[label_[block_of_[static_cast<std::size_t>(pos)]]];
    if (pos == p_) {
      // Tr(prefix * a) without forming the product.
      const Eigen::MatrixXd& pre = stack_[static_cast<std::size_t>(p_ - 2)];
      acc_ += pre.cwiseProduct(a.transpose()).sum();
      return;
    }
    if (pos == 1)
      stack_[0] = a;
    else
      stack_[static_cast<std::size_t>(pos - 1)].noalias() =
          stack_[static_cast<std::size_t>(pos - 2)] * a;
    descend(pos + 1);
  }

  const std::vector<Eigen::MatrixXd>& coeffs_;
  int p_;
  std::vector<std::size_t> block_of_;  // 1-based position -> block
  std::vector<int> first_pos_;
  std::vector<std::size_t> label_;
  std::vector<Eigen::MatrixXd> stack_;
  double acc_ = 0.0;
};

double term_over_partition(const std::vector<Eigen::MatrixXd>& coeffs,
                           const PairPartition& nu) {
  if (nu.p == 2) {
    double t = 0.0;
    for (const auto& a : coeffs) t += a.cwiseProduct(a.transpose()).sum();
    return t;
  }
  return PartitionTermEval(coeffs, nu).run();
}

// Eigenvalues of sum_k A_k^2 for a self-adjoint family.
Eigen::VectorXd gram_eigs(const CoeffModel& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram_col(),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double tr_gram_power(const Eigen::VectorXd& eigs, int half_p) {
  double t = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    t += std::pow(std::max(eigs(i), 0.0), half_p);
  return t;
}

}  // namespace

double partition_term(const CoeffModel& m, const PairPartition& nu) {
  require_selfadjoint(m, "partition_term");
  if (nu.p < 2 || nu.p % 2 != 0 || nu.p > 14)
    throw std::invalid_argument("partition_term: p must be even in [2, 14]");
  if (nu.p == 2) {
    double t = 0.0;
    for (int k = 0; k < m.size(); ++k) t += m.frobenius(k) * m.frobenius(k);
    return t;
  }
  check_budget(m, nu.p, 1.0);
  return term_over_partition(m.dense_coeffs(), nu);
}

double wick_trace_moment(const CoeffModel& m, int p) {
  require_selfadjoint(m, "wick_trace_moment");
  if (p < 2 || p % 2 != 0 || p > 14)
    throw std::invalid_argument("wick_trace_moment: p must be even in [2, 14]");
  if (p == 2) {
    double t = 0.0;
    for (int k = 0; k < m.size(); ++k) t += m.frobenius(k) * m.frobenius(k);
    return t;
  }
  check_budget(m, p, double_factorial(p));
  const auto coeffs = m.dense_coeffs();
  double total = 0.0;
  for (const auto& nu : enum_pair_partitions(p))
    total += term_over_partition(coeffs, nu);
  return total;
}

CheckReport buchholz_check(const CoeffModel& m, int p) {
  require_selfadjoint(m, "buchholz_check");
  if (p < 2 || p % 2 != 0 || p > 14)
    throw std::invalid_argument("buchholz_check: p must be even in [2, 14]");
  CheckReport rep;
  rep.name = "buchholz";
  const double bound = tr_gram_power(gram_eigs(m), p / 2);
  const double tol = 1e-8 * std::max(1.0, bound);
  if (p > 2) check_budget(m, p, double_factorial(p));
  const auto coeffs = m.dense_coeffs();
  for (const auto& nu : enum_pair_partitions(p)) {
    const double t = std::abs(term_over_partition(coeffs, nu));
    const double ratio = bound > 0.0 ? t / bound : (t > 0.0 ? 1e300 : 0.0);
    ++rep.checks;
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.detail = to_string(nu);
    }
    if (t > bound + tol) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport recursion_check(const CoeffModel& m, int p) {
  require_selfadjoint(m, "recursion_check");
  require_orthogonal(m, "recursion_check");
  if (p < 4 || p % 2 != 0 || p > 14)
    throw std::invalid_argument("recursion_check: p must be even in [4, 14]");
  CheckReport rep;
  rep.name = "recursion";
  const Eigen::VectorXd eigs = gram_eigs(m);
  const double gram_norm = eigs.cwiseAbs().maxCoeff();
  const double maxf = m.max_frobenius();
  const double lower_moment =
      p == 4 ? static_cast<double>(m.rows()) : wick_trace_moment(m, p - 4);
  const double lhs = wick_trace_moment(m, p);
  const double base = std::pow(2.0, p) * tr_gram_power(eigs, p / 2);
  const double cross = maxf * maxf * gram_norm * lower_moment;

  std::ostringstream detail;
  auto check_variant = [&](const char* tag, double coef) {
    const double rhs = base + coef * cross;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e300 : 0.0);
    ++rep.checks;
    if (lhs > rhs + 1e-8 * std::max(1.0, rhs)) ++rep.violations;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    detail << tag << " ratio " << ratio << "; ";
  };
  check_variant("general", std::pow(8.0, p));
  if (m.nonnegative_entries())
    check_variant("nonnegative", std::pow(static_cast<double>(p), 4));
  rep.detail = detail.str();
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport tracecross_check(const CoeffModel& m, int trials,
                             std::uint64_t seed) {
  require_selfadjoint(m, "tracecross_check");
  require_orthogonal(m, "tracecross_check");
  if (trials <= 0)
    throw std::invalid_argument("tracecross_check: need positive trial count");
  CheckReport rep;
  rep.name = "tracecross";
  const int d = m.rows();
  const int n = m.size();
  const auto coeffs = m.dense_coeffs();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.gram_col(),
                                                    Eigen::EigenvaluesOnly);
  const double gram_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  const double maxf = m.max_frobenius();

  for (int t = 0; t < trials; ++t) {
    const std::uint64_t base = rng::derive(seed, static_cast<std::uint64_t>(t));
    Eigen::MatrixXd q[5];
    for (int i = 0; i < 5; ++i)
      q[i] = random_orthogonal(d, rng::derive(base, static_cast<std::uint64_t>(i)));
    const Eigen::MatrixXd y = random_symmetric(d, rng::derive(base, 5));
    const Eigen::MatrixXd c = q[0] * y * y * q[1];

    double lhs = 0.0;
    Eigen::MatrixXd left(d, d), right(d, d), t1(d, d), t2(d, d);
    for (int k1 = 0; k1 < n; ++k1) {
      left.noalias() = c * coeffs[static_cast<std::size_t>(k1)] * q[2];
      right.noalias() = q[3] * coeffs[static_cast<std::size_t>(k1)] * q[4];
      for (int k2 = 0; k2 < n; ++k2) {
        t1.noalias() = left * coeffs[static_cast<std::size_t>(k2)];
        t2.noalias() = right * coeffs[static_cast<std::size_t>(k2)];
        lhs += t1.cwiseProduct(t2.transpose()).sum();
      }
    }
    const double rhs = maxf * maxf * gram_norm * y.squaredNorm();
    const double ratio =
        rhs > 0.0 ? std::abs(lhs) / rhs : (std::abs(lhs) > 0.0 ? 1e300 : 0.0);
    ++rep.checks;
    if (std::abs(lhs) > rhs + 1e-8 * std::max(1.0, rhs)) ++rep.violations;
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.detail = "trial " + std::to_string(t);
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport orthtr_check(const std::vector<Eigen::MatrixXd>& basis,
                         const Eigen::MatrixXd& l) {
  if (l.rows() != l.cols())
    throw std::invalid_argument("orthtr_check: L must be square");
  const int d = static_cast<int>(l.rows());
  if (basis.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("orthtr_check: basis must have d^2 elements");
  Eigen::MatrixXd v(d * d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].rows() != d || basis[k].cols() != d)
      throw std::invalid_argument("orthtr_check: basis shape mismatch");
    v.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(basis[k].data(), d * d);
  }
  const Eigen::MatrixXd gram = v.transpose() * v;
  const Eigen::MatrixXd dev =
      gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  if (dev.cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("orthtr_check: basis is not orthonormal");

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (const auto& b : basis) acc.noalias() += b.transpose() * l * b;
  acc -= l.trace() * Eigen::MatrixXd::Identity(d, d);

  CheckReport rep;
  rep.name = "orthtr";
  rep.checks = 1;
  const double allowed = 1e-8 * l.norm() * d;
  const double residual = acc.norm();
  rep.max_ratio = allowed > 0.0 ? residual / allowed : (residual > 0.0 ? 1e300 : 0.0);
  rep.violations = residual <= allowed ? 0 : 1;
  rep.pass = rep.violations == 0;
  std::ostringstream detail;
  detail << "residual " << residual << " allowed " << allowed;
  rep.detail = detail.str();
  return rep;
}

std::vector<MCEstimate> mc_trace_moments(const CoeffModel& m,
                                         const std::vector<int>& ps,
                                         long n_samples, std::uint64_t seed,
                                         int threads) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("mc_trace_moments: model must be square");
  if (n_samples <= 0)
    throw std::invalid_argument("mc_trace_moments: need positive sample count");
  for (int p : ps)
    if (p < 1) throw std::invalid_argument("mc_trace_moments: p must be >= 1");
  const std::size_t q = ps.size();
  std::vector<double> vals(static_cast<std::size_t>(n_samples) * q);
  const bool symmetric = m.selfadjoint_family();
  parallel_for(n_samples, threads, [&](long i) {
    const Eigen::MatrixXd x =
        m.sample(rng::derive(seed, static_cast<std::uint64_t>(i)));
    if (symmetric) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x,
                                                        Eigen::EigenvaluesOnly);
      const Eigen::VectorXd lam = es.eigenvalues();
      for (std::size_t j = 0; j < q; ++j) {
        double t = 0.0;
        for (Eigen::Index e = 0; e < lam.size(); ++e)
          t += std::pow(lam(e), ps[j]);
        vals[static_cast<std::size_t>(i) * q + j] = t;
      }
    } else {
      for (std::size_t j = 0; j < q; ++j) {
        Eigen::MatrixXd acc = x;
        for (int t = 1; t < ps[j]; ++t) acc = (acc * x).eval();
        vals[static_cast<std::size_t>(i) * q + j] = acc.trace();
      }
    }
  });
  std::vector<MCEstimate> out(q);
  for (std::size_t j = 0; j < q; ++j) {
    MCEstimate& est = out[j];
    est.n_samples = n_samples;
    est.seed = seed;
    double sum = 0.0;
    for (long i = 0; i < n_samples; ++i)
      sum += vals[static_cast<std::size_t>(i) * q + j];
    est.mean = sum / static_cast<double>(n_samples);
    if (n_samples > 1) {
      double ss = 0.0;
      for (long i = 0; i < n_samples; ++i) {
        const double dlt = vals[static_cast<std::size_t>(i) * q + j] - est.mean;
        ss += dlt * dlt;
      }
      est.std_error = std::sqrt(ss / (static_cast<double>(n_samples) *
                                      static_cast<double>(n_samples - 1)));
    }
  }
  return out;
}

MCEstimate mc_trace_moment(const CoeffModel& m, int p, long n_samples,
                           std::uint64_t seed, int threads) {
  return mc_trace_moments(m, {p}, n_samples, seed, threads)[0];
}

}  // namespace gnl
