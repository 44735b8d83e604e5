// Command-line entry point: certify, sample, moments, partitions, and
// experiment subcommands over the gnl library. All output is deterministic
// for fixed flags; numbers print with 17 significant digits.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gnl/bounds.hpp"
#include "gnl/experiments.hpp"
#include "gnl/model.hpp"
#include "gnl/model_io.hpp"
#include "gnl/moments.hpp"
#include "gnl/montecarlo.hpp"
#include "gnl/parallel.hpp"
#include "gnl/partitions.hpp"
#include "gnl/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Options {
  std::string model;
  std::string model_file;
  std::string family;
  std::string csv_path;
  std::string config_path;
  std::string dims_csv = "16,32,64";
  int d = 16;
  int dim = 0;
  int r = 2;
  int d1 = 0;
  int p = 4;
  int restarts = 32;
  int threads = 0;  // 0: machine parallelism
  long samples = 0;  // 0: per-dimension default
  double eps = 0.0;  // 0: certify sweeps the default grid
  double delta = 0.01;
  std::uint64_t seed = 0;
  bool json = false;
  bool verify_phi = false;
  bool dump_fibers = false;
};

std::uint64_t env_default_seed() {
  if (const char* s = std::getenv("GNL_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw std::invalid_argument("GNL_SEED is not an unsigned integer");
    }
  }
  return 0;
}

// --config JSON uses the flag names as keys; flags passed on the command
// line still win because config values only replace the defaults.
void apply_config(Options& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + o.config_path);
  nlohmann::json j;
  in >> j;
  if (j.contains("model")) o.model = j["model"].get<std::string>();
  if (j.contains("model-file")) o.model_file = j["model-file"].get<std::string>();
  if (j.contains("family")) o.family = j["family"].get<std::string>();
  if (j.contains("csv")) o.csv_path = j["csv"].get<std::string>();
  if (j.contains("dims")) o.dims_csv = j["dims"].get<std::string>();
  if (j.contains("d")) o.d = j["d"].get<int>();
  if (j.contains("dim")) o.dim = j["dim"].get<int>();
  if (j.contains("r")) o.r = j["r"].get<int>();
  if (j.contains("d1")) o.d1 = j["d1"].get<int>();
  if (j.contains("p")) o.p = j["p"].get<int>();
  if (j.contains("restarts")) o.restarts = j["restarts"].get<int>();
  if (j.contains("threads")) o.threads = j["threads"].get<int>();
  if (j.contains("samples")) o.samples = j["samples"].get<long>();
  if (j.contains("eps")) o.eps = j["eps"].get<double>();
  if (j.contains("delta")) o.delta = j["delta"].get<double>();
  if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
}

std::vector<int> parse_dims(const std::string& csv) {
  std::vector<int> dims;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    dims.push_back(std::stoi(tok));
  }
  if (dims.empty()) throw std::invalid_argument("empty --dims list");
  return dims;
}

gnl::RunConfig run_config(const Options& o) {
  gnl::RunConfig cfg;
  cfg.dims = parse_dims(o.dims_csv);
  cfg.n_samples = o.samples;
  cfg.seed = o.seed;
  cfg.eps = o.eps > 0.0 ? o.eps : 0.1;
  cfg.restarts = o.restarts;
  cfg.threads = o.threads > 0 ? o.threads : gnl::default_threads();
  cfg.r = o.r;
  cfg.dim = o.dim;
  cfg.d1 = o.d1;
  return cfg;
}

struct NamedModel {
  gnl::CoeffModel model;
  std::string label;
};

NamedModel resolve_model(const Options& o) {
  if (!o.model_file.empty())
    return {gnl::load_model_file(o.model_file), "file:" + o.model_file};
  if (o.model.empty())
    throw std::invalid_argument("need --model or --model-file");
  gnl::RunConfig cfg = run_config(o);
  gnl::FamilyCell cell = gnl::build_family_cell(o.model, o.d, cfg);
  std::ostringstream label;
  label << o.model << " d=" << o.d;
  if (cell.param != 0.0) label << " param=" << cell.param;
  return {std::move(cell.model), label.str()};
}

void print_model_header(const NamedModel& nm, const Options& o) {
  const auto& m = nm.model;
  std::cout << "model:      " << nm.label << " (rows=" << m.rows()
            << " cols=" << m.cols() << " n=" << m.size() << ")\n";
  std::cout << "flags:      orthogonal=" << (m.orthogonal_family() ? "yes" : "no")
            << " selfadjoint=" << (m.selfadjoint_family() ? "yes" : "no")
            << " nonnegative=" << (m.nonnegative_entries() ? "yes" : "no")
            << "\n";
  std::cout << "seed:       " << o.seed << "\n";
}

nlohmann::json report_json(const gnl::BoundReport& rep) {
  return {{"epsilon", rep.epsilon},
          {"sigma_col", rep.sigma_col},
          {"sigma_row", rep.sigma_row},
          {"v_frob", rep.v_frob},
          {"sigma_star", rep.sigma_star},
          {"sigma_star_converged", rep.sigma_star_converged},
          {"sigma_star_restarts", rep.sigma_star_restarts},
          {"w_proxy", rep.w_proxy},
          {"nck_lower", rep.nck_lower},
          {"nck_upper_shape", rep.nck_upper_shape},
          {"main_bound_shape", rep.main_bound_shape},
          {"conjecture_shape", rep.conjecture_shape}};
}

int cmd_certify(const Options& o) {
  const NamedModel nm = resolve_model(o);
  const auto& m = nm.model;
  const int threads = o.threads > 0 ? o.threads : gnl::default_threads();

  const auto [sc, sr] = gnl::sigma_params(m);
  const double vf = gnl::v_frob(m);
  const gnl::SigmaStarResult ss = gnl::sigma_star(m, o.restarts, o.seed, threads);
  const double wp = gnl::w_proxy(m);
  const int dmax = std::max(m.rows(), m.cols());

  std::vector<double> eps_grid;
  if (o.eps > 0.0)
    eps_grid.push_back(o.eps);
  else
    eps_grid = {0.05, 0.1, 0.25};

  std::vector<gnl::BoundReport> reports;
  for (double eps : eps_grid)
    reports.push_back(gnl::shape_report(sc, sr, vf, ss, wp, dmax, eps));

  if (o.json) {
    nlohmann::json out;
    out["model"] = nm.label;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    out["n"] = m.size();
    out["seed"] = o.seed;
    out["reports"] = nlohmann::json::array();
    for (const auto& rep : reports) out["reports"].push_back(report_json(rep));
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }

  print_model_header(nm, o);
  std::cout << "sigma_col:  " << fmt17(sc) << "\n";
  std::cout << "sigma_row:  " << fmt17(sr) << "\n";
  std::cout << "v_frob:     " << fmt17(vf) << "\n";
  std::cout << "sigma_star: " << fmt17(ss.value) << " ("
            << (ss.converged ? "converged" : "not converged")
            << ", restarts=" << ss.restarts << ")\n";
  std::cout << "w_proxy:    " << fmt17(wp) << "\n";
  for (const auto& rep : reports) {
    std::cout << "[eps=" << fmt17(rep.epsilon) << "]\n";
    std::cout << "  nck_lower:        " << fmt17(rep.nck_lower) << "\n";
    std::cout << "  nck_upper_shape:  " << fmt17(rep.nck_upper_shape) << "\n";
    std::cout << "  main_bound_shape: " << fmt17(rep.main_bound_shape) << "\n";
    std::cout << "  conjecture_shape: " << fmt17(rep.conjecture_shape) << "\n";
  }
  return kExitOk;
}

int cmd_sample(const Options& o) {
  const NamedModel nm = resolve_model(o);
  const auto& m = nm.model;
  const int threads = o.threads > 0 ? o.threads : gnl::default_threads();
  const long n = o.samples > 0
                     ? o.samples
                     : gnl::default_samples(std::max(m.rows(), m.cols()));

  gnl::MCEstimate est = gnl::estimate_opnorm_mean(m, n, o.seed, threads);
  const gnl::SigmaStarResult ss = gnl::sigma_star(m, o.restarts, o.seed, threads);
  est.sigma_star = ss.value;
  const double halfwidth = est.concentration_halfwidth(o.delta);

  if (!o.csv_path.empty()) {
    gnl::ExperimentRow row;
    row.family = o.model.empty() ? "file" : o.model;
    row.d = std::max(m.rows(), m.cols());
    row.n = m.size();
    row.seed = o.seed;
    const double eps = o.eps > 0.0 ? o.eps : 0.1;
    const auto [sc, sr] = gnl::sigma_params(m);
    row.report = gnl::shape_report(sc, sr, gnl::v_frob(m), ss, gnl::w_proxy(m),
                                   row.d, eps);
    row.mc_mean = est.mean;
    row.mc_stderr = est.std_error;
    gnl::emit_csv({row}, o.csv_path);
  }

  if (o.json) {
    nlohmann::json out{{"model", nm.label},
                       {"seed", o.seed},
                       {"samples", est.n_samples},
                       {"mean", est.mean},
                       {"stderr", est.std_error},
                       {"sigma_star", ss.value},
                       {"sigma_star_converged", ss.converged},
                       {"delta", o.delta},
                       {"halfwidth", halfwidth}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }

  print_model_header(nm, o);
  std::cout << "samples:    " << est.n_samples << "\n";
  std::cout << "mean:       " << fmt17(est.mean) << "\n";
  std::cout << "stderr:     " << fmt17(est.std_error) << "\n";
  std::cout << "sigma_star: " << fmt17(ss.value) << " ("
            << (ss.converged ? "converged" : "not converged")
            << ", restarts=" << ss.restarts << ")\n";
  std::cout << "delta:      " << fmt17(o.delta) << "\n";
  std::cout << "halfwidth:  " << fmt17(halfwidth) << "\n";
  return kExitOk;
}

int cmd_moments(const Options& o) {
  NamedModel nm = resolve_model(o);
  const int threads = o.threads > 0 ? o.threads : gnl::default_threads();
  bool dilated = false;
  if (!nm.model.selfadjoint_family()) {
    nm.model = gnl::selfadjoint_dilation(nm.model);
    dilated = true;
  }
  const auto& m = nm.model;
  const long n = o.samples > 0 ? o.samples : 100000;

  const double wick = gnl::wick_trace_moment(m, o.p);
  const gnl::MCEstimate mc =
      gnl::mc_trace_moment(m, o.p, n, gnl::rng::derive(o.seed, 1), threads);
  const double z =
      mc.std_error > 0.0 ? (wick - mc.mean) / mc.std_error : 0.0;

  std::vector<gnl::CheckReport> checks;
  checks.push_back(gnl::buchholz_check(m, o.p));
  if (o.p >= 4 && m.orthogonal_family())
    checks.push_back(gnl::recursion_check(m, o.p));
  if (m.orthogonal_family())
    checks.push_back(gnl::tracecross_check(m, 200, gnl::rng::derive(o.seed, 2)));
  {
    // canonical matrix-unit basis against the model's Gram sum
    std::vector<Eigen::MatrixXd> basis;
    const int d = m.rows();
    basis.reserve(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
        b(i, j) = 1.0;
        basis.push_back(std::move(b));
      }
    checks.push_back(gnl::orthtr_check(basis, m.gram_col()));
  }

  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;

  if (o.json) {
    nlohmann::json out{{"model", nm.label}, {"dilated", dilated},
                       {"seed", o.seed},   {"p", o.p},
                       {"wick", wick},     {"mc_mean", mc.mean},
                       {"mc_stderr", mc.std_error}, {"samples", mc.n_samples},
                       {"z", z}};
    out["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      out["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"max_ratio", c.max_ratio},
                               {"checks", c.checks},
                               {"violations", c.violations},
                               {"detail", c.detail}});
    std::cout << out.dump(2) << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
  }

  print_model_header(nm, o);
  if (dilated) std::cout << "note:       family was dilated to self-adjoint form\n";
  std::cout << "p:          " << o.p << "\n";
  std::cout << "wick:       " << fmt17(wick) << "\n";
  std::cout << "mc:         " << fmt17(mc.mean) << " (stderr "
            << fmt17(mc.std_error) << ", samples " << mc.n_samples << ")\n";
  std::cout << "z:          " << fmt17(z) << "\n";
  for (const auto& c : checks) {
    std::cout << c.name << ": " << (c.pass ? "PASS" : "FAIL") << " (max ratio "
              << fmt17(c.max_ratio) << ", checks " << c.checks;
    if (c.violations > 0) std::cout << ", violations " << c.violations;
    std::cout << ")\n";
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_partitions(const Options& o) {
  const auto all = gnl::enum_pair_partitions(o.p);
  long nc = 0;
  for (const auto& nu : all)
    if (gnl::is_noncrossing(nu)) ++nc;
  const long total = static_cast<long>(all.size());
  const long crossing = total - nc;

  std::ostringstream line;
  line << "P2=" << total << " NC2=" << nc << " Cr2=" << crossing;

  bool pass = true;
  if (o.verify_phi) {
    if (o.p < 4)
      throw std::invalid_argument("--verify-phi needs p >= 4");
    const auto fibers = gnl::phi_fibers(o.p);
    const double cap =
        std::pow(4.0, o.p) * static_cast<double>(o.p) * o.p;
    if (static_cast<double>(fibers.size()) > cap) pass = false;
    for (const auto& nu : all) {
      if (gnl::is_noncrossing(nu)) continue;
      const gnl::SetPartition image = gnl::phi(nu);
      if (!gnl::leq(nu, image)) pass = false;
      // crossing quadruple inside the image
      bool has_quad = false;
      for (std::size_t a = 0; a < image.blocks.size() && !has_quad; ++a)
        for (std::size_t b = 0; b < image.blocks.size() && !has_quad; ++b) {
          if (a == b) continue;
          const auto& ba = image.blocks[a];
          const auto& bb = image.blocks[b];
          if (ba.size() != 2 || bb.size() != 2) continue;
          if (ba[0] < bb[0] && bb[0] < ba[1] && ba[1] < bb[1]) has_quad = true;
        }
      if (!has_quad) pass = false;
      // exactly one fiber above nu
      int above = 0;
      for (const auto& f : fibers)
        if (gnl::leq(nu, f)) ++above;
      if (above != 1) pass = false;
      // same image for every crossing refinement of the image
      for (const auto& hat : all) {
        if (gnl::is_noncrossing(hat)) continue;
        if (gnl::leq(hat, image) && !(gnl::phi(hat) == image)) pass = false;
      }
    }
    line << " phi-props: " << (pass ? "PASS" : "FAIL");
  }
  std::cout << line.str() << "\n";

  if (o.dump_fibers) {
    if (o.p < 4)
      throw std::invalid_argument("--dump-fibers needs p >= 4");
    const auto fibers = gnl::phi_fibers(o.p);
    for (const auto& f : fibers) {
      long members = 0;
      for (const auto& nu : all) {
        if (gnl::is_noncrossing(nu)) continue;
        if (gnl::leq(nu, f)) ++members;
      }
      std::cout << "fiber: " << gnl::to_string(f) << " members: " << members
                << "\n";
    }
  }
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_experiment(const Options& o) {
  if (o.family.empty())
    throw std::invalid_argument("experiment needs --family");
  const gnl::RunConfig cfg = run_config(o);
  const gnl::RunResult res = gnl::run_example(o.family, cfg);

  if (o.json) {
    nlohmann::json out;
    out["family"] = o.family;
    out["seed"] = o.seed;
    out["rows"] = nlohmann::json::array();
    for (const auto& row : res.rows) {
      nlohmann::json r = report_json(row.report);
      r["family"] = row.family;
      r["d"] = row.d;
      r["n"] = row.n;
      r["param"] = row.param;
      r["mc_mean"] = row.mc_mean;
      r["mc_stderr"] = row.mc_stderr;
      r["seed"] = row.seed;
      out["rows"].push_back(std::move(r));
    }
    out["notes"] = res.notes;
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }

  for (const auto& note : res.notes) std::cout << "# " << note << "\n";
  if (!o.csv_path.empty()) {
    gnl::emit_csv(res.rows, o.csv_path);
    std::cout << "wrote " << res.rows.size() << " rows to " << o.csv_path
              << "\n";
  } else {
    std::cout << gnl::csv_header() << "\n";
    for (const auto& row : res.rows) std::cout << gnl::csv_line(row) << "\n";
  }
  return kExitOk;
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "named model family");
  cmd->add_option("--model-file", o.model_file, "JSON model file");
  cmd->add_option("--d", o.d, "model dimension");
  cmd->add_option("--dim", o.dim, "subspace dimension (0: d^1.5)");
  cmd->add_option("--r", o.r, "cell/block size");
  cmd->add_option("--d1", o.d1, "row count for sample covariance");
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "base RNG seed (echoed in output)");
  cmd->add_option("--threads", o.threads, "worker count (0: machine)");
  cmd->add_option("--config", o.config_path, "JSON config with flag defaults");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  try {
    o.seed = env_default_seed();
    // config values replace defaults before parsing, so explicit flags win
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") o.config_path = argv[i + 1];
    apply_config(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"bound parameters and moment diagnostics for Gaussian matrix "
               "series with correlated entries"};
  app.require_subcommand(1);

  auto* certify = app.add_subcommand(
      "certify", "compute bound parameters and assembled shapes");
  add_model_flags(certify, o);
  add_common_flags(certify, o);
  certify->add_option("--eps", o.eps, "epsilon (default: sweep 0.05/0.1/0.25)");
  certify->add_option("--restarts", o.restarts, "sigma_star restarts");
  certify->add_flag("--json", o.json, "JSON output");

  auto* sample = app.add_subcommand(
      "sample", "Monte Carlo estimate of the mean spectral norm");
  add_model_flags(sample, o);
  add_common_flags(sample, o);
  sample->add_option("--samples", o.samples, "sample count (0: default)");
  sample->add_option("--delta", o.delta, "tail probability for the half-width");
  sample->add_option("--restarts", o.restarts, "sigma_star restarts");
  sample->add_option("--eps", o.eps, "epsilon for the --csv row");
  sample->add_option("--csv", o.csv_path, "append an experiments-schema row");
  sample->add_flag("--json", o.json, "JSON output");

  auto* moments = app.add_subcommand(
      "moments", "Wick moments vs Monte Carlo plus inequality checks");
  add_model_flags(moments, o);
  add_common_flags(moments, o);
  moments->add_option("--p", o.p, "moment order (even)");
  moments->add_option("--samples", o.samples, "MC sample count");
  moments->add_flag("--json", o.json, "JSON output");

  auto* partitions = app.add_subcommand(
      "partitions", "pair partition counts and coarsening-map properties");
  partitions->add_option("--p", o.p, "ground set size (even)")->required();
  partitions->add_flag("--verify-phi", o.verify_phi,
                       "verify the coarsening-map properties");
  partitions->add_flag("--dump-fibers", o.dump_fibers,
                       "list fibers with membership counts");
  add_common_flags(partitions, o);

  auto* experiment = app.add_subcommand(
      "experiment", "named experiment suite emitting the fixed CSV schema");
  experiment->add_option("--family", o.family, "experiment family");
  experiment->add_option("--dims", o.dims_csv, "comma-separated dimensions");
  experiment->add_option("--samples", o.samples, "samples per cell (0: default)");
  experiment->add_option("--eps", o.eps, "epsilon");
  experiment->add_option("--restarts", o.restarts, "sigma_star restarts");
  experiment->add_option("--r", o.r, "cell/block size");
  experiment->add_option("--dim", o.dim, "subspace dimension (0: d^1.5)");
  experiment->add_option("--d1", o.d1, "row count for sample covariance");
  experiment->add_option("--csv", o.csv_path, "output CSV path (append)");
  experiment->add_flag("--json", o.json, "JSON output");
  add_common_flags(experiment, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(certify)) return cmd_certify(o);
    if (app.got_subcommand(sample)) return cmd_sample(o);
    if (app.got_subcommand(moments)) return cmd_moments(o);
    if (app.got_subcommand(partitions)) return cmd_partitions(o);
    if (app.got_subcommand(experiment)) return cmd_experiment(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cerr << "error: no subcommand\n";
  return kExitUsage;
}
