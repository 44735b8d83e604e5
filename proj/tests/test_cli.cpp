// End-to-end checks of the command-line tool. The binary path arrives as a
// plain argument from CTest; everything else is standard doctest.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

std::string g_cli;

struct Run {
  std::string out;
  int code = -1;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + g_cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  Run r;
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json run_json(const std::string& args) {
  const Run r = run(args);
  REQUIRE(r.code == 0);
  return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_CASE("partition counts print in the fixed format") {
  const Run r = run("partitions --p 6 --verify-phi");
  CHECK(r.code == 0);
  CHECK(r.out == "P2=15 NC2=5 Cr2=10 phi-props: PASS\n");
  const Run plain = run("partitions --p 4");
  CHECK(plain.out == "P2=3 NC2=2 Cr2=1\n");
  const Run fibers = run("partitions --p 4 --dump-fibers");
  CHECK(fibers.out.find("fiber: {1,3}{2,4} members: 1") != std::string::npos);
}

TEST_CASE("certify sweeps epsilon unless one is given") {
  const auto sweep = run_json("certify --model iid --d 9 --restarts 8 --json");
  CHECK(sweep["reports"].size() == 3);
  CHECK(sweep["rows"] == 9);
  CHECK(std::abs(sweep["reports"][0]["sigma_col"].get<double>() - 3.0) < 1e-10);
  const auto single =
      run_json("certify --model iid --d 9 --eps 0.1 --restarts 8 --json");
  CHECK(single["reports"].size() == 1);
  CHECK(single["reports"][0]["epsilon"].get<double>() == 0.1);

  const Run text = run("certify --model diagonal --d 4 --restarts 4");
  CHECK(text.code == 0);
  CHECK(text.out.find("sigma_col:  1\n") != std::string::npos);
  CHECK(text.out.find("[eps=0.25]") != std::string::npos);
}

TEST_CASE("sample reports the concentration half-width consistently") {
  const auto j = run_json(
      "sample --model circulant --d 8 --samples 60 --restarts 8 --json");
  const double ss = j["sigma_star"].get<double>();
  const double hw = j["halfwidth"].get<double>();
  CHECK(std::abs(hw - ss * std::sqrt(2.0 * std::log(200.0))) < 1e-9);
  CHECK(j["samples"].get<long>() == 60);
  CHECK(j["mean"].get<double>() > 0.0);
}

TEST_CASE("moments exercises the full check battery") {
  const auto j = run_json(
      "moments --model iid --d 2 --p 4 --samples 4000 --threads 1 --json");
  CHECK(j["dilated"].get<bool>());
  CHECK(j["wick"].get<double>() == 40.0);  // dilated pair of free columns
  CHECK(std::abs(j["z"].get<double>()) < 5.0);
  REQUIRE(j["checks"].size() == 4);
  for (const auto& c : j["checks"]) CHECK(c["pass"].get<bool>());
}

TEST_CASE("model files load through the same entry point") {
  const auto path = std::filesystem::temp_directory_path() / "gnl_cli_model.json";
  {
    std::ofstream out(path);
    out << R"({"coeffs": [[[1.0]]]})";
  }
  const auto j = run_json("moments --model-file " + path.string() +
                          " --p 4 --samples 2000 --json");
  CHECK(j["wick"].get<double>() == 3.0);
  CHECK_FALSE(j["dilated"].get<bool>());
  std::filesystem::remove(path);
}

TEST_CASE("seed precedence: flag over config over environment") {
  const auto env_only =
      run("sample --model iid --d 3 --samples 10 --json", "GNL_SEED=5");
  CHECK(nlohmann::json::parse(env_only.out)["seed"].get<std::uint64_t>() == 5);

  const auto cfg = std::filesystem::temp_directory_path() / "gnl_cli_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"seed": 11, "d": 4})";
  }
  const auto with_cfg = run(
      "sample --model iid --config " + cfg.string() + " --samples 10 --json",
      "GNL_SEED=5");
  const auto pj = nlohmann::json::parse(with_cfg.out);
  CHECK(pj["seed"].get<std::uint64_t>() == 11);
  CHECK(pj["model"].get<std::string>() == "iid d=4");

  const auto with_flag = run("sample --model iid --config " + cfg.string() +
                                 " --seed 7 --samples 10 --json",
                             "GNL_SEED=5");
  CHECK(nlohmann::json::parse(with_flag.out)["seed"].get<std::uint64_t>() == 7);
  std::filesystem::remove(cfg);
}

TEST_CASE("output is byte-identical across repeats and thread counts") {
  const std::string args =
      "sample --model circulant --d 12 --samples 80 --restarts 8 --json";
  const Run a = run(args + " --threads 1");
  const Run b = run(args + " --threads 1");
  const Run c = run(args + " --threads 4");
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);

  const std::string exp = "experiment --family diagonal --dims 8,16 --samples 40";
  CHECK(run(exp + " --threads 1").out == run(exp + " --threads 3").out);
}

TEST_CASE("csv flag appends the experiments schema") {
  const auto path = std::filesystem::temp_directory_path() / "gnl_cli_rows.csv";
  std::filesystem::remove(path);
  const std::string args = "sample --model diagonal --d 6 --samples 30 --csv " +
                           path.string();
  CHECK(run(args).code == 0);
  CHECK(run(args).code == 0);
  std::ifstream in(path);
  std::string line;
  long lines = 0;
  bool header_ok = false;
  while (std::getline(in, line)) {
    if (lines == 0)
      header_ok = line.rfind("family,d,n,param,", 0) == 0;
    ++lines;
  }
  CHECK(header_ok);
  CHECK(lines == 3);
  std::filesystem::remove(path);
}

TEST_CASE("experiment emits rows and notes") {
  const Run csv = run(
      "experiment --family toeplitz --dims 6,12 --samples 30 --threads 1");
  CHECK(csv.code == 0);
  long lines = 0;
  for (char ch : csv.out)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);  // header + one row per dimension
  CHECK(csv.out.find("toeplitz,6,") != std::string::npos);

  const auto j = run_json(
      "experiment --family sample_cov_counterexample --dims 16 --samples 50 "
      "--threads 1 --json");
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["notes"].size() == 1);
  const std::string note = j["notes"][0].get<std::string>();
  CHECK(note.find("sample_cov_counterexample d=16") != std::string::npos);
}

TEST_CASE("usage errors exit with one, help with zero") {
  CHECK(run("certify --model nope --d 4").code == 1);
  CHECK(run("certify --model nope --d 4").out.find("error:") != std::string::npos);
  CHECK(run("--bogus").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("--help").code == 0);
  CHECK(run("sample --model iid").code == 0);  // defaults apply
  CHECK(run("experiment").code == 1);          // family is mandatory
  CHECK(run("certify").code == 1);             // model is mandatory
}

int main(int argc, char** argv) {
  doctest::Context ctx;
  std::vector<char*> pass;
  pass.push_back(argv[0]);
  for (int i = 1; i < argc; ++i) {
    if (argv[i][0] == '-')
      pass.push_back(argv[i]);
    else
      g_cli = argv[i];
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli> [doctest args]\n");
    return 1;
  }
  ctx.applyCommandLine(static_cast<int>(pass.size()), pass.data());
  return ctx.run();
}
