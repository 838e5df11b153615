#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "efk/cli.hpp"
#include "efk/errors.hpp"
#include "efk/io.hpp"
#include "test_support.hpp"

using namespace efk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("efk_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("EFK1 round trip and format guards") {
  const auto& sol = efk_test::ac_minimizer();
  const fs::path dir = fresh_dir("efk1");
  const fs::path file = dir / "p.efk1";
  write_profile_binary(file, sol.profile);
  const Profile1D back = read_profile_binary(file, sol.profile.potential);
  CHECK(back.grid.n == sol.profile.grid.n);
  CHECK(back.grid.half_length == sol.profile.grid.half_length);
  CHECK(back.beta == sol.profile.beta);
  CHECK((back.values - sol.profile.values).cwiseAbs().maxCoeff() == 0.0);

  // Wrong magic.
  write_text(dir / "bad.efk1", "NOPE....");
  CHECK_THROWS_AS(read_profile_binary(dir / "bad.efk1", nullptr), FormatError);
  // Truncated payload.
  {
    std::ifstream in(file, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() / 2);
    std::ofstream out(dir / "trunc.efk1", std::ios::binary);
    out << bytes;
  }
  CHECK_THROWS_AS(read_profile_binary(dir / "trunc.efk1", nullptr), FormatError);
  // Missing file.
  CHECK_THROWS_AS(read_profile_binary(dir / "missing.efk1", nullptr), IoError);
  // Dimension mismatch against the supplied potential.
  CHECK_THROWS_AS(read_profile_binary(file, w_eps(0.4)), FormatError);
  fs::remove_all(dir);
}

TEST_CASE("EFK2 round trip") {
  auto pot = w_eps(0.4);
  const Grid2D grid = Grid2D::make(2.0, 3.0, 11, 13);
  Field2D f = make_field(grid, pot, 1.0);
  for (Index c = 0; c < f.m(); ++c) {
    for (Index i = 0; i < grid.nt; ++i) {
      for (Index j = 0; j < grid.nx; ++j) {
        f.comps[c](i, j) = 0.1 * static_cast<double>(c + 1) * std::sin(0.3 * i + j);
      }
    }
  }
  const fs::path dir = fresh_dir("efk2");
  write_field_binary(dir / "f.efk2", f);
  const Field2D back =
      read_field_binary(dir / "f.efk2", pot, OperatorVariant::kBiharmonic);
  CHECK(back.grid == f.grid);
  for (Index c = 0; c < f.m(); ++c) {
    CHECK((back.comps[c] - f.comps[c]).cwiseAbs().maxCoeff() == 0.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("config parsing, overrides and validation") {
  const fs::path dir = fresh_dir("cfg");
  write_text(dir / "run.cfg",
             "# comment\n"
             "potential = allen_cahn\n"
             "beta = 3.0   # trailing comment\n"
             "n = 501\n");
  auto kv = read_config_file((dir / "run.cfg").string());
  std::vector<std::string> args = {"--L", "15", "--seed", "7"};
  const auto positional = apply_cli_overrides(kv, args);
  CHECK(positional.empty());
  RunConfig cfg = parse_config(kv);
  CHECK(cfg.potential == "allen_cahn");
  CHECK(cfg.beta.value() == 3.0);
  CHECK(cfg.n == 501);
  CHECK(cfg.half_length == 15.0);
  CHECK(cfg.seed == 7);
  validate(cfg);

  CHECK_THROWS_AS(parse_config({{"no_such_key", "1"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"beta", "abc"}}), ConfigError);
  auto bad = cfg;
  bad.n = 50;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.eps = 1.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = cfg;
  bad.variant = "sideways";
  CHECK_THROWS_AS(validate(bad), ConfigError);

  // Canonical hash is stable and sensitive to values.
  RunConfig a, b;
  a.beta = 3.0;
  b.beta = 3.0;
  CHECK(a.hash() == b.hash());
  b.seed += 1;
  CHECK(a.hash() != b.hash());
  fs::remove_all(dir);
}

TEST_CASE("cli: hetero end to end, byte-identical reports, verify") {
  const fs::path dir1 = fresh_dir("cli_a");
  const fs::path dir2 = fresh_dir("cli_b");
  const std::vector<std::string> base = {"hetero",  "--potential", "allen_cahn",
                                         "--beta",  "3",           "--n",
                                         "501",     "--L",         "15"};
  auto with_out = [&](const fs::path& d) {
    std::vector<std::string> v = base;
    v.push_back("--out");
    v.push_back(d.string());
    return v;
  };
  CHECK(run_cli(with_out(dir1)) == kExitOk);
  CHECK(run_cli(with_out(dir2)) == kExitOk);
  CHECK(fs::exists(dir1 / "hetero.json"));
  CHECK(fs::exists(dir1 / "hetero_profile.efk1"));
  CHECK(fs::exists(dir1 / "hetero_profile.csv"));
  CHECK(read_text(dir1 / "hetero.json") == read_text(dir2 / "hetero.json"));

  CHECK(cmd_verify(RunConfig{}, {dir1.string()}) == kExitOk);

  // Corrupt one node of the stored profile: the residual check must flip.
  {
    Profile1D p = read_profile_binary(dir1 / "hetero_profile.efk1", allen_cahn());
    p.beta = 3.0;
    p.values(p.n() / 3, 0) += 0.05;
    write_profile_binary(dir1 / "hetero_profile.efk1", p);
  }
  CHECK(cmd_verify(RunConfig{}, {dir1.string()}) == kExitCheckFailed);

  // report merges the JSONs into a CSV.
  RunConfig rep_cfg;
  rep_cfg.out_dir = dir2.string();
  CHECK(cmd_report(rep_cfg, {dir2.string()}) == kExitOk);
  const std::string csv = read_text(dir2 / "report.csv");
  CHECK(csv.rfind("file,key,value\n", 0) == 0);
  CHECK(csv.find("values.j_min") != std::string::npos);

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("cli: usage and input error exits") {
  CHECK(run_cli({}) == kExitUsage);
  CHECK(run_cli({"frobnicate"}) == kExitUsage);
  CHECK(run_cli({"hetero", "--potential", "allen_cahn"}) == kExitUsage);  // no beta
  CHECK(run_cli({"hetero", "--beta", "3", "--n", "50"}) == kExitUsage);
  CHECK(run_cli({"hetero", "--beta", "3", "--bogus_key", "1"}) == kExitUsage);
  CHECK(run_cli({"separation", "--beta", "1", "--potential", "allen_cahn"}) ==
        kExitUsage);
  CHECK(run_cli({"verify", "/nonexistent/efk/path"}) == kExitNoInput);
  const fs::path dir = fresh_dir("cli_empty");
  CHECK(run_cli({"verify", dir.string()}) == kExitNoInput);
  CHECK(run_cli({"report", dir.string()}) == kExitNoInput);
  // Malformed JSON artifact: format error.
  write_text(dir / "hetero.json", "{ not json");
  CHECK(run_cli({"verify", dir.string()}) == kExitFormat);
  fs::remove_all(dir);
}

TEST_CASE("cli: separation certificate round trip with resume") {
  const fs::path dir = fresh_dir("cli_sep");
  const std::vector<std::string> args = {
      "separation", "--potential", "w_eps", "--eps", "0.4", "--beta", "1",
      "--n",        "675",         "--out", dir.string()};
  CHECK(run_cli(args) == kExitOk);
  CHECK(fs::exists(dir / "certificate.json"));
  CHECK(fs::exists(dir / "member_minus_0.efk1"));
  CHECK(cmd_verify(RunConfig{}, {dir.string()}) == kExitOk);

  // Resume from the stored members reproduces a passing certificate.
  const fs::path dir2 = fresh_dir("cli_sep_resume");
  const std::vector<std::string> resume_args = {
      "separation", "--potential", "w_eps",  "--eps",    "0.4",
      "--beta",     "1",           "--out",  dir2.string(),
      "--resume",   dir.string()};
  CHECK(run_cli(resume_args) == kExitOk);

  // Corrupt resume data: IO-error exit.
  write_text(dir / "member_minus_0.efk1", "garbage");
  CHECK(run_cli(resume_args) == kExitNoInput);

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("cli: doublelayer end to end (split-quartic, small instance)") {
  const fs::path dir = fresh_dir("cli_dl");
  const std::vector<std::string> args = {
      "doublelayer", "--potential", "w_eps", "--eps",  "0.4",
      "--beta",      "1",           "--nt",  "101",    "--nx",
      "135",         "--variant",   "split-quartic",   "--probe_trials",
      "50",          "--out",       dir.string()};
  CHECK(run_cli(args) == kExitOk);
  CHECK(fs::exists(dir / "field.efk2"));
  CHECK(fs::exists(dir / "slice_trace.csv"));
  const std::string rep = read_text(dir / "verification.json");
  CHECK(rep.find("split-quartic") != std::string::npos);
  CHECK(cmd_verify(RunConfig{}, {dir.string()}) == kExitOk);

  // Certificate path validation happens before any solving.
  write_text(dir / "bad_cert.json", "{ not json");
  std::vector<std::string> with_cert = args;
  with_cert.push_back("--certificate");
  with_cert.push_back((dir / "bad_cert.json").string());
  CHECK(run_cli(with_cert) == kExitFormat);
  with_cert.back() = (dir / "no_such_cert.json").string();
  CHECK(run_cli(with_cert) == kExitNoInput);
  fs::remove_all(dir);
}

TEST_CASE("cli: EFKL_OUT overrides the output root") {
  const fs::path dir = fresh_dir("cli_env");
  setenv("EFKL_OUT", dir.string().c_str(), 1);
  const std::vector<std::string> args = {"hetero", "--potential", "allen_cahn",
                                         "--beta", "3",           "--n",
                                         "501",    "--L",         "15",
                                         "--out",  "ignored_dir"};
  CHECK(run_cli(args) == kExitOk);
  unsetenv("EFKL_OUT");
  CHECK(fs::exists(dir / "hetero.json"));
  CHECK_FALSE(fs::exists("ignored_dir"));
  fs::remove_all(dir);
}

TEST_CASE("cli: sweep spawns one job per value") {
  const fs::path dir = fresh_dir("cli_sweep");
  const std::vector<std::string> args = {
      "hetero", "--potential", "allen_cahn", "--beta", "3",     "--n",   "501",
      "--L",    "15",          "--out",      dir.string(),      "--sweep",
      "beta=2:3:1"};
  CHECK(run_cli(args) == kExitOk);
  CHECK(fs::exists(dir / "sweep_beta_2" / "hetero.json"));
  CHECK(fs::exists(dir / "sweep_beta_3" / "hetero.json"));
  CHECK(run_cli({"hetero", "--beta", "3", "--sweep", "gamma=1:2:1"}) == kExitUsage);
  fs::remove_all(dir);

  // Jobs land in per-value subdirectories of the env root, not on top of it.
  const fs::path env_dir = fresh_dir("cli_sweep_env");
  setenv("EFKL_OUT", env_dir.string().c_str(), 1);
  std::vector<std::string> env_args = args;
  CHECK(run_cli(env_args) == kExitOk);
  unsetenv("EFKL_OUT");
  CHECK(fs::exists(env_dir / "sweep_beta_2" / "hetero.json"));
  CHECK(fs::exists(env_dir / "sweep_beta_3" / "hetero.json"));
  fs::remove_all(env_dir);
}

TEST_CASE("cli: hetero rejects a non-double-well potential") {
  CHECK(run_cli({"hetero", "--potential", "ginzburg_landau", "--beta", "1"}) ==
        kExitUsage);
}
