#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "resodecay/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RESODECAY_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("resodecay_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

nlohmann::json load_json(const fs::path& p) {
  return nlohmann::json::parse(resodecay::read_text_file(p));
}

const std::string kPsiJson =
    "{\"class\": \"H2-\", \"terms\": [{\"re_pole\": 0.0, \"im_pole\": 1.0, "
    "\"multiplicity\": 2, \"re_coeff\": 1.0, \"im_coeff\": 0.0}]}";

}  // namespace

TEST_CASE("help exits cleanly, usage errors do not") {
  CHECK(run("--help") == 0);
  CHECK(run("synth-xsec --help") == 0);
  CHECK(run("") == 1);             // a subcommand is required
  CHECK(run("--no-such-flag") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("synth-xsec --bins 3:1:10") == 1);   // inverted bin edges
  CHECK(run("synth-xsec --window 3:1") == 1);
  CHECK(run("fit-xsec") == 1);     // --input is required
}

TEST_CASE("unusable input files map to exit 3") {
  TempDir tmp("input3");
  CHECK(run("fit-xsec --input " + tmp.sub("missing.csv")) == 3);
  resodecay::write_text_file(tmp.sub("empty.csv"), "E\n");
  CHECK(run("fit-xsec --input " + tmp.sub("empty.csv")) == 3);
  resodecay::write_text_file(tmp.sub("garbled.csv"), "E\n1.5\nnot-a-number\n");
  CHECK(run("fit-xsec --input " + tmp.sub("garbled.csv")) == 3);
}

TEST_CASE("synthesis and fitting round-trip through the filesystem") {
  TempDir tmp("roundtrip");
  CHECK(run("synth-xsec --events 30000 --seed 6 --out " + tmp.sub("sx")) == 0);
  CHECK(fs::exists(tmp.sub("sx") + "/xsec_events.csv"));
  CHECK(fs::exists(tmp.sub("sx") + "/xsec_binned.csv"));
  CHECK(fs::exists(tmp.sub("sx") + "/config_used.json"));

  CHECK(run("fit-xsec --input " + tmp.sub("sx") + "/xsec_events.csv --out " +
            tmp.sub("fx")) == 0);
  const nlohmann::json fit = load_json(tmp.sub("fx") + "/xsec_fit.json");
  CHECK(fit["converged"].get<bool>());
  CHECK(std::abs(fit["estimates"]["E_R"].get<double>() - 2.0) < 0.05);
  CHECK(std::abs(fit["estimates"]["Gamma"].get<double>() - 0.2) < 0.05);

  CHECK(run("synth-decay --events 30000 --seed 6 --out " + tmp.sub("sd")) == 0);
  CHECK(run("fit-decay --input " + tmp.sub("sd") + "/decay_events.csv --out " +
            tmp.sub("fd")) == 0);
  const nlohmann::json dfit = load_json(tmp.sub("fd") + "/decay_fit.json");
  CHECK(dfit["converged"].get<bool>());
  CHECK(std::abs(dfit["estimates"]["tau"].get<double>() - 5.0) < 0.25);
  CHECK(dfit["mode"].get<std::string>() == "joint");
}

TEST_CASE("per-channel decay fitting is selectable") {
  TempDir tmp("perchan");
  CHECK(run("synth-decay --events 30000 --seed 8 --out " + tmp.sub("sd")) == 0);
  CHECK(run("fit-decay --mode per-channel --input " + tmp.sub("sd") +
            "/decay_events.csv --out " + tmp.sub("fd")) == 0);
  const nlohmann::json fit = load_json(tmp.sub("fd") + "/decay_fit.json");
  CHECK(fit["mode"].get<std::string>() == "per-channel");
  CHECK(fit["tau_by_channel"].size() == 2);
}

TEST_CASE("the ratio pipeline is byte-identical under a fixed seed") {
  TempDir tmp("det");
  CHECK(run("ratio --seed 42 --events 20000 --out " + tmp.sub("r1")) == 0);
  CHECK(run("ratio --seed 42 --events 20000 --out " + tmp.sub("r2")) == 0);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(tmp.sub("r1")))
    names.push_back(entry.path().filename().string());
  CHECK(names.size() >= 8);
  for (const std::string& name : names) {
    CAPTURE(name);
    REQUIRE(fs::exists(fs::path(tmp.sub("r2")) / name));
    if (name == "run_meta.json") continue;  // carries the wall-clock timestamp
    CHECK(resodecay::read_text_file(fs::path(tmp.sub("r1")) / name) ==
          resodecay::read_text_file(fs::path(tmp.sub("r2")) / name));
  }

  const nlohmann::json ratio = load_json(tmp.sub("r1") + "/ratio.json");
  CHECK(std::abs(ratio["pull"].get<double>()) < 4.0);
  CHECK(ratio["hbar"].get<double>() == 1.0);
}

TEST_CASE("gamow-verify reports the contour bookkeeping") {
  TempDir tmp("gamow");
  CHECK(run("gamow-verify --out " + tmp.sub("gv")) == 0);
  const nlohmann::json j = load_json(tmp.sub("gv") + "/gamow_verify.json");
  CHECK(j["pairing"]["discrepancy"].get<double>() < 1e-8);
  CHECK(j["eigenvalue_residual"].get<double>() < 1e-6);
  for (const auto& step : j["evolution"])
    CHECK(step["rel_diff"].get<double>() < 1e-8);
  CHECK(j["catastrophe"]["growth_ratio"].get<double>() > 1e3);
}

TEST_CASE("survival curves cover both density shapes") {
  TempDir tmp("surv");
  CHECK(run("survival --shape full --out " + tmp.sub("f")) == 0);
  const nlohmann::json full = load_json(tmp.sub("f") + "/survival_summary.json");
  CHECK(full["sup_deviation_on_grid"].get<double>() < 1e-6);

  CHECK(run("survival --shape truncated --er 2 --gamma 0.02 --out " + tmp.sub("t")) == 0);
  const nlohmann::json trunc = load_json(tmp.sub("t") + "/survival_summary.json");
  CHECK(trunc["sup_deviation_on_grid"].get<double>() < 5e-3);
  CHECK(fs::exists(tmp.sub("t") + "/survival.csv"));

  CHECK(run("survival --shape pear") == 1);
}

TEST_CASE("hardy-check verdicts follow the claimed class") {
  TempDir tmp("hardy");
  resodecay::write_text_file(tmp.sub("psi.json"), kPsiJson);
  CHECK(run("hardy-check --input " + tmp.sub("psi.json") + " --out " + tmp.sub("ok")) == 0);
  CHECK(load_json(tmp.sub("ok") + "/membership.json")["pass"].get<bool>());

  CHECK(run("hardy-check --input " + tmp.sub("psi.json") + " --class H2+ --out " +
            tmp.sub("bad")) == 0);
  const nlohmann::json wrong = load_json(tmp.sub("bad") + "/membership.json");
  CHECK_FALSE(wrong["pass"].get<bool>());
  CHECK(wrong["residual"].get<double>() > 1e-3);

  resodecay::write_text_file(tmp.sub("junk.json"), "{\"terms\": 7}");
  CHECK(run("hardy-check --input " + tmp.sub("junk.json")) == 3);
}

TEST_CASE("laurent writes the canonical coefficients") {
  TempDir tmp("laurent");
  CHECK(run("laurent --out " + tmp.sub("l")) == 0);
  const nlohmann::json j = load_json(tmp.sub("l") + "/laurent.json");
  CHECK(std::abs(j["R_minus_1"][0].get<double>()) < 1e-9);
  CHECK(std::abs(j["R_minus_1"][1].get<double>() + 0.2) < 1e-9);
  CHECK(std::abs(j["R_0"][0].get<double>() - 1.0) < 1e-9);
  CHECK(std::abs(j["R_0"][1].get<double>()) < 1e-9);
  CHECK(std::abs(j["R_plus_1"][0].get<double>()) < 1e-9);
  CHECK(std::abs(j["R_plus_1"][1].get<double>()) < 1e-9);
}

TEST_CASE("config files seed the experiment and flags override them") {
  TempDir tmp("config");
  resodecay::write_text_file(
      tmp.sub("exp.json"),
      "{\"model\": {\"E_R\": 2.5, \"Gamma\": 0.1, \"residues\": {\"0\": [1.0, 0.0]}}, "
      "\"seed\": 9, \"events\": 5000, \"window\": [1.5, 3.5]}");
  CHECK(run("synth-xsec --config " + tmp.sub("exp.json") + " --out " + tmp.sub("a")) == 0);
  const nlohmann::json used = load_json(tmp.sub("a") + "/config_used.json");
  CHECK(used["model"]["E_R"].get<double>() == 2.5);
  CHECK(used["events"].get<std::uint64_t>() == 5000);

  CHECK(run("synth-xsec --config " + tmp.sub("exp.json") + " --er 2.25 --out " +
            tmp.sub("b")) == 0);
  CHECK(load_json(tmp.sub("b") + "/config_used.json")["model"]["E_R"].get<double>() ==
        2.25);

  resodecay::write_text_file(tmp.sub("broken.json"), "{\"er\": ");
  CHECK(run("synth-xsec --config " + tmp.sub("broken.json")) == 1);
}
