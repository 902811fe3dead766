#include "doctest.h"
#include "cli_support.hpp"
#include "support.hpp"

#include <vector>

using namespace fertrot;
using fertrot::test::data_dir;
using fertrot::test::run_cli;
using fertrot::test::slurp;
using fertrot::test::TempDir;

namespace {

std::string stand_path(int i) {
  return (data_dir() / "stands" / ("synthetic-1-" + std::to_string(i) + ".json")).string();
}

std::string configs() {
  return " --growth-params " + (data_dir() / "growth_params.json").string() + " --econ-config " +
         (data_dir() / "econ_config.json").string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<double> column(const std::string& csv, std::size_t col) {
  std::vector<double> out;
  const auto rows = lines(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream in(rows[i]);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) std::getline(in, cell, ',');
    out.push_back(cell.empty() ? std::nan("") : std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("simulate writes one curve row per step") {
  TempDir out;
  REQUIRE(run_cli("simulate --stand " + stand_path(1) + configs() + " --out-dir " + out.str()) == 0);
  const double age = fertrot::test::bundled_stand(1).state.age;
  const auto rows = lines(slurp(out.path() / "curves.csv"));
  CHECK(rows.size() == 1 + static_cast<std::size_t>((120.0 - age) / kStepYears));
  CHECK(rows[0].rfind("tau,", 0) == 0);
  CHECK_FALSE(std::filesystem::exists(out.path() / "ledger.csv"));

  TempDir again;
  REQUIRE(run_cli("simulate --stand " + stand_path(1) + configs() + " --out-dir " + again.str()) == 0);
  CHECK(slurp(again.path() / "curves.csv") == slurp(out.path() / "curves.csv"));
}

TEST_CASE("malformed input exits 2 without output") {
  TempDir dir;
  const auto bad = dir.path() / "bad.json";
  {
    std::ofstream f(bad);
    f << "{ \"schema_version\": 1, \"id\": ";
  }
  const auto out = dir.path() / "out";
  CHECK(run_cli("simulate --stand " + bad.string() + configs() + " --out-dir " + out.string()) == 2);
  CHECK_FALSE(std::filesystem::exists(out));
  CHECK(run_cli("simulate --out-dir " + out.string()) == 2);
  CHECK(run_cli("bogus") == 2);
}

TEST_CASE("precondition violations exit 3") {
  TempDir dir;
  const auto sched = dir.path() / "schedule.json";
  {
    std::ofstream f(sched);
    f << R"({"schema_version": 1, "thinnings": [{"time": 10, "intensity": {"spruce": 0.3}}]})";
  }
  const auto out = dir.path() / "out";
  CHECK(run_cli("simulate --stand " + stand_path(1) + " --schedule " + sched.string() + configs() +
                " --out-dir " + out.string()) == 3);
  CHECK_FALSE(std::filesystem::exists(out));
}

TEST_CASE("optimized schedule reproduces its curves through simulate") {
  TempDir opt_dir, sim_dir, cfg_dir;
  const auto opt_cfg = cfg_dir.path() / "opt.json";
  {
    std::ofstream f(opt_cfg);
    f << R"({"q_step": 0.1, "exponents": [0, 1, 2]})";
  }
  REQUIRE(run_cli("optimize --stand " + stand_path(2) + configs() + " --opt-config " + opt_cfg.string() +
                  " --out-dir " + opt_dir.str()) == 0);
  const auto trace = column(slurp(opt_dir.path() / "trace.csv"), 2);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] > trace[i - 1]);

  REQUIRE(run_cli("simulate --stand " + stand_path(2) + " --schedule " +
                  (opt_dir.path() / "schedule.json").string() + configs() + " --out-dir " + sim_dir.str()) == 0);
  CHECK(slurp(sim_dir.path() / "curves.csv") == slurp(opt_dir.path() / "curves.csv"));
  CHECK(std::filesystem::exists(sim_dir.path() / "ledger.csv"));
}

TEST_CASE("summary deltas are recomputable from the emitted curves") {
  TempDir out;
  REQUIRE(run_cli("scenario --manifest " + (data_dir() / "manifest.json").string() + " --out-dir " + out.str()) == 0);
  const nlohmann::json summary = nlohmann::json::parse(slurp(out.path() / "summary.json"));
  REQUIRE(summary["stands"].size() == 5);
  int sets = 0;
  for (const auto& stand : summary["stands"]) {
    CHECK(stand["scenarios"].size() + stand["skipped"].size() == 4);
    for (const auto& sc : stand["scenarios"]) {
      ++sets;
      const auto dir = out.path() / stand["id"].get<std::string>() / sc["kind"].get<std::string>();
      const std::string rr = slurp(dir / "return_rate.csv");
      const auto tau = column(rr, 0), base = column(rr, 1), fert = column(rr, 2);
      const double tb = sc["tau_baseline"].get<double>(), tf = sc["tau_fertilized"].get<double>();
      double rb = std::nan(""), rf = std::nan("");
      for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] == tb) rb = base[i];
        if (tau[i] == tf) rf = fert[i];
      }
      CHECK(sc["at_optima"]["delta_r"].get<double>() == doctest::Approx(rf - rb).epsilon(1e-12));
    }
  }
  CHECK(sets <= 20);
  CHECK(sets >= 15);
}

TEST_CASE("gen-stands is deterministic per seed") {
  TempDir a, b;
  REQUIRE(run_cli("gen-stands --seed 1 --count 5 --out-dir " + a.str()) == 0);
  REQUIRE(run_cli("gen-stands --seed 1 --count 5 --out-dir " + b.str()) == 0);
  const auto ta = fertrot::test::tree(a.path());
  CHECK(ta.size() == 5);
  CHECK(ta == fertrot::test::tree(b.path()));
  // bundled stands are exactly this output
  for (int i = 1; i <= 5; ++i)
    CHECK(ta.at("synthetic-1-" + std::to_string(i) + ".json") == slurp(stand_path(i)));
}
