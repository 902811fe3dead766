// fertrot: batch command line for stand simulation, thinning optimization,
// fertilization scenarios and synthetic stand generation.

#include "fertrot/io.hpp"
#include "fertrot/stand_gen.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace fertrot;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInternal = 4;

fs::path config_path(const std::string& flag, const char* env, const fs::path& fallback,
                     const char* what) {
  if (!flag.empty()) return flag;
  if (const char* v = std::getenv(env); v && *v) return v;
  if (!fallback.empty()) return fallback;
  throw InputError(std::string("no ") + what + " given (flag or " + env + ")");
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Common {
  std::string growth;
  std::string econ;
  std::string out_dir;
  std::string opt_config;
};

OptimizationConfig load_optimization(const std::string& path) {
  if (path.empty()) return {};
  const nlohmann::json j = read_json(path);
  try {
    return optimization_from_json(j);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

int cmd_simulate(const std::string& stand_path, const std::string& schedule_path, const Common& c) {
  const StandFile stand = load_stand(stand_path);
  const GrowthParams growth = load_growth_params(config_path(c.growth, "FERTROT_GROWTH_PARAMS", {}, "growth parameters"));
  const EconomicConfig cfg = load_econ_config(config_path(c.econ, "FERTROT_ECON_CONFIG", {}, "economic config"));
  const OptimizationConfig opt = load_optimization(c.opt_config);
  const Schedule schedule = schedule_path.empty() ? Schedule{} : load_schedule(schedule_path);
  const SimulationResult sim = simulate_schedule(stand.state, schedule, growth, cfg, opt.window);
  const fs::path out(c.out_dir);
  write_file_atomic(out / "curves.csv", curve_csv(sim.curve, cfg));
  if (sim.ledger) write_file_atomic(out / "ledger.csv", ledger_csv(*sim.ledger));
  return 0;
}

int cmd_optimize(const std::string& stand_path, const Common& c) {
  const StandFile stand = load_stand(stand_path);
  const GrowthParams growth = load_growth_params(config_path(c.growth, "FERTROT_GROWTH_PARAMS", {}, "growth parameters"));
  const EconomicConfig cfg = load_econ_config(config_path(c.econ, "FERTROT_ECON_CONFIG", {}, "economic config"));
  const OptimizationConfig opt = load_optimization(c.opt_config);
  const SearchResult result = greedy_thinning_search(stand.state, growth, cfg, opt);
  const fs::path out(c.out_dir);
  write_file_atomic(out / "schedule.json", to_json(result.schedule).dump(2) + "\n");
  write_file_atomic(out / "trace.csv", trace_csv(result.trace));
  write_file_atomic(out / "curves.csv", curve_csv(result.curve, cfg));
  return 0;
}

struct StandRun {
  StandFile stand;
  Baseline baseline;
  std::vector<std::optional<ScenarioResult>> results;
  std::vector<std::string> skip_reasons;
};

int cmd_scenario(const std::string& manifest_path, const Common& c, int jobs) {
  const RunManifest m = load_manifest(manifest_path);
  const GrowthParams growth = load_growth_params(config_path(c.growth, "FERTROT_GROWTH_PARAMS", m.growth_params, "growth parameters"));
  const EconomicConfig cfg = load_econ_config(config_path(c.econ, "FERTROT_ECON_CONFIG", m.econ_config, "economic config"));
  const OptimizationConfig opt = c.opt_config.empty() ? m.optimization : load_optimization(c.opt_config);
  const fs::path out = !c.out_dir.empty() ? fs::path(c.out_dir) : m.out_dir;
  if (out.empty()) throw InputError("no output directory (flag or manifest out_dir)");

  std::vector<StandRun> runs(m.stands.size());
  for (std::size_t i = 0; i < m.stands.size(); ++i) {
    runs[i].stand = load_stand(m.stands[i]);
    runs[i].results.resize(m.scenarios.size());
    runs[i].skip_reasons.resize(m.scenarios.size());
  }

  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    runs[i].baseline = run_baseline(runs[i].stand.state, growth, cfg, opt);
  });
  const std::size_t kinds = m.scenarios.size();
  parallel_for(runs.size() * kinds, jobs, [&](std::size_t n) {
    StandRun& run = runs[n / kinds];
    const std::size_t k = n % kinds;
    try {
      run.results[k] = run_scenario(m.scenarios[k], run.stand.state, growth, cfg, opt, run.baseline);
    } catch (const PreconditionError& e) {
      run.skip_reasons[k] = e.what();
    }
  });

  nlohmann::json stands = nlohmann::json::array();
  std::string expense = "stand_id,unfertilized_expense,fertilized_expense,unfertilized_stock_expense_rate,"
                        "fertilized_stock_expense_rate\n";
  auto opt_number = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const StandRun& run : runs) {
    nlohmann::json scenarios = nlohmann::json::array();
    nlohmann::json skipped = nlohmann::json::array();
    for (std::size_t k = 0; k < kinds; ++k) {
      const std::string kind(to_string(m.scenarios[k]));
      if (!run.results[k]) {
        skipped.push_back({{"kind", kind}, {"reason", run.skip_reasons[k]}});
        continue;
      }
      const ScenarioResult& r = *run.results[k];
      const fs::path dir = out / run.stand.id / kind;
      write_file_atomic(dir / "return_rate.csv", paired_curve_csv(r.baseline_curve, r.fertilized_curve, false));
      write_file_atomic(dir / "volume.csv", paired_curve_csv(r.baseline_curve, r.fertilized_curve, true));
      scenarios.push_back(to_json(r));
      if (r.kind == ScenarioKind::AtMaturityExtendTen)
        expense += run.stand.id + ',' + format_number(r.extension_unfertilized->extension_expense) + ',' +
                   format_number(r.at_optima.extension_expense) + ',' +
                   opt_number(r.extension_unfertilized->stock_expense_rate) + ',' +
                   opt_number(r.at_optima.stock_expense_rate) + '\n';
    }
    stands.push_back({{"id", run.stand.id},
                      {"baseline", {{"schedule", to_json(run.baseline.search.schedule)},
                                    {"tau", run.baseline.tau},
                                    {"max_return_rate", run.baseline.search.max_return_rate}}},
                      {"scenarios", scenarios},
                      {"skipped", skipped}});
  }
  write_file_atomic(out / "extension_expense.csv", expense);
  const nlohmann::json summary = {{"schema_version", kSchemaVersion},
                                  {"price_level", cfg.price_level},
                                  {"growth_params_version", growth.version},
                                  {"optimization", to_json(opt)},
                                  {"stands", stands}};
  write_file_atomic(out / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_gen_stands(unsigned long seed, int count, const std::string& out_dir) {
  const std::vector<StandFile> stands = generate_stands(seed, count);
  for (const StandFile& s : stands)
    write_file_atomic(fs::path(out_dir) / (s.id + ".json"), to_json(s).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boreal stand rotation economics: simulation, thinning search, fertilization scenarios"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--growth-params", common.growth, "Growth parameter file (JSON)");
    sub->add_option("--econ-config", common.econ, "Economic config file (JSON)");
    sub->add_option("--opt-config", common.opt_config, "Optimization config file (JSON)");
  };

  std::string stand;
  std::string schedule;
  auto* simulate = app.add_subcommand("simulate", "Expected return rate and volume versus rotation age");
  simulate->add_option("--stand", stand, "Stand file (JSON)")->required();
  simulate->add_option("--schedule", schedule, "Schedule file (JSON); empty schedule when omitted");
  simulate->add_option("--out-dir", common.out_dir, "Output directory")->required();
  add_common(simulate);

  auto* optimize = app.add_subcommand("optimize", "Thinning schedule search");
  optimize->add_option("--stand", stand, "Stand file (JSON)")->required();
  optimize->add_option("--out-dir", common.out_dir, "Output directory")->required();
  add_common(optimize);

  std::string manifest;
  int jobs = 1;
  auto* scenario = app.add_subcommand("scenario", "Fertilization scenarios for all stands of a manifest");
  scenario->add_option("--manifest", manifest, "Run manifest (JSON)")->required();
  scenario->add_option("--out-dir", common.out_dir, "Output directory (overrides manifest)");
  scenario->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_common(scenario);

  unsigned long seed = 1;
  int count = 5;
  auto* gen = app.add_subcommand("gen-stands", "Generate synthetic stand files");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--count", count, "Number of stands")->check(CLI::PositiveNumber);
  gen->add_option("--out-dir", common.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*simulate) return cmd_simulate(stand, schedule, common);
    if (*optimize) return cmd_optimize(stand, common);
    if (*scenario) return cmd_scenario(manifest, common, jobs);
    if (*gen) return cmd_gen_stands(seed, count, common.out_dir);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
