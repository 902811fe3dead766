#include "fertrot/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fertrot {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(where, "expected a finite number");
  return v;
}

double number_field(const json& j, const char* key, const std::string& where) {
  return number(field(j, key, where), where + "/" + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number_field(j, key, where) : fallback;
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) schema_error(where + "/" + key, "expected a string");
  return v.get<std::string>();
}

void check_version(const json& j, const std::string& where) {
  const json& v = field(j, "schema_version", where);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    schema_error(where + "/schema_version", "unsupported schema version (expected 1)");
}

template <std::size_t N>
std::array<double, N> coefficients(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  const std::string at = where + "/" + key;
  if (!v.is_array() || v.size() != N)
    schema_error(at, "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(v[i], at + "/" + std::to_string(i));
  return out;
}

ClassRow class_row(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(kClassCount))
    schema_error(where, "expected an array of 12 class values");
  ClassRow row;
  for (int i = 0; i < kClassCount; ++i) row(i) = number(v[static_cast<std::size_t>(i)], where + "/" + std::to_string(i));
  return row;
}

json class_row_json(const auto& row) {
  json a = json::array();
  for (int i = 0; i < kClassCount; ++i) a.push_back(row(i));
  return a;
}

Species species_key(const std::string& key, const std::string& where) {
  try {
    return species_from_string(key);
  } catch (const InputError& e) {
    schema_error(where, e.what());
  }
}

AssortmentMatrix price_block(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object keyed by species");
  AssortmentMatrix m = AssortmentMatrix::Zero();
  for (const auto& [name, row] : j.items()) {
    const std::string at = where + "/" + name;
    const Species s = species_key(name, at);
    if (!row.is_object()) schema_error(at, "expected an object keyed by assortment");
    for (const auto& [assortment, price] : row.items()) {
      Assortment a;
      try {
        a = assortment_from_string(assortment);
      } catch (const InputError& e) {
        schema_error(at + "/" + assortment, e.what());
      }
      m(index(s), index(a)) = number(price, at + "/" + assortment);
    }
  }
  return m;
}

json price_block_json(const AssortmentMatrix& m) {
  json j = json::object();
  for (Species s : kAllSpecies) {
    json row = json::object();
    row["sawlog"] = m(index(s), index(Assortment::Sawlog));
    row["pulp"] = m(index(s), index(Assortment::Pulp));
    j[std::string(to_string(s))] = row;
  }
  return j;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T load(const std::filesystem::path& path, T (*parse)(const json&)) {
  const json j = read_json(path);
  try {
    return parse(j);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

StandFile stand_from_json(const json& j) {
  const std::string w = "stand";
  check_version(j, w);
  StandFile f;
  f.id = string_field(j, "id", w);
  f.provenance = j.contains("provenance") ? string_field(j, "provenance", w) : "";
  f.state.age = number_field(j, "observed_age", w);
  const json& site = field(j, "site", w);
  f.state.site.site_index = number_field(site, "site_index", w + "/site");
  if (site.contains("site_class") && string_field(site, "site_class", w + "/site") != "mesic")
    schema_error(w + "/site/site_class", "unsupported site class (supported: mesic)");
  if (site.contains("soil") && string_field(site, "soil", w + "/site") != "mineral")
    schema_error(w + "/site/soil", "unsupported soil (supported: mineral)");
  f.state.fert_remaining = number_or(j, "fert_remaining", 0.0, w);
  const json& stems = field(j, "stems", w);
  if (!stems.is_object()) schema_error(w + "/stems", "expected an object keyed by species");
  for (const auto& [name, row] : stems.items()) {
    const std::string at = w + "/stems/" + name;
    f.state.stems.row(index(species_key(name, at))) = class_row(row, at);
  }
  try {
    validate(f.state);
  } catch (const PreconditionError& e) {
    schema_error(w, e.what());
  }
  return f;
}

json to_json(const StandFile& stand) {
  json stems = json::object();
  for (Species s : kAllSpecies)
    if (stand.state.has_species(s))
      stems[std::string(to_string(s))] = class_row_json(stand.state.stems.row(index(s)));
  return {{"schema_version", kSchemaVersion},
          {"id", stand.id},
          {"observed_age", stand.state.age},
          {"site", {{"site_index", stand.state.site.site_index}, {"site_class", "mesic"}, {"soil", "mineral"}}},
          {"fert_remaining", stand.state.fert_remaining},
          {"stems", stems},
          {"provenance", stand.provenance}};
}

GrowthParams growth_params_from_json(const json& j) {
  const std::string w = "growth_params";
  check_version(j, w);
  GrowthParams p;
  p.version = j.contains("version") ? string_field(j, "version", w) : "";
  if (j.contains("step_months") && number_field(j, "step_months", w) != kStepMonths)
    schema_error(w + "/step_months", "only 30-month steps are supported");
  if (j.contains("fertilization")) {
    const json& f = j["fertilization"];
    p.site_index_bump = number_or(f, "site_index_bump", kDefaultSiteIndexBump, w + "/fertilization");
    if (f.contains("duration_years") &&
        number_field(f, "duration_years", w + "/fertilization") != kFertilizationYears)
      schema_error(w + "/fertilization/duration_years", "only a 10-year effect is supported");
  }
  const json& species = field(j, "species", w);
  if (!species.is_object()) schema_error(w + "/species", "expected an object keyed by species");
  for (const auto& [name, block] : species.items()) {
    const std::string at = w + "/species/" + name;
    SpeciesGrowth& g = p[species_key(name, at)];
    g.increment = coefficients<5>(block, "increment", at);
    g.survival = coefficients<5>(block, "survival", at);
    g.ingrowth = coefficients<3>(block, "ingrowth", at);
    const auto vol = coefficients<2>(block, "volume", at);
    g.volume_scale = vol[0];
    g.volume_exponent = vol[1];
    const json& saw = field(block, "sawlog", at);
    g.sawlog_max_share = number_field(saw, "max_share", at + "/sawlog");
    g.sawlog_start_cm = number_or(saw, "start_cm", 17.0, at + "/sawlog");
    g.sawlog_full_cm = number_or(saw, "full_cm", 28.0, at + "/sawlog");
  }
  validate(p);
  return p;
}

json to_json(const GrowthParams& p) {
  json species = json::object();
  for (Species s : kAllSpecies) {
    const SpeciesGrowth& g = p[s];
    species[std::string(to_string(s))] = {
        {"increment", g.increment},
        {"survival", g.survival},
        {"ingrowth", g.ingrowth},
        {"volume", {g.volume_scale, g.volume_exponent}},
        {"sawlog", {{"max_share", g.sawlog_max_share}, {"start_cm", g.sawlog_start_cm}, {"full_cm", g.sawlog_full_cm}}}};
  }
  return {{"schema_version", kSchemaVersion},
          {"version", p.version},
          {"step_months", kStepMonths},
          {"fertilization", {{"site_index_bump", p.site_index_bump}, {"duration_years", kFertilizationYears}}},
          {"species", species}};
}

EconomicConfig econ_config_from_json(const json& j) {
  const std::string w = "econ_config";
  check_version(j, w);
  EconomicConfig c;
  const json& prices = field(j, "prices", w);
  c.prices.thinning = price_block(field(prices, "thinning", w + "/prices"), w + "/prices/thinning");
  c.prices.clearcut = price_block(field(prices, "clearcut", w + "/prices"), w + "/prices/clearcut");
  c.regeneration_cost = number_field(j, "regeneration_cost", w);
  c.fertilization_cost = number_field(j, "fertilization_cost", w);
  c.bare_land_value = number_field(j, "bare_land_value", w);
  c.interest_rate = number_or(j, "interest_rate", 0.0, w);
  c.annual_expense = number_or(j, "annual_expense", 0.0, w);
  c.carbon_factor_stem = number_or(j, "carbon_factor_stem", 1.0, w);
  c.carbon_factor_total = number_or(j, "carbon_factor_total", 2.0, w);
  c.price_level = j.contains("price_level") ? string_field(j, "price_level", w) : "2019";
  validate(c);
  return c;
}

json to_json(const EconomicConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"price_level", c.price_level},
          {"prices", {{"thinning", price_block_json(c.prices.thinning)},
                      {"clearcut", price_block_json(c.prices.clearcut)}}},
          {"regeneration_cost", c.regeneration_cost},
          {"fertilization_cost", c.fertilization_cost},
          {"bare_land_value", c.bare_land_value},
          {"interest_rate", c.interest_rate},
          {"annual_expense", c.annual_expense},
          {"carbon_factor_stem", c.carbon_factor_stem},
          {"carbon_factor_total", c.carbon_factor_total}};
}

Schedule schedule_from_json(const json& j) {
  const std::string w = "schedule";
  check_version(j, w);
  Schedule s;
  s.rotation = number_or(j, "rotation", 0.0, w);
  if (j.contains("thinnings")) {
    const json& list = j["thinnings"];
    if (!list.is_array()) schema_error(w + "/thinnings", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = w + "/thinnings/" + std::to_string(i);
      const json& t = list[i];
      ThinningSpec spec;
      spec.time = number_field(t, "time", at);
      if (t.contains("intensity")) {
        const json& q = t["intensity"];
        if (!q.is_object()) schema_error(at + "/intensity", "expected an object keyed by species");
        for (const auto& [name, v] : q.items())
          spec.intensity(index(species_key(name, at + "/intensity/" + name))) =
              number(v, at + "/intensity/" + name);
      }
      if (t.contains("allocation_exponent")) {
        const json& e = t["allocation_exponent"];
        if (!e.is_number_integer()) schema_error(at + "/allocation_exponent", "expected an integer");
        spec.allocation_exponent = e.get<int>();
      }
      if (t.contains("class_fractions")) {
        const json& cf = t["class_fractions"];
        if (!cf.is_object()) schema_error(at + "/class_fractions", "expected an object keyed by species");
        StemMatrix m = StemMatrix::Zero();
        for (const auto& [name, row] : cf.items())
          m.row(index(species_key(name, at + "/class_fractions/" + name))) =
              class_row(row, at + "/class_fractions/" + name);
        spec.class_fractions = m;
      }
      s.thinnings.push_back(spec);
    }
  }
  if (j.contains("fertilizations")) {
    const json& list = j["fertilizations"];
    if (!list.is_array()) schema_error(w + "/fertilizations", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i)
      s.fertilizations.push_back(number(list[i], w + "/fertilizations/" + std::to_string(i)));
  }
  return s;
}

json to_json(const Schedule& s) {
  json thinnings = json::array();
  for (const ThinningSpec& t : s.thinnings) {
    json q = json::object();
    for (Species sp : kAllSpecies)
      if (t.intensity(index(sp)) != 0.0) q[std::string(to_string(sp))] = t.intensity(index(sp));
    json entry = {{"time", t.time}, {"intensity", q}, {"allocation_exponent", t.allocation_exponent}};
    if (t.class_fractions) {
      json cf = json::object();
      for (Species sp : kAllSpecies)
        cf[std::string(to_string(sp))] = class_row_json(t.class_fractions->row(index(sp)));
      entry["class_fractions"] = cf;
    }
    thinnings.push_back(entry);
  }
  return {{"schema_version", kSchemaVersion},
          {"rotation", s.rotation},
          {"thinnings", thinnings},
          {"fertilizations", s.fertilizations}};
}

OptimizationConfig optimization_from_json(const json& j) {
  const std::string w = "optimization";
  if (!j.is_object()) schema_error(w, "expected an object");
  OptimizationConfig o;
  o.window.min_rotation = number_or(j, "min_rotation", o.window.min_rotation, w);
  o.window.max_rotation = number_or(j, "max_rotation", o.window.max_rotation, w);
  o.thinning_offset_min = number_or(j, "thinning_offset_min", o.thinning_offset_min, w);
  o.thinning_offset_max = number_or(j, "thinning_offset_max", o.thinning_offset_max, w);
  o.q_min = number_or(j, "q_min", o.q_min, w);
  o.q_max = number_or(j, "q_max", o.q_max, w);
  o.q_step = number_or(j, "q_step", o.q_step, w);
  o.epsilon = number_or(j, "epsilon", o.epsilon, w);
  if (j.contains("exponents")) {
    const json& e = j["exponents"];
    if (!e.is_array()) schema_error(w + "/exponents", "expected an array of integers");
    o.exponents.clear();
    for (const json& v : e) {
      if (!v.is_number_integer()) schema_error(w + "/exponents", "expected integers");
      o.exponents.push_back(v.get<int>());
    }
  }
  if (j.contains("species_profiles")) {
    if (!j["species_profiles"].is_boolean()) schema_error(w + "/species_profiles", "expected a boolean");
    o.species_profiles = j["species_profiles"].get<bool>();
  }
  if (j.contains("max_thinnings")) {
    if (!j["max_thinnings"].is_number_integer()) schema_error(w + "/max_thinnings", "expected an integer");
    o.max_thinnings = j["max_thinnings"].get<int>();
  }
  validate(o);
  return o;
}

json to_json(const OptimizationConfig& o) {
  return {{"min_rotation", o.window.min_rotation},
          {"max_rotation", o.window.max_rotation},
          {"thinning_offset_min", o.thinning_offset_min},
          {"thinning_offset_max", o.thinning_offset_max},
          {"q_min", o.q_min},
          {"q_max", o.q_max},
          {"q_step", o.q_step},
          {"exponents", o.exponents},
          {"species_profiles", o.species_profiles},
          {"epsilon", o.epsilon},
          {"max_thinnings", o.max_thinnings}};
}

RunManifest manifest_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string w = "manifest";
  check_version(j, w);
  RunManifest m;
  const json& stands = field(j, "stands", w);
  if (!stands.is_array() || stands.empty()) schema_error(w + "/stands", "expected a non-empty array of paths");
  for (const json& s : stands) {
    if (!s.is_string()) schema_error(w + "/stands", "expected string paths");
    m.stands.push_back(resolve(base_dir, s.get<std::string>()));
  }
  m.growth_params = resolve(base_dir, string_field(j, "growth_params", w));
  m.econ_config = resolve(base_dir, string_field(j, "econ_config", w));
  if (j.contains("scenarios")) {
    const json& kinds = j["scenarios"];
    if (!kinds.is_array()) schema_error(w + "/scenarios", "expected an array of scenario names");
    for (const json& k : kinds) {
      if (!k.is_string()) schema_error(w + "/scenarios", "expected scenario names");
      try {
        m.scenarios.push_back(scenario_kind_from_string(k.get<std::string>()));
      } catch (const InputError& e) {
        schema_error(w + "/scenarios", e.what());
      }
    }
  } else {
    m.scenarios.assign(kAllScenarioKinds.begin(), kAllScenarioKinds.end());
  }
  if (j.contains("out_dir")) m.out_dir = resolve(base_dir, string_field(j, "out_dir", w));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) schema_error(w + "/seed", "expected a non-negative integer");
    m.seed = j["seed"].get<unsigned long>();
  }
  if (j.contains("optimization")) m.optimization = optimization_from_json(j["optimization"]);
  return m;
}

json to_json(const CycleExpectation& e) {
  return {{"tau", e.tau},
          {"expected_profit_rate", e.expected_profit_rate},
          {"expected_capitalization", e.expected_capitalization},
          {"expected_return_rate", e.expected_return_rate},
          {"expected_volume", e.expected_volume}};
}

json to_json(const PairedDelta& d) {
  json j = {{"label", d.label},
            {"tau_reference", d.tau_reference},
            {"tau_treated", d.tau_treated},
            {"delta_tau", d.delta_tau},
            {"delta_r", d.delta_r},
            {"delta_v", d.delta_v},
            {"delta_v_pct", d.delta_v_pct},
            {"delta_k", d.delta_k},
            {"extension_expense", d.extension_expense},
            {"stock_expense_rate", nullptr},
            {"extension_only_rate", nullptr},
            {"carbon_stem", d.carbon_stem},
            {"carbon_total", d.carbon_total}};
  if (d.stock_expense_rate) j["stock_expense_rate"] = *d.stock_expense_rate;
  if (d.extension_only_rate) j["extension_only_rate"] = *d.extension_only_rate;
  return j;
}

json to_json(const ScenarioResult& r) {
  auto optional_delta = [](const std::optional<PairedDelta>& d) -> json {
    return d ? to_json(*d) : json(nullptr);
  };
  return {{"kind", std::string(to_string(r.kind))},
          {"tau_baseline", r.tau_baseline},
          {"tau_fertilized", r.tau_fertilized},
          {"baseline_schedule", to_json(r.baseline_schedule)},
          {"fertilized_schedule", to_json(r.fertilized_schedule)},
          {"at_optima", to_json(r.at_optima)},
          {"fixed_rotation", optional_delta(r.fixed_rotation)},
          {"extension_unfertilized", optional_delta(r.extension_unfertilized)},
          {"fertilized_vs_extended", optional_delta(r.fertilized_vs_extended)}};
}

StandFile load_stand(const std::filesystem::path& path) { return load(path, &stand_from_json); }
GrowthParams load_growth_params(const std::filesystem::path& path) {
  return load(path, &growth_params_from_json);
}
EconomicConfig load_econ_config(const std::filesystem::path& path) {
  return load(path, &econ_config_from_json);
}
Schedule load_schedule(const std::filesystem::path& path) { return load(path, &schedule_from_json); }

RunManifest load_manifest(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    return manifest_from_json(j, path.parent_path());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string curve_csv(const std::vector<CycleExpectation>& curve, const EconomicConfig& cfg) {
  std::ostringstream os;
  os << "tau,expected_profit_rate,expected_capitalization,expected_return_rate,expected_volume,"
        "carbon_stem,carbon_total\n";
  for (const CycleExpectation& e : curve)
    os << format_number(e.tau) << ',' << format_number(e.expected_profit_rate) << ','
       << format_number(e.expected_capitalization) << ',' << format_number(e.expected_return_rate)
       << ',' << format_number(e.expected_volume) << ','
       << format_number(carbon_equivalent(e.expected_volume, cfg, CarbonMode::Stem)) << ','
       << format_number(carbon_equivalent(e.expected_volume, cfg, CarbonMode::Total)) << '\n';
  return os.str();
}

std::string ledger_csv(const Ledger& ledger) {
  std::ostringstream os;
  os << "t,K_left,K_right,profit_rate_left,profit_rate_right,volume_left,volume_right,"
        "withdrawal,investment,writeoff,realization_loss\n";
  for (const LedgerNode& n : ledger.nodes)
    os << format_number(n.time) << ',' << format_number(n.capital_left) << ','
       << format_number(n.capital_right) << ',' << format_number(n.profit_left) << ','
       << format_number(n.profit_right) << ',' << format_number(n.volume_left) << ','
       << format_number(n.volume_right) << ',' << format_number(n.withdrawal) << ','
       << format_number(n.investment) << ',' << format_number(n.writeoff) << ','
       << format_number(n.realization_loss) << '\n';
  return os.str();
}

std::string trace_csv(const std::vector<SearchTraceRow>& trace) {
  std::ostringstream os;
  os << "iteration,candidate,max_return_rate,evaluations\n";
  for (const SearchTraceRow& r : trace)
    os << r.iteration << ",\"" << r.candidate << "\"," << format_number(r.max_return_rate) << ','
       << r.evaluations << '\n';
  return os.str();
}

std::string paired_curve_csv(const std::vector<CycleExpectation>& baseline,
                             const std::vector<CycleExpectation>& fertilized, bool volume) {
  std::map<double, std::pair<std::optional<double>, std::optional<double>>> rows;
  auto value = [volume](const CycleExpectation& e) {
    return volume ? e.expected_volume : e.expected_return_rate;
  };
  for (const CycleExpectation& e : baseline) rows[e.tau].first = value(e);
  for (const CycleExpectation& e : fertilized) rows[e.tau].second = value(e);
  std::ostringstream os;
  os << (volume ? "tau,baseline_expected_volume,fertilized_expected_volume\n"
                : "tau,baseline_expected_return_rate,fertilized_expected_return_rate\n");
  for (const auto& [tau, v] : rows) {
    os << format_number(tau) << ',';
    if (v.first) os << format_number(*v.first);
    os << ',';
    if (v.second) os << format_number(*v.second);
    os << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fertrot
