#include "cspgeo/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "cspgeo/algorithms.hpp"
#include "cspgeo/combinatorics.hpp"
#include "cspgeo/detail/parallel.hpp"
#include "cspgeo/errors.hpp"
#include "cspgeo/geometry.hpp"
#include "cspgeo/io.hpp"
#include "cspgeo/moments.hpp"
#include "cspgeo/processes.hpp"
#include "cspgeo/transfer.hpp"

namespace cspgeo {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::shatter_scan, "shatter-scan"},
    {ExperimentKind::rigidity_scan, "rigidity-scan"},
    {ExperimentKind::looseness_scan, "looseness-scan"},
    {ExperimentKind::heuristic_sweep, "heuristic-sweep"},
    {ExperimentKind::transfer_compare, "transfer-compare"},
    {ExperimentKind::moment_curves, "moment-curves"},
    {ExperimentKind::concentration, "concentration"},
};

const std::set<std::string> kStatistics = {"loose_variables", "log_solution_count", "planted_energy"};

}  // namespace

std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) {
      return name;
    }
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [kind, n] : kKinds) {
    if (n == name) {
      return kind;
    }
  }
  throw ParameterError("unknown experiment kind '" + std::string(name) + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Config ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* section, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) {
    throw ParameterError(std::string(section) + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (auto k : known) {
      found = found || k == key;
    }
    if (!found) {
      throw ParameterError(std::string(section) + ": unknown field '" + key + "'");
    }
  }
}

template <class T>
void read_field(const json& j, const char* key, T& out, bool required = false) {
  if (!j.contains(key)) {
    if (required) {
      throw ParameterError(std::string("config: missing field '") + key + "'");
    }
    return;
  }
  try {
    const auto& v = j.at(key);
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.template get<long long>() >= 0)) {
        throw ParameterError("");
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        throw ParameterError("");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        throw ParameterError("");
      }
    }
    out = v.template get<T>();
  } catch (const std::exception&) {
    throw ParameterError(std::string("config: field '") + key + "' has the wrong type");
  }
}

std::string_view source_name(InstanceSource s) { return s == InstanceSource::uniform ? "uniform" : "planted"; }
std::string_view sampling_name(SamplingMode s) {
  return s == SamplingMode::without_replacement ? "without_replacement" : "independent";
}
std::string_view balance_name(PlantBalance b) { return b == PlantBalance::uniform ? "uniform" : "balanced"; }

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"schema_version", "experiment", "ensemble", "n", "k", "densities", "trials", "seed", "budgets", "process",
              "source", "sampling", "balance", "statistic", "output_dir"});
  ExperimentConfig c;
  read_field(j, "schema_version", c.schema_version);
  std::string name;
  read_field(j, "experiment", name, true);
  c.experiment = parse_experiment_kind(name);
  read_field(j, "ensemble", name, true);
  c.ensemble = parse_ensemble(name);
  read_field(j, "n", c.n, true);
  read_field(j, "k", c.k, true);
  if (!j.contains("densities") || !j.at("densities").is_array()) {
    throw ParameterError("config: 'densities' must be an array of numbers");
  }
  for (const auto& d : j.at("densities")) {
    if (!d.is_number()) {
      throw ParameterError("config: 'densities' must be an array of numbers");
    }
    c.densities.push_back(d.get<double>());
  }
  read_field(j, "trials", c.trials, true);
  read_field(j, "seed", c.seed, true);
  if (j.contains("budgets")) {
    const auto& b = j.at("budgets");
    check_keys(b, "budgets", {"enumeration", "list_coloring"});
    read_field(b, "enumeration", c.budgets.enumeration);
    read_field(b, "list_coloring", c.budgets.list_coloring);
  }
  if (j.contains("process")) {
    const auto& p = j.at("process");
    check_keys(p, "process", {"gamma", "q", "lambda", "adjacency_radius", "z_threshold"});
    read_field(p, "gamma", c.process.gamma);
    read_field(p, "q", c.process.q);
    read_field(p, "lambda", c.process.lambda);
    read_field(p, "adjacency_radius", c.process.adjacency_radius);
    read_field(p, "z_threshold", c.process.z_threshold);
  }
  if (j.contains("source")) {
    read_field(j, "source", name);
    if (name != "uniform" && name != "planted") {
      throw ParameterError("config: 'source' must be 'uniform' or 'planted'");
    }
    c.source = name == "uniform" ? InstanceSource::uniform : InstanceSource::planted;
  }
  if (j.contains("sampling")) {
    read_field(j, "sampling", name);
    if (name != "without_replacement" && name != "independent") {
      throw ParameterError("config: 'sampling' must be 'without_replacement' or 'independent'");
    }
    c.sampling = name == "independent" ? SamplingMode::independent : SamplingMode::without_replacement;
  }
  if (j.contains("balance")) {
    read_field(j, "balance", name);
    if (name != "uniform" && name != "balanced") {
      throw ParameterError("config: 'balance' must be 'uniform' or 'balanced'");
    }
    c.balance = name == "balanced" ? PlantBalance::balanced : PlantBalance::uniform;
  }
  read_field(j, "statistic", c.statistic);
  read_field(j, "output_dir", c.output_dir);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"schema_version", c.schema_version},
              {"experiment", std::string(to_string(c.experiment))},
              {"ensemble", std::string(to_string(c.ensemble))},
              {"n", c.n},
              {"k", c.k},
              {"densities", c.densities},
              {"trials", c.trials},
              {"seed", c.seed},
              {"budgets", {{"enumeration", c.budgets.enumeration}, {"list_coloring", c.budgets.list_coloring}}},
              {"process",
               {{"gamma", c.process.gamma},
                {"q", c.process.q},
                {"lambda", c.process.lambda},
                {"adjacency_radius", c.process.adjacency_radius},
                {"z_threshold", c.process.z_threshold}}},
              {"source", std::string(source_name(c.source))},
              {"sampling", std::string(sampling_name(c.sampling))},
              {"balance", std::string(balance_name(c.balance))},
              {"statistic", c.statistic},
              {"output_dir", c.output_dir}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParameterError("cannot open config file " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

bool needs_enumeration(ExperimentKind k) {
  return k == ExperimentKind::shatter_scan || k == ExperimentKind::transfer_compare ||
         k == ExperimentKind::concentration;
}

unsigned value_count(const ExperimentConfig& c) { return c.ensemble == Ensemble::coloring ? c.k : 2; }

}  // namespace

std::vector<ConfigIssue> validate_config(const ExperimentConfig& c) {
  std::vector<ConfigIssue> issues;
  auto add = [&](std::string field, std::string msg) { issues.push_back({std::move(field), std::move(msg)}); };
  if (c.schema_version != kConfigSchemaVersion) {
    add("schema_version", "unsupported schema version " + std::to_string(c.schema_version));
  }
  if (c.n == 0) {
    add("n", "must be at least 1");
  }
  if (c.ensemble == Ensemble::coloring) {
    if (c.k < 2 || c.k > 255) {
      add("k", "coloring needs 2 <= k <= 255");
    }
    if (c.experiment == ExperimentKind::heuristic_sweep && c.k > 64) {
      add("k", "greedy coloring supports at most 64 colors");
    }
  } else {
    const unsigned lo = c.ensemble == Ensemble::nae ? 2 : 1;
    if (c.k < lo || c.k > c.n || c.k > 24) {
      add("k", "constraint width must satisfy " + std::to_string(lo) + " <= k <= min(n, 24)");
    }
  }
  if (c.densities.empty()) {
    add("densities", "density grid is empty");
  }
  for (std::size_t i = 0; i < c.densities.size(); ++i) {
    const double d = c.densities[i];
    if (!std::isfinite(d) || d < 0) {
      add("densities", "densities must be finite and non-negative");
      break;
    }
    if (i > 0 && !(d > c.densities[i - 1])) {
      add("densities", "density grid must be strictly increasing");
      break;
    }
  }
  if (c.trials == 0) {
    add("trials", "must be at least 1");
  }
  if (c.experiment == ExperimentKind::transfer_compare && c.trials < 100) {
    add("trials", "transfer-compare needs at least 100 samples per grid point");
  }
  if (!(c.process.gamma > 0)) {
    add("process.gamma", "must be positive");
  }
  if (c.process.q < 2) {
    add("process.q", "must be at least 2");
  }
  if (!(c.process.lambda >= 0)) {
    add("process.lambda", "must be non-negative");
  }
  if (c.process.adjacency_radius < 1) {
    add("process.adjacency_radius", "must be at least 1");
  }
  if (c.budgets.enumeration == 0 || c.budgets.list_coloring == 0) {
    add("budgets", "budgets must be positive");
  }
  if (c.experiment == ExperimentKind::looseness_scan && c.ensemble != Ensemble::coloring) {
    add("ensemble", "looseness-scan runs the recoloring process and needs the coloring ensemble");
  }
  if ((c.experiment == ExperimentKind::rigidity_scan || c.experiment == ExperimentKind::heuristic_sweep) &&
      c.ensemble == Ensemble::nae) {
    add("ensemble", std::string(to_string(c.experiment)) + " supports coloring and sat only");
  }
  if (c.experiment == ExperimentKind::transfer_compare && !kStatistics.count(c.statistic)) {
    add("statistic", "unknown statistic '" + c.statistic + "'");
  }
  if (needs_enumeration(c.experiment) && c.n > 0) {
    const auto states = checked_pow(value_count(c), c.n);
    if (!states || *states > c.budgets.enumeration) {
      add("budgets.enumeration", std::to_string(value_count(c)) + "^" + std::to_string(c.n) +
                                     " assignments exceed the enumeration budget of " +
                                     std::to_string(c.budgets.enumeration));
    }
  }
  if (issues.empty() && c.experiment != ExperimentKind::moment_curves) {
    const auto cap = universe_size(c.ensemble, c.n, c.k);
    for (double d : c.densities) {
      if (constraints_for_density(c.ensemble, c.n, d) > cap) {
        add("densities", "density " + format_double(d) + " needs more constraints than the universe holds");
        break;
      }
    }
  }
  return issues;
}

// Tables and records ------------------------------------------------------------------

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out += (i ? "," : "") + columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + row[i];
    }
    out += '\n';
  }
  return out;
}

const Table* ResultRecord::table(std::string_view name) const {
  for (const auto& t : tables) {
    if (t.name == name) {
      return &t;
    }
  }
  return nullptr;
}

unsigned worker_count() {
  if (const char* env = std::getenv("CSPGEO_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<unsigned>(v);
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

std::string cell(double v) { return format_double(v); }
std::string cell(long double v) { return format_double(static_cast<double>(v)); }
std::string cell(bool v) { return v ? "1" : "0"; }
template <class T>
  requires std::is_integral_v<T>
std::string cell(T v) {
  return std::to_string(v);
}
template <class T>
std::string cell(const std::optional<T>& v) {
  return v ? cell(*v) : std::string();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) {
    return std::nan("");
  }
  long double s = 0;
  for (double x : v) {
    s += x;
  }
  return static_cast<double>(s / v.size());
}

Seed trial_seed(const ExperimentConfig& c, std::size_t g, std::uint64_t t) {
  return derive_seed(derive_seed(Seed{c.seed}, g), t);
}

EnsembleParams params_for(const ExperimentConfig& c, double density) {
  EnsembleParams p;
  p.ensemble = c.ensemble;
  p.n = c.n;
  p.k = c.k;
  p.m = constraints_for_density(c.ensemble, c.n, density);
  p.sampling.mode = c.sampling;
  p.planting.sampling.mode = c.sampling;
  p.planting.balance = c.balance;
  return p;
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

/// Runs fn(g, t, seed) for every grid point and trial; failures are recorded, never thrown.
template <class R, class Fn>
std::vector<std::optional<R>> run_trials(const ExperimentConfig& c, unsigned workers, ResultRecord& rec, Fn&& fn) {
  const std::size_t grid = c.densities.size();
  const std::uint64_t total = grid * c.trials;
  std::vector<std::optional<R>> out(total);
  std::vector<std::string> errors(total);
  detail::parallel_for(total, workers, [&](std::uint64_t i) {
    const std::size_t g = i / c.trials;
    const std::uint64_t t = i % c.trials;
    try {
      out[i] = fn(g, t, trial_seed(c, g, t));
    } catch (...) {
      errors[i] = describe(std::current_exception());
    }
  });
  for (std::uint64_t i = 0; i < total; ++i) {
    if (!out[i]) {
      const std::size_t g = i / c.trials;
      const std::uint64_t t = i % c.trials;
      rec.failures.push_back({g, t, trial_seed(c, g, t).value, errors[i]});
    }
  }
  return out;
}

template <class Fn>
void for_each_grid_point(const ExperimentConfig& c, ResultRecord& rec, Fn&& fn) {
  for (std::size_t g = 0; g < c.densities.size(); ++g) {
    try {
      fn(g);
    } catch (...) {
      rec.failures.push_back({g, std::nullopt, derive_seed(Seed{c.seed}, g).value, describe(std::current_exception())});
    }
  }
}

// Individual experiments -----------------------------------------------------------------

struct ShatterTrial {
  std::uint64_t m = 0;
  ShatterReport report;
};

void run_shatter(const ExperimentConfig& c, unsigned workers, ResultRecord& rec) {
  const auto results = run_trials<ShatterTrial>(c, workers, rec, [&](std::size_t g, std::uint64_t, Seed ts) {
    const auto p = params_for(c, c.densities[g]);
    const Instance inst = c.source == InstanceSource::uniform ? generate_uniform(p, derive_seed(ts, 0))
                                                              : generate_planted(p, derive_seed(ts, 0)).instance;
    const auto solutions = enumerate_solutions(inst, c.budgets.enumeration);
    const auto clusters = cluster_decomposition(solutions, c.process.adjacency_radius);
    return ShatterTrial{p.m, shatter_report(solutions, clusters, c.budgets.enumeration)};
  });
  Table summary{"summary",
                {"density", "m", "trials", "completed", "empty_fraction", "mean_solutions", "mean_region_count",
                 "mean_log_region_count_per_n", "mean_max_region_fraction", "multi_region_fraction",
                 "mean_min_distance_per_n", "mean_min_barrier_per_n"},
                {}};
  Table trials{"trials",
               {"density", "trial", "m", "solutions", "regions", "max_region_fraction", "min_distance", "min_barrier"},
               {}};
  for (std::size_t g = 0; g < c.densities.size(); ++g) {
    std::vector<double> sols, regions, logs, maxfrac, dist, barrier;
    std::uint64_t empty = 0, multi = 0, done = 0;
    for (std::uint64_t t = 0; t < c.trials; ++t) {
      const auto& r = results[g * c.trials + t];
      if (!r) {
        continue;
      }
      ++done;
      const auto& rep = r->report;
      trials.rows.push_back({cell(c.densities[g]), cell(t), cell(r->m), cell(rep.solution_count),
                             cell(rep.region_count), cell(rep.max_region_fraction),
                             cell(rep.min_interregion_distance), cell(rep.min_barrier)});
      sols.push_back(static_cast<double>(rep.solution_count));
      regions.push_back(static_cast<double>(rep.region_count));
      if (rep.empty) {
        ++empty;
        continue;
      }
      logs.push_back(rep.log_region_count_per_n);
      maxfrac.push_back(rep.max_region_fraction);
      if (rep.min_barrier) {
        ++multi;
        dist.push_back(*rep.min_interregion_distance_per_n);
        barrier.push_back(*rep.min_barrier_per_n);
      }
    }
    const double dn = static_cast<double>(std::max<std::uint64_t>(done, 1));
    summary.rows.push_back({cell(c.densities[g]), cell(constraints_for_density(c.ensemble, c.n, c.densities[g])),
                            cell(c.trials), cell(done), cell(static_cast<double>(empty) / dn), cell(mean_of(sols)),
                            cell(mean_of(regions)), cell(mean_of(logs)), cell(mean_of(maxfrac)),
                            cell(static_cast<double>(multi) / dn), cell(mean_of(dist)), cell(mean_of(barrier))});
  }
  rec.tables.push_back(std::move(summary));
  rec.tables.push_back(std::move(trials));
}

struct RigidityTrial {
  std::size_t core_size = 0;
  bool verified = false;
  std::optional<bool> occurrence_reading;
  std::optional<bool> sparsity_pass;
  bool sparsity_exhaustive = false;
  bool qualifies = false;
  bool enumerated = false;
  std::optional<std::uint32_t> min_core_rigid_distance;
  std::optional<bool> linkage_holds;
};

void run_rigidity(const ExperimentConfig& c, unsigned workers, ResultRecord& rec) {
  const double bound_real = rigidity_size_bound(c.n, c.k);
  const auto bound = static_cast<std::size_t>(std::floor(bound_real));
  const double lnk = std::log(static_cast<double>(c.k));
  const auto results = run_trials<RigidityTrial>(c, workers, rec, [&](std::size_t g, std::uint64_t, Seed ts) {
    const auto p = params_for(c, c.densities[g]);
    const auto pair = generate_planted(p, derive_seed(ts, 0));
    RigidityTrial out;
    CoreResult core;
    double factor = 0;
    if (c.ensemble == Ensemble::coloring) {
      core = strip_core_coloring(std::get<GraphInstance>(pair.instance), pair.planted, c.process.gamma,
                                 StripOptions{c.process.z_threshold});
      factor = core.beta / 2 * lnk;
    } else {
      core = support_core_sat(std::get<CnfInstance>(pair.instance), pair.planted, c.process.gamma);
      factor = c.process.gamma * lnk;
      out.occurrence_reading = core.occurrence_reading_verified;
    }
    out.core_size = core.core.size();
    out.verified = core.verified;
    if (bound >= 1) {
      SparsityOptions so;
      so.seed = derive_seed(ts, 1);
      const auto sp = sparsity_check(pair.instance, bound, factor, so);
      out.sparsity_pass = !sp.violated;
      out.sparsity_exhaustive = sp.exhaustive;
    }
    out.qualifies = out.verified && out.sparsity_pass.value_or(false) && out.sparsity_exhaustive;
    const auto states = checked_pow(value_count(c), c.n);
    if (states && *states <= c.budgets.enumeration) {
      out.enumerated = true;
      const auto solutions = enumerate_solutions(pair.instance, c.budgets.enumeration);
      const auto st = classify_variables(solutions, pair.planted);
      std::uint32_t mn = kUnbounded;
      for (auto v : core.core) {
        mn = std::min(mn, st.rigid_distance[v]);
      }
      if (!core.core.empty()) {
        out.min_core_rigid_distance = mn;
      }
      if (out.qualifies) {
        out.linkage_holds = core.core.empty() || static_cast<double>(mn) > bound_real;
      }
    }
    return out;
  });
  Table summary{"summary",
                {"density", "m", "trials", "completed", "mean_core_fraction", "verified_fraction", "qualified",
                 "linkage_checked", "linkage_violations", "size_bound"},
                {}};
  Table trials{"trials",
               {"density", "trial", "core_size", "verified", "occurrence_reading", "sparsity_pass",
                "sparsity_exhaustive", "qualifies", "min_core_rigid_distance", "linkage_holds"},
               {}};
  for (std::size_t g = 0; g < c.densities.size(); ++g) {
    std::vector<double> frac;
    std::uint64_t verified = 0, qualified = 0, checked = 0, violations = 0, done = 0;
    for (std::uint64_t t = 0; t < c.trials; ++t) {
      const auto& r = results[g * c.trials + t];
      if (!r) {
        continue;
      }
      ++done;
      frac.push_back(static_cast<double>(r->core_size) / c.n);
      verified += r->verified ? 1 : 0;
      qualified += r->qualifies ? 1 : 0;
      if (r->linkage_holds) {
        ++checked;
        violations += *r->linkage_holds ? 0 : 1;
      }
      std::optional<std::uint32_t> mind;
      if (r->min_core_rigid_distance && *r->min_core_rigid_distance != kUnbounded) {
        mind = r->min_core_rigid_distance;
      }
      trials.rows.push_back({cell(c.densities[g]), cell(t), cell(r->core_size), cell(r->verified),
                             cell(r->occurrence_reading), cell(r->sparsity_pass), cell(r->sparsity_exhaustive),
                             cell(r->qualifies),
                             r->min_core_rigid_distance && !mind ? std::string("unbounded") : cell(mind),
                             cell(r->linkage_holds)});
    }
    const double dn = static_cast<double>(std::max<std::uint64_t>(done, 1));
    summary.rows.push_back({cell(c.densities[g]), cell(constraints_for_density(c.ensemble, c.n, c.densities[g])),
                            cell(c.trials), cell(done), cell(mean_of(frac)), cell(static_cast<double>(verified) / dn),
                            cell(qualified), cell(checked), cell(violations), cell(bound_real)});
  }
  rec.tables.push_back(std::move(summary));
  rec.tables.push_back(std::move(trials));
}

struct LoosenessTrial {
  std::uint32_t v0 = 0;
  unsigned target = 0;
  bool success = false;
  std::size_t dead = 0;
  std::optional<std::size_t> distance;
  std::string failure;
};

void run_looseness(const ExperimentConfig& c, unsigned workers, ResultRecord& rec) {
  const auto results = run_trials<LoosenessTrial>(c, workers, rec, [&](std::size_t g, std::uint64_t, Seed ts) {
    const auto p = params_for(c, c.densities[g]);
    const auto pair = generate_planted(p, derive_seed(ts, 0));
    Rng rng(derive_seed(ts, 1));
    LoosenessTrial out;
    out.v0 = static_cast<std::uint32_t>(rng.below(c.n));
    out.target = static_cast<unsigned>((pair.planted[out.v0] + 1 + rng.below(c.k - 1)) % c.k);
    RecolorOptions ro;
    ro.q = c.process.q;
    ro.list_coloring_budget = c.budgets.list_coloring;
    const auto trace = recolor_process(std::get<GraphInstance>(pair.instance), pair.planted, out.v0,
                                       static_cast<std::uint8_t>(out.target), derive_seed(ts, 2), ro);
    out.success = trace.success();
    out.dead = trace.dead.size();
    if (trace.tau) {
      out.distance = hamming_distance(pair.planted, *trace.tau);
    }
    out.failure = trace.failure;
    return out;
  });
  Table summary{"summary",
                {"density", "m", "trials", "completed", "success_rate", "mean_dead", "small_dead_fraction",
                 "success_and_small_dead_fraction"},
                {}};
  Table trials{"trials", {"density", "trial", "v0", "target", "success", "dead", "distance", "failure"}, {}};
  for (std::size_t g = 0; g < c.densities.size(); ++g) {
    std::vector<double> dead;
    std::uint64_t success = 0, small = 0, both = 0, done = 0;
    for (std::uint64_t t = 0; t < c.trials; ++t) {
      const auto& r = results[g * c.trials + t];
      if (!r) {
        continue;
      }
      ++done;
      dead.push_back(static_cast<double>(r->dead));
      const bool is_small = 4 * r->dead < c.n;
      success += r->success ? 1 : 0;
      small += is_small ? 1 : 0;
      both += r->success && is_small ? 1 : 0;
      trials.rows.push_back({cell(c.densities[g]), cell(t), cell(r->v0), cell(r->target), cell(r->success),
                             cell(r->dead), cell(r->distance), r->failure.empty() ? "" : "\"" + r->failure + "\""});
    }
    const double dn = static_cast<double>(std::max<std::uint64_t>(done, 1));
    summary.rows.push_back({cell(c.densities[g]), cell(constraints_for_density(c.ensemble, c.n, c.densities[g])),
                            cell(c.trials), cell(done), cell(static_cast<double>(success) / dn), cell(mean_of(dead)),
                            cell(static_cast<double>(small) / dn), cell(static_cast<double>(both) / dn)});
  }
  rec.tables.push_back(std::move(summary));
  rec.tables.push_back(std::move(trials));
}

void run_sweep(const ExperimentConfig& c, unsigned workers, ResultRecord& rec) {
  Table summary{"summary", {"ensemble", "n", "k", "density", "trials", "successes", "ci_low", "ci_high"}, {}};
  try {
    const auto rows = density_sweep(SweepParams{c.ensemble, c.n, c.k}, c.densities, c.trials, Seed{c.seed}, workers);
    for (const auto& r : rows) {
      summary.rows.push_back({std::string(to_string(r.ensemble)), cell(r.n), cell(r.k), cell(r.density),
                              cell(r.trials), cell(r.successes), cell(r.ci_low), cell(r.ci_high)});
    }
  } catch (...) {
    rec.failures.push_back({0, std::nullopt, c.seed, describe(std::current_exception())});
  }
  rec.tables.push_back(std::move(summary));
}

StatisticFn statistic_by_name(const std::string& name, const ExperimentConfig& c) {
  if (name == "loose_variables") {
    return loose_variable_statistic(c.process.adjacency_radius, c.budgets.enumeration);
  }
  if (name == "log_solution_count") {
    const auto budget = c.budgets.enumeration;
    return [budget](const PairSample& s) {
      return std::log(static_cast<double>(enumerate_solutions(s.instance, budget).size()));
    };
  }
  if (name == "planted_energy") {
    return [](const PairSample& s) { return static_cast<double>(violated_count(s.instance, *s.solution)); };
  }
  throw ParameterError("unknown statistic '" + name + "'");
}

void run_transfer(const ExperimentConfig& c, unsigned, ResultRecord& rec) {
  Table summary{"summary",
                {"density", "m", "statistic", "uniform_attempts", "uniform_empty", "uniform_samples", "planted_samples",
                 "binning_rule", "bins", "tv", "p_value", "degenerate"},
                {}};
  Table values{"trials", {"density", "provenance", "index", "value"}, {}};
  const auto fn = statistic_by_name(c.statistic, c);
  for_each_grid_point(c, rec, [&](std::size_t g) {
    const auto p = params_for(c, c.densities[g]);
    CompareOptions co;
    co.budget = c.budgets.enumeration;
    const auto s = compare_statistic(c.statistic, fn, p, c.trials, derive_seed(Seed{c.seed}, g), co);
    summary.rows.push_back({cell(c.densities[g]), cell(p.m), c.statistic, cell(s.uniform_attempts),
                            cell(s.uniform_empty), cell(s.uniform_values.size()), cell(s.planted_values.size()),
                            "\"" + s.binning_rule + "\"", cell(s.uniform_counts.size()), cell(s.tv), cell(s.p_value),
                            cell(s.degenerate)});
    for (std::size_t i = 0; i < s.uniform_values.size(); ++i) {
      values.rows.push_back({cell(c.densities[g]), "uniform", cell(i), cell(s.uniform_values[i])});
    }
    for (std::size_t i = 0; i < s.planted_values.size(); ++i) {
      values.rows.push_back({cell(c.densities[g]), "planted", cell(i), cell(s.planted_values[i])});
    }
  });
  rec.tables.push_back(std::move(summary));
  rec.tables.push_back(std::move(values));
}

void run_concentration(const ExperimentConfig& c, unsigned workers, ResultRecord& rec) {
  Table summary{"summary",
                {"density", "m", "trials", "nonempty", "conditioning_rate", "mean", "median", "q1", "q3", "iqr",
                 "log_expectation_per_n", "sat_bound_violation_rate"},
                {}};
  Table trials{"trials", {"density", "trial", "solutions", "log_per_n", "below_sat_bound"}, {}};
  for_each_grid_point(c, rec, [&](std::size_t g) {
    auto p = params_for(c, c.densities[g]);
    const auto r = concentration_check(p, c.trials, derive_seed(Seed{c.seed}, g), c.budgets.enumeration, workers);
    const bool any = r.nonempty > 0;
    summary.rows.push_back({cell(c.densities[g]), cell(p.m), cell(c.trials), cell(r.nonempty),
                            cell(r.conditioning_rate), any ? cell(r.mean) : "", any ? cell(r.median) : "",
                            any ? cell(r.q1) : "", any ? cell(r.q3) : "", any ? cell(r.iqr) : "",
                            cell(r.log_expectation_per_n), cell(r.sat_bound_violation_rate)});
    for (const auto& t : r.trials) {
      trials.rows.push_back({cell(c.densities[g]), cell(t.trial), cell(t.solutions), cell(t.log_per_n),
                             cell(t.below_sat_bound)});
    }
  });
  rec.tables.push_back(std::move(summary));
  rec.tables.push_back(std::move(trials));
}

void run_moments(const ExperimentConfig& c, unsigned, ResultRecord& rec) {
  const unsigned k = c.k;
  const double n = c.n;
  Table summary{"summary", {"density", "m", "log_expectation_per_n", "log_asymptotic_per_n"}, {}};
  for_each_grid_point(c, rec, [&](std::size_t g) {
    const auto m = constraints_for_density(c.ensemble, c.n, c.densities[g]);
    switch (c.ensemble) {
      case Ensemble::coloring: {
        const auto fm = expected_solutions_coloring(c.n, m, k);
        summary.rows.push_back({cell(c.densities[g]), cell(m), cell(fm.log_value / n), cell(fm.log_asymptotic / n)});
        break;
      }
      case Ensemble::sat:
        summary.rows.push_back({cell(c.densities[g]), cell(m), cell(expected_solutions_sat(c.n, m, k, true) / n),
                                cell(expected_solutions_sat(c.n, m, k, false) / n)});
        break;
      case Ensemble::nae:
        summary.rows.push_back({cell(c.densities[g]), cell(m), cell(expected_solutions_nae(c.n, m, k) / n), ""});
        break;
    }
  });
  rec.tables.push_back(std::move(summary));

  Table eps{"eps", {"k", "eps", "lower", "upper", "inside", "residual"}, {}};
  for_each_grid_point(c, rec, [&](std::size_t g) {
    if (g != 0 || k < 2) {
      return;
    }
    const double e = solve_eps(k);
    const double lo = std::ldexp(1.0, 1 - static_cast<int>(k)) + k * std::ldexp(1.0, -2 * static_cast<int>(k));
    const double hi = std::ldexp(1.0, 1 - static_cast<int>(k)) + 3 * k * std::ldexp(1.0, -2 * static_cast<int>(k));
    const double residual = std::fabs(e * std::pow(2 - e, k - 1) - 1);
    eps.rows.push_back({cell(k), cell(e), cell(lo), cell(hi), cell(lo < e && e < hi), cell(residual)});
  });
  rec.tables.push_back(std::move(eps));

  if (c.ensemble == Ensemble::coloring) {
    Table ansatz{"coloring_ansatz", {"density", "r", "h", "value"}, {}};
    Table opt{"coloring_optimizer", {"density", "r", "x", "value", "ansatz_value", "best_start"}, {}};
    const double hmax = (k - 1.0) / (static_cast<double>(k) * k);
    for_each_grid_point(c, rec, [&](std::size_t g) {
      const double r = c.densities[g] / 2;
      for (double h : linear_grid(hmax / 50, hmax, 50)) {
        ansatz.rows.push_back({cell(c.densities[g]), cell(r), cell(h),
                               cell(coloring_overlap_exponent(make_ansatz(k, h).matrix(), k, r))});
      }
      const double lo = 1.0 / (static_cast<double>(k) * k);
      const double hi = 1.0 / k;
      for (int i = 1; i <= 5; ++i) {
        const double x = lo + (hi - lo) * i / 6.0;
        OptimizerOptions oo;
        oo.seed = derive_seed(Seed{c.seed}, g);
        const auto res = maximize_coloring_exponent(k, r, x, 0.0, oo);
        opt.rows.push_back({cell(c.densities[g]), cell(r), cell(x), cell(res.value), cell(res.ansatz_value),
                            cell(res.best_start)});
      }
    });
    rec.tables.push_back(std::move(ansatz));
    rec.tables.push_back(std::move(opt));
  } else if (c.ensemble == Ensemble::sat) {
    Table lb{"lambda_b", {"r", "log_lambda_b", "rate", "bound_rhs", "holds"}, {}};
    Table overlap{"sat_overlap", {"r", "alpha", "value"}, {}};
    Table pair{"sat_pair", {"r", "alpha", "value"}, {}};
    Table ub{"upper_bound",
             {"r", "literal_rhs", "ln_variant_rhs", "grid_max", "grid_argmax", "literal_holds", "ln_variant_holds"},
             {}};
    for_each_grid_point(c, rec, [&](std::size_t g) {
      const double r = c.densities[g];
      const auto l = lambda_b(k, r);
      const double rhs = std::log(2.0) + r * (std::log1p(-std::ldexp(1.0, -static_cast<int>(k))) -
                                              k * std::ldexp(1.0, 3 - 2 * static_cast<int>(k)));
      lb.rows.push_back({cell(r), cell(l.log_value), cell(l.rate), cell(rhs), cell(l.rate >= rhs)});
      for (double a : linear_grid(0.01, 1.0 / 3.0, 50)) {
        overlap.rows.push_back({cell(r), cell(a), cell(sat_overlap_exponent(k, r, a))});
      }
      for (double a : linear_grid(0.0, 1.0, 51)) {
        pair.rows.push_back({cell(r), cell(a), cell(sat_pair_exponent(k, r, a))});
      }
      const auto u = upper_bound_check(k, r);
      ub.rows.push_back({cell(r), cell(u.literal_rhs), cell(u.ln_variant_rhs), cell(u.grid_max), cell(u.grid_argmax),
                         cell(u.literal_holds), cell(u.ln_variant_holds)});
    });
    rec.tables.push_back(std::move(lb));
    rec.tables.push_back(std::move(overlap));
    rec.tables.push_back(std::move(pair));
    rec.tables.push_back(std::move(ub));
  }
}

Table table_from_json(const json& j) {
  Table t;
  t.name = j.at("name").get<std::string>();
  t.columns = j.at("columns").get<std::vector<std::string>>();
  t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
  return t;
}

}  // namespace

ResultRecord run_experiment(const ExperimentConfig& config, unsigned workers) {
  const auto issues = validate_config(config);
  if (!issues.empty()) {
    std::string msg = "invalid config:";
    for (const auto& i : issues) {
      msg += " [" + i.field + "] " + i.message + ";";
    }
    throw ParameterError(msg);
  }
  if (workers == 0) {
    workers = worker_count();
  }
  ResultRecord rec;
  rec.rng_version = std::string(kRngVersion);
  rec.config = config;
  rec.config_hash = config_hash(config);
  switch (config.experiment) {
    case ExperimentKind::shatter_scan:
      run_shatter(config, workers, rec);
      break;
    case ExperimentKind::rigidity_scan:
      run_rigidity(config, workers, rec);
      break;
    case ExperimentKind::looseness_scan:
      run_looseness(config, workers, rec);
      break;
    case ExperimentKind::heuristic_sweep:
      run_sweep(config, workers, rec);
      break;
    case ExperimentKind::transfer_compare:
      run_transfer(config, workers, rec);
      break;
    case ExperimentKind::moment_curves:
      run_moments(config, workers, rec);
      break;
    case ExperimentKind::concentration:
      run_concentration(config, workers, rec);
      break;
  }
  return rec;
}

json record_to_json(const ResultRecord& r) {
  json tables = json::array();
  for (const auto& t : r.tables) {
    tables.push_back(json{{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
  }
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back(json{{"density_index", f.density_index},
                            {"trial", f.trial ? json(*f.trial) : json(nullptr)},
                            {"seed", f.seed},
                            {"message", f.message}});
  }
  return json{{"artifact_version", r.artifact_version},
              {"rng_version", r.rng_version},
              {"config_hash", r.config_hash},
              {"config", config_to_json(r.config)},
              {"tables", std::move(tables)},
              {"failures", std::move(failures)}};
}

ResultRecord record_from_json(const json& j) {
  try {
    ResultRecord r;
    r.artifact_version = j.at("artifact_version").get<std::string>();
    r.rng_version = j.at("rng_version").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.config = config_from_json(j.at("config"));
    for (const auto& t : j.at("tables")) {
      r.tables.push_back(table_from_json(t));
    }
    for (const auto& f : j.at("failures")) {
      TrialFailure tf;
      tf.density_index = f.at("density_index").get<std::size_t>();
      if (!f.at("trial").is_null()) {
        tf.trial = f.at("trial").get<std::uint64_t>();
      }
      tf.seed = f.at("seed").get<std::uint64_t>();
      tf.message = f.at("message").get<std::string>();
      r.failures.push_back(std::move(tf));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed result record: ") + e.what());
  }
}

void write_record(const ResultRecord& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw ResourceError("cannot write " + (dir / name).string());
    }
    out << text;
  };
  write("record.json", record_to_json(r).dump(2) + "\n");
  for (const auto& t : r.tables) {
    write(t.name + ".csv", t.csv());
  }
  if (const auto* s = r.table("summary"); s != nullptr && s->columns.size() >= 2) {
    std::ostringstream gp;
    gp << "# " << to_string(r.config.experiment) << ", config " << r.config_hash << "\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel '" << s->columns[0] << "'\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output 'summary.png'\n"
       << "plot for [i=2:" << s->columns.size() << "] 'summary.csv' using 1:i with linespoints\n";
    write("plot.gp", gp.str());
  }
  if (!r.failures.empty()) {
    write("failures.json", record_to_json(r).at("failures").dump(2) + "\n");
  }
}

}  // namespace cspgeo
