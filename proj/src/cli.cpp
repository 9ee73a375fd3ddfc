#include "neelgap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace neelgap {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Spin parse_spin(const json& j) {
  try {
    return Spin::from_double(j.get<double>());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception&) {
    throw ConfigError("spin S must be a number");
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  static const std::set<std::string> known{
      "lattices", "B_list",  "beta_list",  "zero_temperature", "R_list",  "epsilon_list", "scenarios",
      "output_dir", "caps",  "seed",       "tolerance",        "threads", "samples",      "cutoff",
      "windows",  "scaling", "inject_defect", "clip"};
  require(j.is_object(), "config must be a JSON object");
  for (const auto& [key, _] : j.items()) require(known.count(key) > 0, "unknown config key '" + key + "'");

  RunConfig c;
  if (j.contains("lattices")) {
    require(j["lattices"].is_array() && !j["lattices"].empty(), "'lattices' must be a non-empty array");
    for (const auto& l : j["lattices"]) {
      require(l.is_object(), "lattice entries must be objects with d, L, S");
      LatticeSpec s;
      s.d = get_or(l, "d", 1);
      s.L = get_or(l, "L", 1);
      s.spin = l.contains("S") ? parse_spin(l["S"]) : Spin{1};
      require(s.d >= 1 && s.L >= 1, "lattice needs d >= 1 and L >= 1");
      c.lattices.push_back(s);
    }
  } else {
    for (int L : {1, 2, 3}) c.lattices.push_back(LatticeSpec{1, L, Spin{1}});
  }
  c.B_list = get_or(j, "B_list", c.B_list);
  c.beta_list = get_or(j, "beta_list", c.beta_list);
  c.zero_temperature = get_or(j, "zero_temperature", c.zero_temperature);
  c.R_list = get_or(j, "R_list", c.R_list);
  c.epsilon_list = get_or(j, "epsilon_list", c.epsilon_list);
  c.scenarios = get_or(j, "scenarios", c.scenarios);
  c.output_dir = get_or(j, "output_dir", c.output_dir);
  c.seed = get_or(j, "seed", c.seed);
  c.tolerance = get_or(j, "tolerance", c.tolerance);
  c.threads = get_or(j, "threads", c.threads);
  c.samples = get_or(j, "samples", c.samples);
  c.inject_defect = get_or(j, "inject_defect", c.inject_defect);
  c.clip = get_or(j, "clip", c.clip);
  if (j.contains("caps")) {
    const auto& k = j["caps"];
    require(k.is_object(), "'caps' must be an object");
    c.caps.max_state_bits = get_or(k, "max_state_bits", c.caps.max_state_bits);
    c.caps.dense_cap = get_or(k, "dense_cap", c.caps.dense_cap);
    c.caps.max_full_dim = get_or(k, "max_full_dim", c.caps.max_full_dim);
  }
  if (j.contains("cutoff")) {
    const auto& k = j["cutoff"];
    require(k.is_object(), "'cutoff' must be an object");
    c.cutoff.gamma1 = get_or(k, "gamma1", c.cutoff.gamma1);
    c.cutoff.gamma2 = get_or(k, "gamma2", c.cutoff.gamma2);
    c.cutoff.M1 = get_or(k, "M1", c.cutoff.M1);
    c.cutoff.M2 = get_or(k, "M2", c.cutoff.M2);
  }
  if (j.contains("windows")) {
    const auto& k = j["windows"];
    require(k.is_object(), "'windows' must be an object");
    c.windows.lower = get_or(k, "lower", c.windows.lower);
    c.windows.upper_margin = get_or(k, "upper_margin", c.windows.upper_margin);
  }
  if (j.contains("scaling")) {
    const auto& k = j["scaling"];
    require(k.is_object(), "'scaling' must be an object");
    c.scaling.d = get_or(k, "d", c.scaling.d);
    if (k.contains("S")) c.scaling.spin = parse_spin(k["S"]);
    c.scaling.R_values = get_or(k, "R_values", c.scaling.R_values);
    c.scaling.exponent_tolerance = get_or(k, "exponent_tolerance", c.scaling.exponent_tolerance);
  }

  for (double B : c.B_list) require(std::isfinite(B), "B values must be finite");
  for (double b : c.beta_list) require(std::isfinite(b) && b > 0.0, "beta values must be positive");
  for (int R : c.R_list) require(R >= 1, "R values must be positive");
  for (double e : c.epsilon_list) require(e >= 0.0 && e < 0.5, "epsilon values must lie in [0, 1/2)");
  require(c.threads >= 1, "threads must be >= 1");
  require(c.samples >= 1, "samples must be >= 1");
  require(c.tolerance > 0.0, "tolerance must be positive");
  require(c.scaling.d >= 1 && c.scaling.R_values.size() >= 2, "scaling needs d >= 1 and two or more R values");
  for (int R : c.scaling.R_values) require(R >= 1, "scaling R values must be positive");
  require(c.windows.lower > 0.0 && c.windows.upper_margin >= 0.0 && c.windows.lower + c.windows.upper_margin < 1.0,
          "windows need 0 < lower and lower + upper_margin < 1");
  require(!c.output_dir.empty(), "output_dir must not be empty");
  std::set<std::string> names;
  for (const auto& s : scenario_catalog()) names.insert(s.name);
  for (const auto& s : c.scenarios) require(names.count(s) > 0, "unknown scenario '" + s + "'");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["lattices"] = json::array();
  for (const auto& l : c.lattices) j["lattices"].push_back({{"d", l.d}, {"L", l.L}, {"S", l.spin.value()}});
  j["B_list"] = c.B_list;
  j["beta_list"] = c.beta_list;
  j["zero_temperature"] = c.zero_temperature;
  j["R_list"] = c.R_list;
  j["epsilon_list"] = c.epsilon_list;
  j["scenarios"] = c.scenarios;
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance;
  j["samples"] = c.samples;
  j["caps"] = {{"max_state_bits", c.caps.max_state_bits},
               {"dense_cap", c.caps.dense_cap},
               {"max_full_dim", c.caps.max_full_dim}};
  j["cutoff"] = {{"gamma1", c.cutoff.gamma1}, {"gamma2", c.cutoff.gamma2}, {"M1", c.cutoff.M1}, {"M2", c.cutoff.M2}};
  j["windows"] = {{"lower", c.windows.lower}, {"upper_margin", c.windows.upper_margin}};
  j["scaling"] = {{"d", c.scaling.d},
                  {"S", c.scaling.spin.value()},
                  {"R_values", c.scaling.R_values},
                  {"exponent_tolerance", c.scaling.exponent_tolerance}};
  j["inject_defect"] = c.inject_defect;
  j["clip"] = c.clip;
  return j;
}

const std::vector<ScenarioInfo>& scenario_catalog() {
  static const std::vector<ScenarioInfo> catalog{
      {"commutator-identity", "[H1', A_R] = c (i/|Omega_R|) O(Omega_R)", "lattice, R, B"},
      {"double-commutator-scaling", "sum_{bonds in Omega_2R+1} ||[[H1', S_x.S_y], H1']|| ~ R^{d-2}",
       "scaling.d, scaling.S, scaling.R_values"},
      {"kls", "|w([C,A])|^2 <= sqrt(D(C)) sqrt(k(eps) w({C,C*}) + w([[C*,H],C])) (w(A h^e A*) + w(A* h^e A))",
       "lattice, B, R, epsilon"},
      {"rp-energy", "E0(B, f) >= E0(B, 0)", "lattice, B, samples"},
      {"spectral-windows", "w(A h^e A) split over [0,e'), [e',gap-e''), [gap-e'',inf)", "lattice, B, R, epsilon"},
      {"susceptibility", "w(H1' Pex h^-1 H1') <= (1/2) sum_bonds (f_x + f_y)^2", "lattice, B, R"},
      {"transverse-decay", "|m_s|^2 <= beta K R^{d-2} <A_R^2> (zero T: K R^{d-1} w(A_R^2))",
       "lattice, beta or zero temperature, B, R_list"},
      {"trial-state", "w(A h^{1+e} A)/w(A h^e A) with numerator <= (K3 + K4)/R^d", "lattice, B, R, epsilon"},
      {"variational-magnetization",
       "<Phi0(B), O Phi0(B)>/|V| >= w(O)/|V| + [E0(0) - w(H0)]/(B |V|)", "lattice, B > 0, samples"},
  };
  return catalog;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skip: return "skip";
  }
  return "?";
}

std::uint64_t scenario_seed(std::uint64_t base, const std::string& scenario, const json& params) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  mix(scenario);
  mix("|");
  mix(params.dump());
  return h ^ base;
}

namespace {

struct Task {
  std::string scenario;
  json params;
  std::function<ScenarioResult()> body;
};

ScenarioResult skipped(std::string scenario, json params, std::string reason) {
  ScenarioResult r;
  r.scenario = std::move(scenario);
  r.params = std::move(params);
  r.status = Status::skip;
  r.reason = std::move(reason);
  return r;
}

ScenarioResult settle(std::string scenario, json params, bool pass, json report) {
  ScenarioResult r;
  r.scenario = std::move(scenario);
  r.params = std::move(params);
  r.status = pass ? Status::pass : Status::fail;
  r.report = std::move(report);
  return r;
}

json lattice_params(const LatticeSpec& s) { return {{"d", s.d}, {"L", s.L}, {"S", s.spin.value()}}; }

// why an R value cannot run on this lattice, if it cannot
std::optional<std::string> gate(const Lattice& lattice, int R, bool clip) {
  if (R > lattice.half_side()) {
    return "R=" + std::to_string(R) + " exceeds the half side L=" + std::to_string(lattice.half_side());
  }
  if (!clip && !ramp_fits(lattice, R)) {
    return "Omega_2R does not fit strictly inside the box for R=" + std::to_string(R);
  }
  return std::nullopt;
}

json trial_json(const TrialStateReport& t) {
  json j{{"R", t.R},
         {"epsilon", t.epsilon},
         {"B", t.B},
         {"q", t.q},
         {"numerator", t.numerator},
         {"denominator", t.denominator},
         {"ratio", t.ratio ? json(*t.ratio) : json(nullptr)},
         {"degenerate", t.degenerate},
         {"staggered_magnetization", t.staggered_magnetization},
         {"flags", t.flags}};
  j["checks"] = json::array();
  for (const auto& c : t.checks) j["checks"].push_back(to_json(c));
  return j;
}

json windows_json(const SpectralWindowReport& w) {
  json j{{"gap", w.gap},   {"eps_prime", w.eps_prime}, {"eps_double_prime", w.eps_double_prime},
         {"w1", w.w1},     {"w2", w.w2},               {"w3", w.w3},
         {"total", w.total}, {"q", w.q},               {"flags", w.flags}};
  j["checks"] = json::array();
  for (const auto& c : w.checks) j["checks"].push_back(to_json(c));
  return j;
}

json structure_json(const StructureReport& s) {
  json j{{"p", s.p.p}, {"singular", s.singular}};
  j["bounds"] = json::array();
  for (const auto& b : s.bounds) j["bounds"].push_back(to_json(b));
  return j;
}

class Planner {
 public:
  explicit Planner(const RunConfig& config) : config_(config) {
    options_.operators.max_full_dim = config.caps.max_full_dim;
    options_.operators.inject_defect = config.inject_defect;
    options_.diagonalize.dense_cap = config.caps.dense_cap;
    options_.tolerance = config.tolerance;
    options_.allow_clip = config.clip;
  }

  std::vector<Task> plan() {
    for (const auto& spec : config_.lattices) {
      std::unique_ptr<Lattice> lattice;
      std::string failure;
      try {
        lattice = std::make_unique<Lattice>(build_lattice(spec, LatticeLimits{config_.caps.max_state_bits}));
      } catch (const DomainError& e) {
        failure = e.what();
      }
      for (const auto& info : scenario_catalog()) {
        if (!selected(info.name) || info.name == "double-commutator-scaling") continue;
        if (!lattice) {
          const std::string name = info.name;
          json params = lattice_params(spec);
          tasks_.push_back({name, params, [=] { return skipped(name, params, failure); }});
          continue;
        }
        add_lattice_tasks(info.name, *lattice);
      }
      if (lattice) lattices_.push_back(std::move(lattice));
    }
    if (selected("double-commutator-scaling")) add_scaling_task();
    return std::move(tasks_);
  }

 private:
  bool selected(const std::string& name) const {
    return config_.scenarios.empty() ||
           std::find(config_.scenarios.begin(), config_.scenarios.end(), name) != config_.scenarios.end();
  }

  void add(const std::string& name, json params, std::function<ScenarioResult(const json&)> fn) {
    tasks_.push_back({name, params, [name, params, fn] { return fn(params); }});
  }

  void add_lattice_tasks(const std::string& name, const Lattice& lattice) {
    const Lattice* lat = &lattice;
    const auto opts = options_;
    const auto base = lattice_params(lattice.spec());
    const int samples = config_.samples;
    const std::uint64_t seed = config_.seed;

    auto with = [&](json extra) {
      json p = base;
      p.update(extra);
      return p;
    };
    auto for_R = [&](json p, int R, std::function<ScenarioResult(const json&)> fn) {
      p["R"] = R;
      if (auto why = gate(lattice, R, config_.clip)) {
        const std::string reason = *why;
        add(name, p, [name, reason](const json& q) { return skipped(name, q, reason); });
      } else {
        add(name, p, std::move(fn));
      }
    };

    if (name == "variational-magnetization") {
      for (double B : config_.B_list) {
        add(name, with({{"B", B}}), [=](const json& p) {
          if (!(B > 0.0)) return skipped(name, p, "the variational bound divides by B; needs B > 0");
          std::mt19937_64 rng(scenario_seed(seed, name, p));
          const OperatorFactory factory(*lat, opts.operators);
          auto trials = haar_trials(static_cast<Eigen::Index>(factory.space().dimension()), samples, rng);
          for (double field : {B, 0.0}) {
            const auto gp = solve_ground(factory, field, opts);
            trials.push_back(pure_density(gp.gs.vectors.col(0)));
          }
          auto r = check_variational_magnetization(*lat, B, trials, opts);
          return settle(name, p, r.all_pass(), to_json(r));
        });
      }
    } else if (name == "kls") {
      for (double B : config_.B_list)
        for (int R : config_.R_list)
          for (double eps : config_.epsilon_list)
            for_R(with({{"B", B}, {"epsilon", eps}}), R, [=](const json& p) {
              auto r = check_kls(*lat, B, R, eps, opts);
              return settle(name, p, r.all_pass(), to_json(r));
            });
    } else if (name == "susceptibility") {
      for (double B : config_.B_list)
        for (int R : config_.R_list)
          for_R(with({{"B", B}}), R, [=](const json& p) {
            const auto f = ramp_field(*lat, R, opts.allow_clip).values;
            auto r = check_susceptibility_bound(*lat, B, f, opts);
            return settle(name, p, r.all_pass(), to_json(r));
          });
    } else if (name == "rp-energy") {
      std::vector<int> ramps;
      for (int R : config_.R_list)
        if (!gate(lattice, R, config_.clip)) ramps.push_back(R);
      for (double B : config_.B_list) {
        add(name, with({{"B", B}, {"samples", samples}, {"ramp_R", ramps}}), [=](const json& p) {
          std::mt19937_64 rng(scenario_seed(seed, name, p));
          std::uniform_real_distribution<double> unit(-1.0, 1.0);
          std::vector<std::vector<double>> fs;
          for (int k = 0; k < samples; ++k) {
            std::vector<double> f(lat->num_sites());
            for (auto& x : f) x = unit(rng);
            fs.push_back(std::move(f));
          }
          for (int R : ramps) fs.push_back(ramp_field(*lat, R, opts.allow_clip).values);
          auto r = check_rp_energy(*lat, B, fs, opts);
          return settle(name, p, r.all_pass(), to_json(r));
        });
      }
    } else if (name == "commutator-identity") {
      for (double B : config_.B_list)
        for (int R : config_.R_list)
          for_R(with({{"B", B}}), R, [=](const json& p) {
            auto r = check_commutator_identity(*lat, R, B, opts);
            return settle(name, p, r.all_pass(), to_json(r));
          });
    } else if (name == "trial-state") {
      const auto cutoff = config_.cutoff;
      for (double B : config_.B_list)
        for (int R : config_.R_list)
          for (double eps : config_.epsilon_list)
            for_R(with({{"B", B}, {"epsilon", eps}}), R, [=](const json& p) {
              if (!(eps > 0.0)) return skipped(name, p, "the cutoff family needs 0 < epsilon < 1/2");
              auto r = check_trial_state(*lat, B, R, eps, cutoff, opts);
              return settle(name, p, r.all_pass(), trial_json(r));
            });
    } else if (name == "spectral-windows") {
      const auto windows = config_.windows;
      for (double B : config_.B_list)
        for (int R : config_.R_list)
          for (double eps : config_.epsilon_list)
            for_R(with({{"B", B}, {"epsilon", eps}}), R, [=](const json& p) {
              auto r = check_spectral_windows(*lat, B, R, eps, windows, opts);
              return settle(name, p, r.all_pass(), windows_json(r));
            });
    } else if (name == "transverse-decay") {
      std::vector<int> Rs;
      std::string why_none = "no R value fits this lattice";
      for (int R : config_.R_list) {
        if (auto why = gate(lattice, R, config_.clip)) why_none = *why;
        else Rs.push_back(R);
      }
      std::vector<std::optional<double>> temps(config_.beta_list.begin(), config_.beta_list.end());
      if (config_.zero_temperature) temps.push_back(std::nullopt);
      for (double B : config_.B_list) {
        for (const auto& beta : temps) {
          json p = with({{"B", B}, {"beta", beta ? json(*beta) : json("inf")}, {"R_list", Rs}});
          if (Rs.empty()) {
            add(name, p, [=](const json& q) { return skipped(name, q, why_none); });
            continue;
          }
          add(name, p, [=](const json& q) {
            auto r = check_transverse_decay(*lat, beta, B, Rs, opts);
            json j;
            j["bounds"] = json::array();
            for (const auto& b : r.bounds) j["bounds"].push_back(to_json(b));
            j["K_measured"] = r.K_measured;
            if (r.scaling) j["scaling"] = to_json(*r.scaling);
            j["correlations"] = json::array();
            for (const auto& c : r.correlations)
              j["correlations"].push_back({{"distance", c.distance}, {"site", c.site}, {"value", c.value}});
            j["structure"] = json::array();
            for (const auto& s : r.structure) j["structure"].push_back(structure_json(s));
            j["flags"] = r.flags;
            auto out = settle(name, q, r.all_pass(), j);
            for (const auto& s : r.structure)
              out.structure_rows.push_back(structure_csv_row(s, lat->dim(), lat->half_side()));
            std::ostringstream row;
            row.precision(12);
            for (std::size_t i = 0; i < r.K_measured.size(); ++i) {
              row.str("");
              row << "transverse-K," << lat->dim() << ',' << lat->half_side() << ',' << lat->spin().value() << ','
                  << B << ',' << (beta ? std::to_string(*beta) : std::string("inf")) << ',' << Rs[i] << ','
                  << r.K_measured[i] << ",,";
              out.scaling_rows.push_back(row.str());
            }
            return out;
          });
        }
      }
    }
  }

  void add_scaling_task() {
    const auto spec = config_.scaling;
    const std::string name = "double-commutator-scaling";
    json p{{"d", spec.d}, {"S", spec.spin.value()}, {"R_values", spec.R_values}};
    add(name, p, [=](const json& q) {
      const double predicted = spec.d - 2.0;
      auto r = check_double_commutator_scaling(spec.d, spec.R_values, spec.spin, predicted, spec.exponent_tolerance);
      json j;
      j["scaling"] = to_json(r.scaling);
      j["max_bond_norm"] = r.max_bond_norm;
      j["max_bond_norm_times_R2"] = r.max_bond_norm_times_R2;
      j["cross_term"] = to_json(r.first_order);
      j["plateau"] = to_json(r.plateau);
      j["decomposition"] = to_json(r.decomposition);
      const bool ok = r.scaling.pass.value_or(true) && r.first_order.all_pass() && r.plateau.all_pass() &&
                      r.decomposition.all_pass();
      auto out = settle(name, q, ok, j);
      std::ostringstream row;
      row.precision(12);
      for (std::size_t i = 0; i < r.scaling.values.size(); ++i) {
        row.str("");
        row << "double-commutator-sum," << spec.d << ",," << spec.spin.value() << ",,," << r.scaling.R_values[i] << ','
            << r.scaling.values[i] << ',' << r.scaling.exponent << ',' << r.scaling.prefactor;
        out.scaling_rows.push_back(row.str());
      }
      return out;
    });
  }

  const RunConfig& config_;
  VerifierOptions options_;
  std::vector<Task> tasks_;

 public:
  std::vector<std::unique_ptr<Lattice>> lattices_;
};

ScenarioResult execute(const Task& task) {
  try {
    return task.body();
  } catch (const CapacityError& e) {
    return skipped(task.scenario, task.params, std::string("capacity: ") + e.what());
  } catch (const std::exception& e) {
    ScenarioResult r;
    r.scenario = task.scenario;
    r.params = task.params;
    r.status = Status::fail;
    r.reason = std::string("error: ") + e.what();
    return r;
  }
}

}  // namespace

RunSummary run(const RunConfig& config) {
  Planner planner(config);
  const auto tasks = planner.plan();
  std::vector<ScenarioResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = execute(tasks[i]);
  };
  const int n = std::max(1, std::min<int>(config.threads, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(results.begin(), results.end(), [](const ScenarioResult& a, const ScenarioResult& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    return a.params.dump() < b.params.dump();
  });
  RunSummary s;
  s.results = std::move(results);
  for (const auto& r : s.results) {
    if (r.status == Status::pass) ++s.passed;
    else if (r.status == Status::fail) ++s.failed;
    else ++s.skipped;
  }
  return s;
}

json report_json(const RunSummary& summary, const RunConfig& config, bool with_timestamp) {
  json j;
  j["schema_version"] = 1;
  if (with_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    j["timestamp"] = os.str();
  }
  j["config"] = to_json(config);
  j["summary"] = {{"pass", summary.passed}, {"fail", summary.failed}, {"skip", summary.skipped}};
  j["scenarios"] = json::array();
  for (const auto& r : summary.results) {
    json e{{"scenario", r.scenario}, {"params", r.params}, {"status", to_string(r.status)}};
    if (!r.reason.empty()) e["reason"] = r.reason;
    if (!r.report.is_null()) e["report"] = r.report;
    j["scenarios"].push_back(std::move(e));
  }
  return j;
}

void write_outputs(const RunSummary& summary, const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    out << report_json(summary, config).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "scaling.csv");
    out << "series,d,L,S,B,beta,R,value,exponent,prefactor\n";
    for (const auto& r : summary.results)
      for (const auto& row : r.scaling_rows) out << row << '\n';
  }
  {
    std::ofstream out(dir / "structure.csv");
    out << structure_csv_header() << '\n';
    for (const auto& r : summary.results)
      for (const auto& row : r.structure_rows) out << row << '\n';
  }
}

}  // namespace neelgap
