#include "fbvar/cli.hpp"

#include "fbvar/diagnostics.hpp"
#include "fbvar/error.hpp"
#include "fbvar/irf.hpp"
#include "fbvar/storage.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace fbvar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ValidationError("config: unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& into) {
  if (j.contains(key)) into = j.at(key).is_null() ? std::nullopt : std::optional<T>(j.at(key).get<T>());
}

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty() || path == "default") return path;
  const fs::path p(path);
  return (p.is_absolute() ? p : fs::path(base) / p).lexically_normal().string();
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

struct Inputs {
  Dataset data;  // as estimated (standardised when requested)
  RestrictionScheme scheme;
};

Inputs prepare_inputs(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ValidationError("config: no data files given");
  if (cfg.schema.empty()) throw ValidationError("config: no schema given");
  const auto schema = load_schema(cfg.schema);
  RawCollection raw;
  for (const auto& path : cfg.data) {
    // Each file only needs the schema columns it actually has.
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string header;
    std::getline(in, header);
    std::set<std::string> columns;
    std::stringstream cells(header);
    for (std::string cell; std::getline(cells, cell, ',');) {
      std::erase_if(cell, [](char ch) { return ch == '"' || ch == '\r' || ch == ' '; });
      columns.insert(cell);
    }
    std::vector<VariableMeta> present;
    for (const auto& v : schema)
      if (columns.count(v.mnemonic)) present.push_back(v);
    for (auto& [name, series] : load_csv(path, present)) {
      if (raw.count(name)) throw ValidationError("series " + name + " appears in more than one data file");
      raw.emplace(name, std::move(series));
    }
  }
  for (const auto& v : schema)
    if (!raw.count(v.mnemonic)) throw ValidationError("schema error: column '" + v.mnemonic + "' missing");
  SampleRange sample;
  if (cfg.sample_start) sample.start = Month::parse(*cfg.sample_start);
  if (cfg.sample_end) sample.end = Month::parse(*cfg.sample_end);
  Inputs in;
  in.data = assemble(raw, schema, sample);
  if (cfg.standardize) in.data = standardize(in.data);

  int m = 0, n_core = 0, n_other = 0;
  for (const auto& v : in.data.meta) (v.role == Role::Instrument ? m : v.role == Role::Core ? n_core : n_other)++;
  if (cfg.scheme == "default")
    in.scheme = default_scheme(m, n_core, n_other, cfg.model.r, in.data.mnemonics());
  else
    in.scheme = load_scheme(cfg.scheme);
  const auto problems = validate(in.scheme, m, n_core + n_other, cfg.model.r);
  if (!problems.empty()) {
    std::string msg = "restriction scheme invalid:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  check_rows_match(in.scheme, in.data.mnemonics());
  return in;
}

struct LoadedRun {
  fs::path dir;
  json spec;
  std::vector<PosteriorDraws> chains;
  std::vector<std::string> variables;
  std::vector<std::string> shocks;
  std::optional<Eigen::VectorXd> sd;
  std::vector<Month> effective_dates;
};

LoadedRun load_run(const fs::path& dir) {
  LoadedRun run;
  run.dir = dir;
  const auto spec_path = dir / "spec.json";
  std::ifstream in(spec_path);
  if (!in) throw IntegrityError("not a run directory (no spec.json): " + dir.string());
  try {
    in >> run.spec;
  } catch (const json::exception& e) {
    throw IntegrityError("corrupt spec.json in " + dir.string() + ": " + e.what());
  }
  std::vector<fs::path> files;
  if (fs::exists(dir / "draws.bin")) {
    files.push_back(dir / "draws.bin");
  } else {
    for (int k = 0; fs::exists(dir / ("chain_" + std::to_string(k)) / "draws.bin"); ++k)
      files.push_back(dir / ("chain_" + std::to_string(k)) / "draws.bin");
  }
  if (files.empty()) throw IntegrityError("no draws.bin in " + dir.string());
  for (const auto& f : files) run.chains.push_back(read_draws(f.string()));

  const auto& meta = run.spec.at("resolved");
  run.variables = meta.at("variables").get<std::vector<std::string>>();
  run.shocks = meta.at("scheme").at("shocks").get<std::vector<std::string>>();
  if (meta.contains("scaling") && !meta.at("scaling").is_null()) {
    const auto sds = meta.at("scaling").at("sd").get<std::vector<double>>();
    run.sd = Eigen::Map<const Eigen::VectorXd>(sds.data(), static_cast<Eigen::Index>(sds.size()));
  }
  const Month first = Month::parse(meta.at("effective_start").get<std::string>());
  for (int t = 0; t < run.chains.front().layout.T; ++t) run.effective_dates.push_back(first + t);
  return run;
}

PosteriorDraws pooled(const LoadedRun& run) {
  PosteriorDraws all;
  all.layout = run.chains.front().layout;
  for (const auto& c : run.chains) {
    all.truncated = all.truncated || c.truncated;
    all.draws.insert(all.draws.end(), c.draws.begin(), c.draws.end());
  }
  return all;
}

fs::path run_dir_of(const std::string& run_dir, const std::string& config_path) {
  if (!run_dir.empty()) return run_dir;
  if (config_path.empty()) throw ValidationError("give --run-dir or --config");
  return load_config(config_path).output;
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) c = '_';
  return s;
}

// ---------------------------------------------------------------- commands

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int chains = 1;
  int threads = 1;
  bool strict = false;
};

int cmd_simulate(const CommonFlags& flags, std::ostream& out) {
  RunConfig cfg = load_config(flags.config);
  TruthSpec ts = cfg.simulate;
  ts.strict = ts.strict || flags.strict;
  const std::uint64_t seed = flags.seed.value_or(cfg.simulate_seed);
  const Simulation sim = simulate(ts, seed);  // validates before anything is written

  const fs::path dir = cfg.output;
  make_dir(dir);
  write_csv((dir / "dataset.csv").string(), sim.data);
  write_schema((dir / "schema.json").string(), sim.data.meta);
  write_truth((dir / "truth.json").string(), sim.truth, sim.data.mnemonics());
  write_text(dir / "scheme.json", scheme_to_json(sim.truth.scheme) + "\n");
  out << "simulated " << sim.data.rows() << " months x " << sim.data.cols() << " variables (m=" << ts.m
      << ", n=" << ts.n_core + ts.n_other << ", r=" << ts.r << ", p=" << ts.p << "), seed " << seed << "\n"
      << "spectral radius " << sim.truth.spectral_radius
      << (sim.truth.rescaled_by != 1.0 ? " (lag matrices rescaled)" : "") << "\n"
      << "wrote " << (dir / "dataset.csv").string() << ", schema.json, truth.json, scheme.json\n";
  return kExitOk;
}

int cmd_estimate(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_config(flags.config);
  if (flags.seed) cfg.model.seed = *flags.seed;
  if (flags.chains < 1) throw ValidationError("--chains must be at least 1");
  if (flags.threads < 1) throw ValidationError("--threads must be at least 1");
  const Inputs in = prepare_inputs(cfg);
  ModelSpec spec = cfg.model;
  spec.scheme = in.scheme;
  validate_spec(in.data, spec);
  const auto N = in.data.cols();
  if (flags.strict && in.data.rows() - spec.p <= spec.p * N)
    throw ValidationError("strict: effective sample " + std::to_string(in.data.rows() - spec.p) +
                          " does not exceed p * N = " + std::to_string(spec.p * N));

  const fs::path dir = cfg.output;
  make_dir(dir);
  json resolved = config_to_json(cfg);
  json meta;
  meta["variables"] = in.data.mnemonics();
  std::vector<std::string> roles;
  for (const auto& v : in.data.meta) roles.emplace_back(role_name(v.role));
  meta["roles"] = roles;
  if (in.data.scaling) {
    std::vector<double> mean, sd;
    for (const auto& s : *in.data.scaling) {
      mean.push_back(s.mean);
      sd.push_back(s.sd);
    }
    meta["scaling"] = {{"mean", mean}, {"sd", sd}};
  } else {
    meta["scaling"] = nullptr;
  }
  meta["sample_start"] = in.data.dates.front().str();
  meta["sample_end"] = in.data.dates.back().str();
  meta["effective_start"] = in.data.dates[static_cast<std::size_t>(spec.p)].str();
  meta["zero_filled"] = in.data.zero_filled;
  meta["scheme"] = json::parse(scheme_to_json(in.scheme));
  meta["chains"] = flags.chains;
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < flags.chains; ++k) seeds.push_back(chain_seed(spec.seed, k));
  meta["chain_seeds"] = seeds;
  resolved["resolved"] = meta;
  write_text(dir / "spec.json", resolved.dump(2) + "\n");

  g_stop.store(false);
  const auto previous = std::signal(SIGINT, on_interrupt);
  const auto start = std::chrono::steady_clock::now();
  std::vector<PosteriorDraws> results(static_cast<std::size_t>(flags.chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(flags.chains));
  std::vector<std::ostringstream> logs(static_cast<std::size_t>(flags.chains));
  const int per_chain_threads = std::max(1, flags.threads / flags.chains);
  auto run_one = [&](int k) {
    try {
      ModelSpec s = spec;
      s.seed = seeds[static_cast<std::size_t>(k)];
      RunOptions opt;
      opt.exec = Exec::parallel(per_chain_threads);
      opt.stop = &g_stop;
      opt.log = &logs[static_cast<std::size_t>(k)];
      if (k == 0)
        opt.progress = [&err, last = -1](int done, int total) mutable {
          const int pct = static_cast<int>(100LL * done / total);
          if (pct / 10 != last / 10) {
            err << "progress " << pct << "%\n" << std::flush;
            last = pct;
          }
        };
      results[static_cast<std::size_t>(k)] = run_chain(in.data, s, opt);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };
  if (flags.chains == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < flags.chains; ++k) pool.emplace_back(run_one, k);
    for (auto& t : pool) t.join();
  }
  std::signal(SIGINT, previous);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool truncated = false;
  for (int k = 0; k < flags.chains; ++k) {
    const fs::path cdir = flags.chains == 1 ? dir : dir / ("chain_" + std::to_string(k));
    make_dir(cdir);
    const auto& res = results[static_cast<std::size_t>(k)];
    truncated = truncated || res.truncated;
    write_draws((cdir / "draws.bin").string(), res);
    std::ostringstream log;
    log << "seed " << seeds[static_cast<std::size_t>(k)] << "\n"
        << "iterations " << spec.burn + spec.draws << " (burn " << spec.burn << ", thin " << spec.thin << ")\n"
        << "stored draws " << res.size() << (res.truncated ? " (interrupted)" : "") << "\n"
        << "wall time " << seconds << " s\n"
        << logs[static_cast<std::size_t>(k)].str();
    write_text(cdir / "log.txt", log.str());
  }
  bool have_draws = true;
  for (const auto& r : results) have_draws = have_draws && r.size() > 0;
  out << "estimated " << flags.chains << " chain(s) in " << seconds << " s\n";
  if (have_draws) {
    const auto report = diagnose(results, in.data.num_instruments(), in.data.mnemonics(), in.scheme.shock_labels);
    write_diagnostics_csv((dir / "diagnostics.csv").string(), report);
    out << "explosive draws " << report.explosive_share * 100.0 << "%\n";
    if (spec.features.student_t) out << "dof acceptance rate " << report.dof_acceptance << "\n";
  }
  out << "run directory " << dir.string() << "\n";
  if (truncated) {
    err << "interrupted: partial draws flushed to " << dir.string() << "\n";
    return kExitInterrupted;
  }
  return kExitOk;
}

struct IrfFlags {
  std::string run_dir;
  std::vector<std::string> shocks;
  std::optional<int> horizon;
  std::vector<std::string> times;
  std::string units = "both";
  std::string out_dir;
};

int cmd_irf(const CommonFlags& common, const IrfFlags& f, std::ostream& out) {
  const LoadedRun run = load_run(run_dir_of(f.run_dir, common.config));
  const PosteriorDraws draws = pooled(run);
  const auto& l = draws.layout;
  const int H = f.horizon.value_or(run.spec.value("horizon", 24));
  if (H < 0) throw ValidationError("horizon must be nonnegative");
  if (f.units != "both" && f.units != "original" && f.units != "standardized")
    throw ValidationError("--units must be standardized, original or both");

  std::vector<int> shocks;
  for (const auto& s : f.shocks) {
    const auto it = std::find(run.shocks.begin(), run.shocks.end(), s);
    if (it != run.shocks.end()) {
      shocks.push_back(static_cast<int>(it - run.shocks.begin()));
      continue;
    }
    int k = -1;
    try {
      std::size_t used = 0;
      k = std::stoi(s, &used);
      if (used != s.size()) k = -1;
    } catch (const std::exception&) {
    }
    if (k < 0 || k >= l.r) throw ValidationError("unknown shock '" + s + "'");
    shocks.push_back(k);
  }
  if (shocks.empty())
    for (int k = 0; k < l.r; ++k) shocks.push_back(k);

  std::vector<int> times;
  for (const auto& s : f.times) {
    int t;
    if (s.find('-') != std::string::npos)
      t = Month::parse(s) - run.effective_dates.front();
    else
      t = std::stoi(s);
    if (t < 0 || t >= l.T) throw ValidationError("range error: time " + s + " outside the estimation sample");
    times.push_back(t);
  }
  if (!times.empty() && !l.features.tv_loadings)
    throw ValidationError("--times needs a run with time-varying loadings");

  const fs::path dir = f.out_dir.empty() ? run.dir : fs::path(f.out_dir);
  make_dir(dir);
  const Exec exec = Exec::parallel(common.threads);
  std::vector<std::pair<std::string, std::optional<Eigen::VectorXd>>> unit_sets;
  if (f.units != "original") unit_sets.emplace_back("", std::nullopt);
  if (f.units != "standardized")
    unit_sets.emplace_back("_original", run.sd ? run.sd : std::optional<Eigen::VectorXd>(Eigen::VectorXd::Ones(l.N)));

  for (const auto& [suffix, scale] : unit_sets) {
    const IrfResult all = summarize(draws, shocks, H, times, scale, run.variables, run.shocks, exec);
    write_irf_json((dir / ("irf" + suffix + ".json")).string(), all);
    for (std::size_t s = 0; s < shocks.size(); ++s) {
      const IrfResult one = summarize(draws, {shocks[s]}, H, times, scale, run.variables, run.shocks, exec);
      write_irf_csv((dir / ("irf_" + safe_name(run.shocks[static_cast<std::size_t>(shocks[s])]) + suffix + ".csv"))
                        .string(),
                    one);
      if (times.empty()) continue;
      for (int v = 0; v < l.N; ++v) {
        if (l.tv_index(v, shocks[s]) < 0) continue;
        Eigen::MatrixXd surface = impact_surface(draws, shocks[s], v);
        if (scale) surface *= (*scale)[v];
        const auto& sname = run.shocks[static_cast<std::size_t>(shocks[s])];
        const auto& vname = run.variables[static_cast<std::size_t>(v)];
        write_surface_csv((dir / ("surface_" + safe_name(sname) + "_" + safe_name(vname) + suffix + ".csv")).string(),
                          sname, vname, surface, run.effective_dates);
      }
    }
  }
  out << "wrote responses for " << shocks.size() << " shock(s), horizons 0.." << H << " from " << draws.size()
      << " draws to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_diagnose(const CommonFlags& common, const std::string& run_dir, std::ostream& out) {
  const LoadedRun run = load_run(run_dir_of(run_dir, common.config));
  const auto report = diagnose(run.chains, run.chains.front().layout.m, run.variables, run.shocks);
  write_diagnostics_csv((run.dir / "diagnostics.csv").string(), report);
  std::ostringstream text;
  print_diagnostics(text, report);
  write_text(run.dir / "diagnostics.txt", text.str());
  out << text.str();
  return kExitOk;
}

int cmd_convert(const CommonFlags& common, const std::string& run_dir, const std::string& input,
                const std::string& output, std::ostream& out) {
  if (!input.empty()) {
    const std::string target = output.empty() ? fs::path(input).replace_extension(".csv").string() : output;
    write_draws_csv(target, read_draws(input));
    out << "wrote " << target << "\n";
    return kExitOk;
  }
  const fs::path dir = run_dir_of(run_dir, common.config);
  std::vector<fs::path> files;
  if (fs::exists(dir / "draws.bin")) files.push_back(dir / "draws.bin");
  for (int k = 0; fs::exists(dir / ("chain_" + std::to_string(k)) / "draws.bin"); ++k)
    files.push_back(dir / ("chain_" + std::to_string(k)) / "draws.bin");
  if (files.empty()) throw IntegrityError("no draws.bin in " + dir.string());
  for (const auto& f : files) {
    const auto target = fs::path(f).replace_extension(".csv");
    write_draws_csv(target.string(), read_draws(f.string()));
    out << "wrote " << target.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

std::uint64_t chain_seed(std::uint64_t base, int chain) {
  return chain == 0 ? base : splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(chain)));
}

RunConfig parse_config(const json& j, const std::string& base_dir) {
  RunConfig c;
  try {
    reject_unknown(j,
                   {"data", "schema", "scheme", "sample", "standardize", "model", "output", "horizon", "quantiles",
                    "simulate", "resolved"},
                   "config");
    if (j.contains("data")) {
      if (j.at("data").is_string())
        c.data = {j.at("data").get<std::string>()};
      else
        c.data = j.at("data").get<std::vector<std::string>>();
    }
    read(j, "schema", c.schema);
    read(j, "scheme", c.scheme);
    if (j.contains("sample")) {
      const auto& s = j.at("sample");
      reject_unknown(s, {"start", "end"}, "sample");
      read(s, "start", c.sample_start);
      read(s, "end", c.sample_end);
      if (c.sample_start) Month::parse(*c.sample_start);
      if (c.sample_end) Month::parse(*c.sample_end);
    }
    read(j, "standardize", c.standardize);
    read(j, "output", c.output);
    read(j, "horizon", c.horizon);
    read(j, "quantiles", c.quantiles);

    if (j.contains("model")) {
      const auto& m = j.at("model");
      reject_unknown(m,
                     {"p", "r", "tv_loadings", "stoch_vol", "student_t", "draws", "burn", "thin", "seed", "priors"},
                     "model");
      auto& s = c.model;
      read(m, "p", s.p);
      read(m, "r", s.r);
      read(m, "tv_loadings", s.features.tv_loadings);
      read(m, "stoch_vol", s.features.stoch_vol);
      read(m, "student_t", s.features.student_t);
      read(m, "draws", s.draws);
      read(m, "burn", s.burn);
      read(m, "thin", s.thin);
      read(m, "seed", s.seed);
      if (m.contains("priors")) {
        const auto& p = m.at("priors");
        reject_unknown(p,
                       {"loading_variance", "intercept_variance", "variance_shape", "variance_scale", "omega_shape",
                        "omega_scale", "initial_state_variance", "ridge_penalty", "initial_q", "initial_dof",
                        "initial_dof_step", "fixed_phi_prior_variance"},
                       "model.priors");
        auto& pr = s.priors;
        read(p, "loading_variance", pr.loading_variance);
        read(p, "intercept_variance", pr.intercept_variance);
        read(p, "variance_shape", pr.variance_shape);
        read(p, "variance_scale", pr.variance_scale);
        read(p, "omega_shape", pr.omega_shape);
        read(p, "omega_scale", pr.omega_scale);
        read(p, "initial_state_variance", pr.initial_state_variance);
        read(p, "ridge_penalty", pr.ridge_penalty);
        read(p, "initial_q", pr.initial_q);
        read(p, "initial_dof", pr.initial_dof);
        read(p, "initial_dof_step", pr.initial_dof_step);
        read(p, "fixed_phi_prior_variance", pr.fixed_phi_prior_variance);
      }
    }

    if (j.contains("simulate")) {
      const auto& m = j.at("simulate");
      reject_unknown(m,
                     {"m", "n_core", "n_other", "r", "p", "T", "seed", "student_t_dof", "variance_break", "ramp",
                      "instrument_sparsity", "instrument_variance", "macro_variance_low", "macro_variance_high",
                      "max_spectral_radius", "strict", "burn_in", "start"},
                     "simulate");
      auto& s = c.simulate;
      read(m, "m", s.m);
      read(m, "n_core", s.n_core);
      read(m, "n_other", s.n_other);
      read(m, "r", s.r);
      read(m, "p", s.p);
      read(m, "T", s.T);
      read(m, "seed", c.simulate_seed);
      read(m, "student_t_dof", s.student_t_dof);
      read(m, "variance_break", s.variance_break);
      if (m.contains("ramp") && !m.at("ramp").is_null()) {
        const auto& r = m.at("ramp");
        reject_unknown(r, {"row", "shock", "from", "to"}, "simulate.ramp");
        LoadingRamp ramp;
        read(r, "row", ramp.row);
        read(r, "shock", ramp.shock);
        read(r, "from", ramp.from);
        read(r, "to", ramp.to);
        s.ramp = ramp;
      }
      read(m, "instrument_sparsity", s.instrument_sparsity);
      read(m, "instrument_variance", s.instrument_variance);
      read(m, "macro_variance_low", s.macro_variance_low);
      read(m, "macro_variance_high", s.macro_variance_high);
      read(m, "max_spectral_radius", s.max_spectral_radius);
      read(m, "strict", s.strict);
      read(m, "burn_in", s.burn_in);
      if (m.contains("start")) s.start = Month::parse(m.at("start").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  if (c.model.p < 1) throw ValidationError("config: model.p must be at least 1");
  if (c.model.r < 1) throw ValidationError("config: model.r must be at least 1");
  if (c.model.draws < 1) throw ValidationError("config: model.draws must be positive");
  if (c.model.burn < 0) throw ValidationError("config: model.burn must be nonnegative");
  if (c.model.thin < 1) throw ValidationError("config: model.thin must be at least 1");
  if (c.horizon < 0) throw ValidationError("config: horizon must be nonnegative");
  if (c.quantiles != std::vector<double>(kBandLevels.begin(), kBandLevels.end()))
    throw ValidationError("config: quantiles must be [0.05, 0.16, 0.5, 0.84, 0.95]");
  if (c.simulate.T <= c.simulate.p)
    throw ValidationError("config: simulate.T = " + std::to_string(c.simulate.T) + " must exceed simulate.p");

  for (auto& d : c.data) d = resolve(d, base_dir);
  c.schema = resolve(c.schema, base_dir);
  c.scheme = resolve(c.scheme, base_dir);
  c.output = resolve(c.output, base_dir);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
  const auto base = fs::absolute(fs::path(path)).parent_path().string();
  return parse_config(j, base);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["data"] = c.data;
  j["schema"] = c.schema;
  j["scheme"] = c.scheme;
  j["sample"] = {{"start", optional_json(c.sample_start)}, {"end", optional_json(c.sample_end)}};
  j["standardize"] = c.standardize;
  const auto& s = c.model;
  const auto& pr = s.priors;
  j["model"] = {
      {"p", s.p},
      {"r", s.r},
      {"tv_loadings", s.features.tv_loadings},
      {"stoch_vol", s.features.stoch_vol},
      {"student_t", s.features.student_t},
      {"draws", s.draws},
      {"burn", s.burn},
      {"thin", s.thin},
      {"seed", s.seed},
      {"priors",
       {{"loading_variance", pr.loading_variance},
        {"intercept_variance", pr.intercept_variance},
        {"variance_shape", pr.variance_shape},
        {"variance_scale", pr.variance_scale},
        {"omega_shape", pr.omega_shape},
        {"omega_scale", pr.omega_scale},
        {"initial_state_variance", pr.initial_state_variance},
        {"ridge_penalty", pr.ridge_penalty},
        {"initial_q", pr.initial_q},
        {"initial_dof", pr.initial_dof},
        {"initial_dof_step", pr.initial_dof_step},
        {"fixed_phi_prior_variance", optional_json(pr.fixed_phi_prior_variance)}}},
  };
  j["output"] = c.output;
  j["horizon"] = c.horizon;
  j["quantiles"] = c.quantiles;
  const auto& t = c.simulate;
  json ramp = nullptr;
  if (t.ramp) ramp = {{"row", t.ramp->row}, {"shock", t.ramp->shock}, {"from", t.ramp->from}, {"to", t.ramp->to}};
  j["simulate"] = {{"m", t.m},
                   {"n_core", t.n_core},
                   {"n_other", t.n_other},
                   {"r", t.r},
                   {"p", t.p},
                   {"T", t.T},
                   {"seed", c.simulate_seed},
                   {"student_t_dof", optional_json(t.student_t_dof)},
                   {"variance_break", t.variance_break},
                   {"ramp", ramp},
                   {"instrument_sparsity", t.instrument_sparsity},
                   {"instrument_variance", t.instrument_variance},
                   {"macro_variance_low", t.macro_variance_low},
                   {"macro_variance_high", t.macro_variance_high},
                   {"max_spectral_radius", t.max_spectral_radius},
                   {"strict", t.strict},
                   {"burn_in", t.burn_in},
                   {"start", t.start.str()}};
  return j;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian VAR with instrument-identified latent-factor shocks"};
  app.require_subcommand(1);

  CommonFlags common;
  IrfFlags irf;
  std::string diag_dir, conv_dir, conv_in, conv_out;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config, "run configuration (JSON)");
    if (config_required) opt->required();
    sub->add_option("--seed", seed_value, "overrides the configured seed");
    sub->add_option("--chains", common.chains, "independent chains, run in parallel")->check(CLI::PositiveNumber);
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", common.strict, "treat warnings as errors");
  };

  auto* sim = app.add_subcommand("simulate", "write a synthetic dataset, schema and truth file");
  add_common(sim, true);
  auto* est = app.add_subcommand("estimate", "run the Gibbs sampler and write a run directory");
  add_common(est, true);
  auto* irf_cmd = app.add_subcommand("irf", "impulse responses and credible bands from a run");
  add_common(irf_cmd, false);
  irf_cmd->add_option("--run-dir", irf.run_dir, "run directory");
  irf_cmd->add_option("--shocks", irf.shocks, "shock names or indices (default: all)");
  irf_cmd->add_option("--horizon", irf.horizon, "maximum horizon");
  irf_cmd->add_option("--times", irf.times, "periods (index or YYYY-MM) for time-varying responses");
  irf_cmd->add_option("--units", irf.units, "standardized, original or both");
  irf_cmd->add_option("--out", irf.out_dir, "output directory (default: the run directory)");
  auto* diag = app.add_subcommand("diagnose", "convergence and mixing diagnostics for a run");
  add_common(diag, false);
  diag->add_option("--run-dir", diag_dir, "run directory");
  auto* conv = app.add_subcommand("convert", "export draws.bin to long-format CSV");
  add_common(conv, false);
  conv->add_option("--run-dir", conv_dir, "run directory");
  conv->add_option("--input", conv_in, "a single draws.bin");
  conv->add_option("--output", conv_out, "CSV path for --input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  for (auto* sub : {sim, est, irf_cmd, diag, conv})
    if (sub->parsed() && sub->count("--seed")) common.seed = seed_value;

  try {
    if (sim->parsed()) return cmd_simulate(common, out);
    if (est->parsed()) return cmd_estimate(common, out, err);
    if (irf_cmd->parsed()) return cmd_irf(common, irf, out);
    if (diag->parsed()) return cmd_diagnose(common, diag_dir, out);
    if (conv->parsed()) return cmd_convert(common, conv_dir, conv_in, conv_out, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IntegrityError& e) {
    err << "integrity error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace fbvar
