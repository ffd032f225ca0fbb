// forgesim: train and evaluate the forged variational ground-state solver.
// Subcommands: run, eval, validate, ed. Exit codes: 0 ok, 2 bad config or
// arguments, 3 training divergence (checkpoint written), 4 resource limit.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "forge/errors.hpp"
#include "forge/oracle.hpp"
#include "forge/trainer.hpp"

#ifndef FORGE_GIT_REV
#define FORGE_GIT_REV "unknown"
#endif

namespace {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Options {
  std::string model = "tfim1d";
  int n_total = 0;  // 0 = the model's natural size
  double h_field = 1.0;
  double t = 1.0;
  double v = 1.0;
  int layers = 6;
  int hidden = 32;
  int epochs = 2000;
  int phase1_epochs = 100;
  double lr_omega = 0.05;
  double lr_theta = 0.01;
  std::string optimizer = "adam";
  std::string mode = "exact";
  int n_sigma = 512;
  int shots = 128;
  std::uint64_t seed = 0;
  std::string baseline = "on";
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ConfigEntry {
  int line = 0;
  std::string key;
  std::string value;
};

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::vector<ConfigEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value, got '" + body + "'");
    ConfigEntry e;
    e.line = lineno;
    e.key = trim(body.substr(0, eq));
    e.value = trim(body.substr(eq + 1));
    if (e.key.empty() || e.value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": empty key or value");
    entries.push_back(std::move(e));
  }
  return entries;
}

// Config file sets any option the command line left untouched.
void apply_config(const std::vector<ConfigEntry>& entries,
                  const std::string& path, Options& o, CLI::App* cmd) {
  auto overridden = [&](std::string flag) {
    for (auto& c : flag)
      if (c == '_') c = '-';
    const CLI::Option* opt = cmd->get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() > 0;
  };
  for (const auto& e : entries) {
    std::string where = path + ":" + std::to_string(e.line);
    auto bad_value = [&] {
      return ConfigError(where + ": invalid value '" + e.value + "' for " +
                         e.key);
    };
    Options saved = o;
    try {
      if (e.key == "model") {
        o.model = e.value;
      } else if (e.key == "n_total") {
        o.n_total = std::stoi(e.value);
      } else if (e.key == "h_field") {
        o.h_field = std::stod(e.value);
      } else if (e.key == "t") {
        o.t = std::stod(e.value);
      } else if (e.key == "v") {
        o.v = std::stod(e.value);
      } else if (e.key == "layers") {
        o.layers = std::stoi(e.value);
      } else if (e.key == "hidden") {
        o.hidden = std::stoi(e.value);
      } else if (e.key == "epochs") {
        o.epochs = std::stoi(e.value);
      } else if (e.key == "phase1_epochs") {
        o.phase1_epochs = std::stoi(e.value);
      } else if (e.key == "lr_omega") {
        o.lr_omega = std::stod(e.value);
      } else if (e.key == "lr_theta") {
        o.lr_theta = std::stod(e.value);
      } else if (e.key == "optimizer") {
        o.optimizer = e.value;
      } else if (e.key == "mode") {
        o.mode = e.value;
      } else if (e.key == "n_sigma") {
        o.n_sigma = std::stoi(e.value);
      } else if (e.key == "shots") {
        o.shots = std::stoi(e.value);
      } else if (e.key == "seed") {
        o.seed = std::stoull(e.value);
      } else if (e.key == "baseline") {
        o.baseline = e.value;
      } else {
        throw ConfigError(where + ": unknown key '" + e.key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw bad_value();
    } catch (const std::out_of_range&) {
      throw bad_value();
    }
    if (overridden(e.key)) o = saved;  // command line wins
  }
}

// Fills in the model's natural size when --n-total was not given and
// rejects sizes the model cannot take.
void resolve_size(Options& o) {
  if (o.model == "tfim1d") {
    if (o.n_total == 0) o.n_total = 8;
    if (o.n_total % 2 != 0 || o.n_total < 4)
      throw forge::ArgumentError("tfim1d needs an even n_total of at least 4");
  } else if (o.model == "tfim2d") {
    if (o.n_total == 0) o.n_total = 8;
    if (o.n_total % 2 != 0 || o.n_total < 8)
      throw forge::ArgumentError(
          "tfim2d needs an even n_total of at least 8 (2 x n_total/2 grid)");
  } else if (o.model == "tv2x2") {
    if (o.n_total == 0) o.n_total = 4;
    if (o.n_total != 4)
      throw forge::ArgumentError("tv2x2 is a fixed 4-site model");
  } else {
    throw forge::ArgumentError("unknown model '" + o.model +
                               "' (tfim1d, tfim2d, tv2x2)");
  }
}

forge::HamiltonianPartition build_partition(const Options& o) {
  if (o.model == "tfim1d") return forge::build_tfim_1d(o.n_total, o.h_field);
  if (o.model == "tfim2d")
    return forge::build_tfim_2d(2, o.n_total / 2, o.h_field);
  return forge::build_tv_2x2(o.t, o.v);
}

forge::EstimatorMode parse_mode(const Options& o) {
  if (o.mode == "exact") return forge::EstimatorMode::exact();
  if (o.mode == "sampled")
    return forge::EstimatorMode::sampled(o.n_sigma, o.shots);
  throw forge::ArgumentError("unknown mode '" + o.mode +
                             "' (exact, sampled)");
}

bool parse_on_off(const std::string& s, const char* what) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw forge::ArgumentError(std::string(what) + " must be on or off, got '" +
                             s + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Hash of everything that fixes the model shape and physics; training
// schedule and seed may change between resumed runs.
std::uint64_t config_hash(const Options& o) {
  std::string canon = "model=" + o.model + ";n_total=" +
                      std::to_string(o.n_total) + ";h_field=" +
                      fmt_double(o.h_field) + ";t=" + fmt_double(o.t) +
                      ";v=" + fmt_double(o.v) + ";layers=" +
                      std::to_string(o.layers) + ";hidden=" +
                      std::to_string(o.hidden);
  return fnv1a(canon);
}

std::string hash_text(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json config_echo(const Options& o) {
  json j;
  j["model"] = o.model;
  j["n_total"] = o.n_total;
  j["h_field"] = o.h_field;
  j["t"] = o.t;
  j["v"] = o.v;
  j["layers"] = o.layers;
  j["hidden"] = o.hidden;
  j["epochs"] = o.epochs;
  j["phase1_epochs"] = o.phase1_epochs;
  j["lr_omega"] = o.lr_omega;
  j["lr_theta"] = o.lr_theta;
  j["optimizer"] = o.optimizer;
  j["mode"] = o.mode;
  j["n_sigma"] = o.n_sigma;
  j["shots"] = o.shots;
  j["seed"] = o.seed;
  j["baseline"] = o.baseline;
  return j;
}

void write_checkpoint(const std::filesystem::path& path, const Options& o,
                      const forge::Checkpoint& c) {
  json j;
  j["format_version"] = 1;
  j["epoch"] = c.epoch;
  j["config_hash"] = hash_text(config_hash(o));
  j["config"] = config_echo(o);
  j["theta"] = c.theta;
  j["omega"] = c.omega;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

forge::Checkpoint load_checkpoint(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open checkpoint");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": not a checkpoint file (" + e.what() + ")");
  }
  try {
    const json& c = j.at("config");
    o.model = c.at("model").get<std::string>();
    o.n_total = c.at("n_total").get<int>();
    o.h_field = c.at("h_field").get<double>();
    o.t = c.at("t").get<double>();
    o.v = c.at("v").get<double>();
    o.layers = c.at("layers").get<int>();
    o.hidden = c.at("hidden").get<int>();
    o.seed = c.at("seed").get<std::uint64_t>();
    forge::Checkpoint ck;
    ck.epoch = j.at("epoch").get<int>();
    ck.theta = j.at("theta").get<std::vector<double>>();
    ck.omega = j.at("omega").get<std::vector<double>>();
    ck.config_hash = std::stoull(j.at("config_hash").get<std::string>(),
                                 nullptr, 16);
    return ck;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": malformed checkpoint (" + e.what() + ")");
  }
}

void write_trace_csv(const std::filesystem::path& path,
                     const forge::EnergyTrace& trace, bool sampled) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# format_version 1\n";
  out << "epoch,energy,grad_norm_theta,grad_norm_omega,wall_ms";
  if (sampled) out << ",running_mean";
  out << "\n";
  double acc = 0;
  int count = 0;
  for (const auto& r : trace) {
    acc += r.energy;
    ++count;
    out << r.epoch << ',' << fmt_double(r.energy) << ','
        << fmt_double(r.grad_norm_theta) << ','
        << fmt_double(r.grad_norm_omega) << ',' << fmt_double(r.wall_ms);
    if (sampled) out << ',' << fmt_double(acc / count);
    out << "\n";
  }
}

void write_correlators_csv(const std::filesystem::path& path,
                           const Eigen::MatrixXd& forged,
                           const Eigen::MatrixXd& exact) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# format_version 1\n";
  out << "i,j,forged,exact,abs_err\n";
  for (int i = 0; i < forged.rows(); ++i)
    for (int j = i + 1; j < forged.cols(); ++j)
      out << i << ',' << j << ',' << fmt_double(forged(i, j)) << ','
          << fmt_double(exact(i, j)) << ','
          << fmt_double(std::abs(forged(i, j) - exact(i, j))) << "\n";
}

int cmd_run(const Options& o, const std::string& out_dir,
            const std::string& checkpoint_path) {
  auto part = build_partition(o);
  auto mode = parse_mode(o);
  auto model = forge::make_model(part, o.layers, o.hidden, o.seed);

  forge::TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.phase1_epochs = o.phase1_epochs;
  cfg.lr_omega = o.lr_omega;
  cfg.lr_theta = o.lr_theta;
  cfg.optimizer = forge::parse_optimizer(o.optimizer);
  cfg.mode = mode;
  cfg.seed = o.seed;
  cfg.baseline = parse_on_off(o.baseline, "baseline");
  forge::validate_config(cfg);

  forge::Checkpoint resume;
  bool has_resume = false;
  if (!checkpoint_path.empty()) {
    Options stored = o;
    resume = load_checkpoint(checkpoint_path, stored);
    if (resume.config_hash != config_hash(o))
      throw ConfigError(checkpoint_path +
                        ": checkpoint was written for a different model "
                        "configuration");
    has_resume = true;
  }

  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  forge::EnergyTrace trace;
  try {
    auto result = forge::train(model, cfg, has_resume ? &resume : nullptr);
    trace = std::move(result.trace);
    model = std::move(result.model);
  } catch (const forge::TrainingError& e) {
    write_checkpoint(dir / "checkpoint.json", o, e.last_checkpoint);
    std::cerr << "training diverged: " << e.what() << "\n";
    std::cerr << "last checkpoint written to "
              << (dir / "checkpoint.json").string() << "\n";
    return 3;
  }

  double final_energy = forge::energy(model, forge::EstimatorMode::exact());
  auto ground = forge::exact_ground_state(part);
  double rel_err =
      std::abs((final_energy - ground.energy) / ground.energy);

  auto forged_corr = forge::correlators(model, forge::EstimatorMode::exact());
  auto exact_corr = forge::exact_zz_correlators(ground.state, part.n_total());

  write_trace_csv(dir / "trace.csv", trace,
                  mode.kind == forge::EstimatorMode::Kind::Sampled);
  write_correlators_csv(dir / "correlators.csv", forged_corr, exact_corr);

  forge::Checkpoint final_ck;
  auto th = model.arnn.params();
  final_ck.theta.assign(th.begin(), th.end());
  final_ck.omega = model.omega;
  final_ck.epoch = trace.empty() ? -1 : trace.back().epoch;
  write_checkpoint(dir / "checkpoint.json", o, final_ck);

  json summary;
  summary["final_energy"] = final_energy;
  summary["ed_energy"] = ground.energy;
  summary["relative_error"] = rel_err;
  summary["epochs_run"] = trace.size();
  summary["seed"] = o.seed;
  summary["git_revision"] = FORGE_GIT_REV;
  summary["config"] = config_echo(o);
  std::ofstream out(dir / "summary.json");
  if (!out) throw ConfigError("cannot write summary.json");
  out << summary.dump(2) << "\n";

  std::cout << "final energy " << fmt_double(final_energy) << " (ED "
            << fmt_double(ground.energy) << ", relative error "
            << fmt_double(rel_err) << ")\n";
  return 0;
}

int cmd_eval(Options o, const std::string& checkpoint_path,
             const std::string& observable) {
  auto ck = load_checkpoint(checkpoint_path, o);
  auto part = build_partition(o);
  auto model = forge::make_model(part, o.layers, o.hidden, o.seed);
  if (static_cast<int>(ck.theta.size()) != model.arnn.n_params() ||
      ck.omega.size() != model.omega.size())
    throw ConfigError(checkpoint_path +
                      ": parameter arrays do not match the stored config");
  model.arnn.set_params(ck.theta);
  model.omega = ck.omega;

  int i = -1, j = -1;
  if (std::sscanf(observable.c_str(), "Z%dZ%d", &i, &j) != 2 || i < 0 ||
      j < 0 || i >= part.n_total() || j >= part.n_total() || i == j)
    throw forge::ArgumentError(
        "observable must name two distinct qubits like Z0Z4 (got '" +
        observable + "')");

  auto mode = parse_mode(o);
  forge::Rng rng(o.seed);
  auto corr = forge::correlators(model, mode,
                                 mode.kind == forge::EstimatorMode::Kind::Sampled
                                     ? &rng
                                     : nullptr);
  std::cout << observable << " = " << fmt_double(corr(i, j)) << "\n";
  return 0;
}

int cmd_validate(const Options& o) {
  auto part = build_partition(o);
  forge::validate_partition(part);
  std::cout << "partition " << part.name << ": " << part.n_total()
            << " qubits total, " << part.n_sub << " per register\n";
  std::cout << "local terms: " << part.h_a.terms.size() << "\n";
  for (const auto& term : part.cross)
    std::cout << "cross term (" << term.op_a.text() << ", "
              << term.op_b.text() << ") coefficient "
              << fmt_double(term.coefficient) << " multiplicity "
              << term.multiplicity << "\n";
  std::cout << "partition valid\n";
  return 0;
}

int cmd_ed(const Options& o, const std::string& out_dir) {
  auto part = build_partition(o);
  auto ground = forge::exact_ground_state(part);
  std::cout << "ground energy " << fmt_double(ground.energy) << "\n";
  if (!out_dir.empty()) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    auto corr = forge::exact_zz_correlators(ground.state, part.n_total());
    std::ofstream out(dir / "ed_correlators.csv");
    if (!out) throw ConfigError("cannot write ed_correlators.csv");
    out << "# format_version 1\n";
    out << "i,j,exact\n";
    for (int i = 0; i < corr.rows(); ++i)
      for (int j = i + 1; j < corr.cols(); ++j)
        out << i << ',' << j << ',' << fmt_double(corr(i, j)) << "\n";
    json summary;
    summary["ed_energy"] = ground.energy;
    summary["git_revision"] = FORGE_GIT_REV;
    summary["config"] = config_echo(o);
    std::ofstream js(dir / "ed.json");
    if (!js) throw ConfigError("cannot write ed.json");
    js << summary.dump(2) << "\n";
  }
  return 0;
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "tfim1d, tfim2d, or tv2x2");
  cmd->add_option("--n-total", o.n_total,
                  "total qubit count (default: the model's natural size)");
  cmd->add_option("--h-field", o.h_field, "transverse field strength");
  cmd->add_option("--t", o.t, "hopping amplitude");
  cmd->add_option("--v", o.v, "interaction strength");
}

void add_run_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--layers", o.layers, "circuit layers");
  cmd->add_option("--hidden", o.hidden, "network hidden width");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--phase1-epochs", o.phase1_epochs,
                  "circuit-only warmup epochs");
  cmd->add_option("--lr-omega", o.lr_omega, "circuit learning rate");
  cmd->add_option("--lr-theta", o.lr_theta, "network learning rate");
  cmd->add_option("--optimizer", o.optimizer, "adam, sgd, or spsa");
  cmd->add_option("--baseline", o.baseline,
                  "score-term baseline subtraction: on or off");
}

void add_mode_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--mode", o.mode, "exact or sampled");
  cmd->add_option("--n-sigma", o.n_sigma, "outer samples per estimate");
  cmd->add_option("--shots", o.shots, "conditional shots per sample");
  cmd->add_option("--seed", o.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement-forged variational ground-state solver"};
  app.require_subcommand(1);

  Options run_opts, eval_opts, validate_opts, ed_opts;
  std::string run_out = ".", run_config, run_checkpoint;
  std::string eval_checkpoint, eval_observable;
  std::string ed_out;

  CLI::App* run = app.add_subcommand("run", "train a model and write artifacts");
  add_model_flags(run, run_opts);
  add_run_flags(run, run_opts);
  add_mode_flags(run, run_opts);
  run->add_option("--config", run_config, "key=value config file");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--checkpoint", run_checkpoint, "resume from checkpoint");

  CLI::App* eval =
      app.add_subcommand("eval", "evaluate an observable on a checkpoint");
  eval->add_option("--checkpoint", eval_checkpoint, "trained checkpoint")
      ->required();
  eval->add_option("--observable", eval_observable, "pair observable, e.g. Z0Z4")
      ->required();
  add_mode_flags(eval, eval_opts);

  CLI::App* validate =
      app.add_subcommand("validate", "check a model partition");
  add_model_flags(validate, validate_opts);

  CLI::App* ed = app.add_subcommand("ed", "exact-diagonalization reference");
  add_model_flags(ed, ed_opts);
  ed->add_option("--out", ed_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      if (!run_config.empty())
        apply_config(read_config_file(run_config), run_config, run_opts, run);
      resolve_size(run_opts);
      return cmd_run(run_opts, run_out, run_checkpoint);
    }
    if (eval->parsed())
      return cmd_eval(eval_opts, eval_checkpoint, eval_observable);
    if (validate->parsed()) {
      resolve_size(validate_opts);
      return cmd_validate(validate_opts);
    }
    if (ed->parsed()) {
      resolve_size(ed_opts);
      return cmd_ed(ed_opts, ed_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const forge::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const forge::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const forge::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
