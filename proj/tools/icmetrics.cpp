#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icm/error.hpp"
#include "icm/evaluation.hpp"
#include "icm/io.hpp"
#include "icm/kernels.hpp"
#include "icm/simulator.hpp"

namespace fs = std::filesystem;
using namespace icm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct PredictorOptions {
  std::string mode;  // true-profile, population, constant
  std::string params_path;
  double lambda_prg = 0.2;
  double lambda_trt = 0.1;
  double hazard_scale = 1.0;
  bool gamma_zero = false;
};

void add_predictor_options(CLI::App* cmd, PredictorOptions& o) {
  cmd->add_option("--predictor", o.mode, "true-profile, population or constant")
      ->check(CLI::IsMember({"true-profile", "population", "constant"}));
  cmd->add_option("--params", o.params_path, "model parameters JSON (default: manifest or reference values)");
  cmd->add_option("--lambda-prg", o.lambda_prg, "progression hazard for --predictor constant");
  cmd->add_option("--lambda-trt", o.lambda_trt, "treatment hazard for --predictor constant");
  cmd->add_option("--hazard-scale", o.hazard_scale, "multiply both cause-specific hazards");
  cmd->add_flag("--gamma-zero", o.gamma_zero, "drop the PSA-density effect from the hazards");
}

std::unique_ptr<RiskPredictor> make_predictor(const PredictorOptions& o, const Manifest* manifest) {
  if (o.mode == "constant") return std::make_unique<ConstantHazardPredictor>(o.lambda_prg, o.lambda_trt);
  ModelParameters p = manifest ? manifest->config.params : ModelParameters::reference();
  if (!o.params_path.empty()) p = parameters_from_json(read_file(o.params_path));
  if (o.gamma_zero) p = without_density_effect(p);
  if (o.hazard_scale != 1.0) p = with_hazard_scale(p, o.hazard_scale);
  return std::make_unique<JointModelPredictor>(std::move(p));
}

std::vector<SubjectProfile> resolve_profiles(const PredictorOptions& o, const std::vector<SubjectRecord>& records,
                                             const Manifest* manifest, std::size_t replicate) {
  const bool true_profile = o.mode == "true-profile" || (o.mode.empty() && manifest != nullptr);
  if (true_profile && manifest == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "--predictor true-profile needs --manifest or --data");
  }
  return profiles_for(records, true_profile ? manifest : nullptr, replicate);
}

struct SimulateOptions {
  std::size_t n = 300;
  std::size_t replicates = 1;
  std::string schedule = "pass";
  std::uint64_t seed = 1;
  double censoring_rate = kCalibratedDropoutRate;
  std::string out;
};

int run_simulate(const SimulateOptions& o) {
  SimulationConfig cfg;
  cfg.n_subjects = o.n;
  cfg.n_replicates = o.replicates;
  cfg.seed = o.seed;
  cfg.schedule = BiopsySchedule::parse(o.schedule);
  cfg.censoring_rate = o.censoring_rate;
  cfg.validate();
  fs::create_directories(o.out);
  Manifest m;
  m.config = cfg;
  for (std::size_t r = 0; r < o.replicates; ++r) {
    const auto data = generate_dataset(cfg, r);
    write_replicate(o.out, r, data);
    m.files.push_back(replicate_file_names(r));
    std::vector<std::array<double, 4>> u;
    u.reserve(data.size());
    for (const auto& s : data) u.push_back(s.profile.u);
    m.random_effects.push_back(std::move(u));
  }
  write_file(fs::path(o.out) / "manifest.json", manifest_json(m));
  std::printf("wrote %zu replicate(s) of %zu subjects to %s\n", o.replicates, o.n, o.out.c_str());
  return 0;
}

struct EvaluateOptions {
  std::string events, longitudinal, truth, manifest, data, out, roc_dir;
  std::size_t replicate = 0;
  double t = 1.0;
  double dt = 3.0;
  std::string approaches = "model,ipcw,naive";
  PredictorOptions predictor;
};

int run_evaluate(EvaluateOptions o) {
  std::optional<Manifest> manifest;
  if (!o.data.empty()) {
    if (o.manifest.empty()) o.manifest = (fs::path(o.data) / "manifest.json").string();
  }
  if (!o.manifest.empty()) {
    manifest = parse_manifest(read_file(o.manifest));
    const fs::path base = o.data.empty() ? fs::path(o.manifest).parent_path() : fs::path(o.data);
    if (o.replicate >= manifest->files.size()) {
      throw Error(ErrorKind::InvalidArgument, "manifest has no replicate " + std::to_string(o.replicate));
    }
    const auto& f = manifest->files[o.replicate];
    if (o.events.empty()) o.events = (base / f.events).string();
    if (o.longitudinal.empty()) o.longitudinal = (base / f.longitudinal).string();
    if (o.truth.empty() && !o.data.empty()) o.truth = (base / f.truth).string();
  }
  if (o.events.empty() || o.longitudinal.empty()) {
    throw Error(ErrorKind::InvalidArgument, "give --events and --longitudinal, or --data / --manifest");
  }
  EvaluationRequest req;
  req.window = make_window(o.t, o.dt);
  set_approaches(req, o.approaches);
  if (req.reference && o.truth.empty()) {
    throw Error(ErrorKind::MissingTruth, "the reference approach needs --truth (or --data)");
  }
  const auto records = parse_dataset(read_file(o.events), read_file(o.longitudinal));
  std::optional<std::vector<TrueOutcome>> truth;
  if (req.reference) truth = parse_truth(read_file(o.truth), records);
  const Manifest* mp = manifest ? &*manifest : nullptr;
  const auto profiles = resolve_profiles(o.predictor, records, mp, o.replicate);
  const auto predictor = make_predictor(o.predictor, mp);
  const auto reports = evaluate_dataset(records, profiles, truth ? &*truth : nullptr, *predictor, req);

  const auto text = reports_json(reports);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file(o.out, text);
  }
  if (!o.roc_dir.empty()) {
    fs::create_directories(o.roc_dir);
    for (const auto& r : reports) {
      if (r.auc) write_file(fs::path(o.roc_dir) / ("roc_" + std::string(to_string(r.approach)) + ".csv"), roc_csv(r.roc));
    }
  }
  return 0;
}

struct CompareOptions {
  std::string data, out, csv;
  double t = 1.0;
  double dt = 3.0;
  std::string approaches = "model,ipcw,naive,reference";
  PredictorOptions predictor;
};

int run_compare(const CompareOptions& o) {
  const fs::path dir(o.data);
  const auto manifest = parse_manifest(read_file(dir / "manifest.json"));
  if (manifest.files.size() < 2) throw Error(ErrorKind::InvalidArgument, "compare needs at least 2 replicates");
  EvaluationRequest req;
  req.window = make_window(o.t, o.dt);
  set_approaches(req, o.approaches);
  req.reference = true;
  req.exec = Execution::Serial;
  const auto predictor = make_predictor(o.predictor, &manifest);

  const std::size_t n = manifest.files.size();
  std::vector<std::vector<MetricsReport>> per(n);
  for_each_index(n, Execution::Parallel, [&](std::size_t r) {
    const auto& f = manifest.files[r];
    if (!fs::exists(dir / f.truth)) throw Error(ErrorKind::MissingTruth, "missing " + (dir / f.truth).string());
    const auto records = parse_dataset(read_file(dir / f.events), read_file(dir / f.longitudinal));
    const auto truth = parse_truth(read_file(dir / f.truth), records);
    const auto profiles = resolve_profiles(o.predictor, records, &manifest, r);
    per[r] = evaluate_dataset(records, profiles, &truth, *predictor, req);
  });
  const auto summary = summarize_replicates(std::move(per));
  write_file(o.out.empty() ? dir / "summary.json" : fs::path(o.out), comparison_json(summary));
  write_file(o.csv.empty() ? dir / "summary.csv" : fs::path(o.csv), comparison_csv(summary));
  std::cout << comparison_csv(summary);
  return 0;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::MissingTruth:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent AUC, Brier score and EPCE under interval censoring and competing risks"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: ICM_THREADS or all cores)");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "simulate joint-model cohorts");
  s->add_option("--n", sim.n, "subjects per replicate");
  s->add_option("--replicates", sim.replicates, "number of replicates");
  s->add_option("--schedule", sim.schedule, "pass or u<lo>-<hi>, e.g. u0.3-4");
  s->add_option("--seed", sim.seed, "random seed");
  s->add_option("--censoring-rate", sim.censoring_rate, "dropout hazard per year");
  s->add_option("--out", sim.out, "output directory")->required();

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "evaluate a predictor on one dataset");
  e->add_option("--events", ev.events, "events CSV");
  e->add_option("--longitudinal", ev.longitudinal, "longitudinal CSV");
  e->add_option("--truth", ev.truth, "hidden event times CSV");
  e->add_option("--manifest", ev.manifest, "simulation manifest (random effects, parameters)");
  e->add_option("--data", ev.data, "simulation directory; picks files for --replicate");
  e->add_option("--replicate", ev.replicate, "replicate index within --data / --manifest");
  e->add_option("--t", ev.t, "landmark time (years)");
  e->add_option("--dt", ev.dt, "window length (years)");
  e->add_option("--approaches", ev.approaches, "comma list of model, ipcw, naive, reference, epce");
  e->add_option("--out", ev.out, "report JSON (default: stdout)");
  e->add_option("--roc-dir", ev.roc_dir, "directory for ROC curve CSVs");
  add_predictor_options(e, ev.predictor);

  CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "compare approaches across replicates against the reference");
  c->add_option("--data", cmp.data, "simulation directory")->required();
  c->add_option("--t", cmp.t, "landmark time (years)");
  c->add_option("--dt", cmp.dt, "window length (years)");
  c->add_option("--approaches", cmp.approaches, "comma list; reference is always added");
  c->add_option("--out", cmp.out, "summary JSON (default: <data>/summary.json)");
  c->add_option("--csv", cmp.csv, "summary CSV (default: <data>/summary.csv)");
  add_predictor_options(c, cmp.predictor);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  set_thread_count(threads > 0 ? threads : default_thread_count());
  try {
    if (app.got_subcommand(s)) return run_simulate(sim);
    if (app.got_subcommand(e)) return run_evaluate(ev);
    return run_compare(cmp);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
}
