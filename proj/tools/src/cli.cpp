#include "roadgraph/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "roadgraph/bev.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/explain.hpp"
#include "roadgraph/extraction.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/training.hpp"

namespace roadgraph::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string extraction_config;
  std::string model_config;
  std::string calibration;
  std::string dataset;
  std::string target;
  std::string checkpoint;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::string clip;
  std::optional<std::int64_t> frame;
  bool all = false;
  bool verbose = false;
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string summary_line(const Scores& s) {
  return "accuracy " + fixed(s.accuracy) + "  auc " + (s.auc ? fixed(*s.auc) : std::string("n/a")) + "  mcc " +
         fixed(s.mcc) + "  fpr " + fixed(s.fpr) + "  fnr " + fixed(s.fnr);
}

// Configuration files must exist before any work starts.
void require_config_file(const std::string& path, const char* flag) {
  if (!path.empty() && !fs::exists(path)) {
    raise(ErrorCode::kConfigError, std::string(flag) + " file not found: " + path);
  }
}

void require_input(const std::string& path, const char* flag) {
  if (path.empty()) raise(ErrorCode::kConfigError, std::string(flag) + " is required");
  if (!fs::exists(path)) raise(ErrorCode::kNotFound, std::string(flag) + " not found: " + path);
}

void require_out(const std::string& path) {
  if (path.empty()) raise(ErrorCode::kConfigError, "--out is required");
}

TrainRun load_run(const Options& o) {
  require_config_file(o.config, "--config");
  require_config_file(o.model_config, "--model-config");
  TrainRun run = o.config.empty() ? TrainRun{} : TrainRun::load(o.config);
  if (!o.model_config.empty()) run.model = ModelConfig::load(o.model_config);
  if (o.seed) run.set_seed(*o.seed);
  if (o.epochs) run.epochs = *o.epochs;
  if (o.lr) run.learning_rate = *o.lr;
  if (o.folds && *o.folds >= 2) run.folds = *o.folds;
  run.validate();
  return run;
}

int cmd_synth(const Options& o, std::ostream& out) {
  require_config_file(o.config, "--config");
  require_out(o.out);
  const SynthConfig cfg = o.config.empty() ? SynthConfig{} : SynthConfig::load(o.config);
  const auto ds = synthesize(cfg, o.seed.value_or(0));
  save_dataset(ds, o.out);
  std::size_t risky = 0;
  for (const auto& c : ds.clips) risky += c.label.value_or(0) == 1 ? 1 : 0;
  out << "wrote " << ds.clips.size() << " clips (" << risky << " risky, " << ds.clips.size() - risky
      << " safe) to " << o.out << "\n";
  return kExitOk;
}

int cmd_extract(const Options& o, std::ostream& out) {
  require_config_file(o.extraction_config, "--extraction-config");
  require_config_file(o.calibration, "--calibration");
  require_input(o.dataset, "--dataset");
  require_out(o.out);
  const ExtractionConfig cfg =
      o.extraction_config.empty() ? ExtractionConfig::defaults() : ExtractionConfig::load(o.extraction_config);
  cfg.validate();
  const auto raw = load_dataset(o.dataset);
  std::optional<BevCalibration> cal;
  if (!o.calibration.empty()) cal = BevCalibration::load(o.calibration);
  if (raw.variant == Variant::kImage && !cal) {
    raise(ErrorCode::kConfigError, "image dataset needs a calibration file (--calibration)");
  }
  std::vector<std::string> warnings;
  const auto sgd = extract_dataset(raw, cfg, cal ? &*cal : nullptr, &warnings);
  save_scenegraph_dataset(sgd, o.out);
  for (const auto& clip : sgd.clips) {
    std::size_t nodes = 0, edges = 0;
    for (const auto& g : clip.graphs) {
      nodes += g.node_count();
      edges += g.edges.size();
    }
    out << clip.clip_id << ": frames " << clip.graphs.size() << "  nodes " << nodes << "  edges " << edges << "\n";
  }
  if (o.verbose) {
    for (const auto& w : warnings) out << "warning: " << w << "\n";
  } else if (!warnings.empty()) {
    out << warnings.size() << " warnings (use --verbose to list)\n";
  }
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const TrainRun run = load_run(o);
  require_input(o.dataset, "--dataset");
  require_out(o.out);
  const auto data = load_scenegraph_dataset(o.dataset);
  const fs::path dir(o.out);
  fs::create_directories(dir);

  nlohmann::ordered_json summary;
  summary["dataset"] = data.name;
  summary["clips"] = data.clips.size();
  summary["config"] = nlohmann::ordered_json::parse(run.to_json_text());
  MetricsLog log;
  const bool skip_cv = o.folds && *o.folds < 2;
  if (!skip_cv) {
    const auto cv = cross_validate(data, run, &log, "cv");
    out << run.folds << "-fold cv: " << summary_line(cv.mean) << "\n";
    summary["cv"] = nlohmann::ordered_json::parse(scores_to_json(cv.mean));
  }
  const auto fit = train_classifier(data, run, [&](int epoch, double loss, const GraphModel&) {
    log.add("final", -1, epoch, loss, nullptr);
    if (o.verbose) out << "epoch " << epoch << "  loss " << fixed(loss, 6) << "\n";
  });
  summary["final_loss_trace"] = fit.loss_trace;
  fit.model.save(dir / "checkpoint.json");
  log.write(dir / "metrics.jsonl");
  write_text_file(dir / "results.json", results_json({{data.name.empty() ? "run" : data.name, summary.dump()}}));
  out << "wrote " << (dir / "checkpoint.json").string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  require_input(o.checkpoint, "--checkpoint");
  require_input(o.dataset, "--dataset");
  const auto model = GraphModel::load(o.checkpoint);
  const auto data = load_scenegraph_dataset(o.dataset);
  const auto s = evaluate(model, data);
  out << summary_line(s) << "\n";
  if (!o.out.empty()) {
    nlohmann::ordered_json entry;
    entry["dataset"] = data.name;
    entry["scores"] = nlohmann::ordered_json::parse(scores_to_json(s));
    write_text_file(fs::path(o.out) / "results.json", results_json({{"evaluate", entry.dump()}}));
  }
  return kExitOk;
}

int cmd_transfer(const Options& o, std::ostream& out) {
  const TrainRun run = load_run(o);
  require_input(o.dataset, "--dataset");
  require_input(o.target, "--target");
  const auto source = load_scenegraph_dataset(o.dataset);
  const bool self = fs::equivalent(o.dataset, o.target);
  // Self-transfer evaluates the frozen model on the source's own test split.
  const auto target = self ? source.subset(transfer_split(source, run).test) : load_scenegraph_dataset(o.target);
  GraphModel model(run.model, Vocabulary::of(source.config));
  const auto r = transfer_evaluate(source, target, run, &model);
  out << "source: " << summary_line(r.source) << "\n";
  out << "target: " << summary_line(r.target) << "\n";
  out << "delta accuracy " << fixed(r.delta, 3) << "\n";
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    nlohmann::ordered_json entry;
    entry["source_dataset"] = source.name;
    entry["target_dataset"] = self ? source.name + ":test" : target.name;
    entry["source"] = nlohmann::ordered_json::parse(scores_to_json(r.source));
    entry["target"] = nlohmann::ordered_json::parse(scores_to_json(r.target));
    entry["delta_accuracy"] = r.delta;
    write_text_file(dir / "results.json", results_json({{"transfer", entry.dump()}}));
    model.save(dir / "checkpoint.json");
  }
  return kExitOk;
}

int cmd_explain(const Options& o, std::ostream& out) {
  require_input(o.checkpoint, "--checkpoint");
  require_input(o.dataset, "--dataset");
  require_out(o.out);
  const auto model = GraphModel::load(o.checkpoint);
  const auto data = load_scenegraph_dataset(o.dataset);
  const auto dump = explain(model, data);
  for (const auto& w : dump.warnings) out << "warning: " << w << "\n";
  const auto path = fs::path(o.out) / "attention.csv";
  write_text_file(path, attention_csv(dump));
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_visualize(const Options& o, std::ostream& out) {
  require_input(o.dataset, "--dataset");
  require_out(o.out);
  if (o.clip.empty()) raise(ErrorCode::kConfigError, "--clip is required");
  if (!o.all && !o.frame) raise(ErrorCode::kConfigError, "pass --frame or --all");
  const auto data = load_scenegraph_dataset(o.dataset);
  const auto* clip = data.find_clip(o.clip);
  if (clip == nullptr) raise(ErrorCode::kNotFound, "clip '" + o.clip + "' not in " + o.dataset);
  if (o.all) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    for (const auto& g : clip->graphs) {
      const auto path = dir / (clip->clip_id + "_" + std::to_string(g.frame_index) + ".dot");
      write_text_file(path, export_dot(g, data.config));
    }
    out << "wrote " << clip->graphs.size() << " DOT files to " << dir.string() << "\n";
    return kExitOk;
  }
  for (const auto& g : clip->graphs) {
    if (g.frame_index == *o.frame) {
      write_text_file(o.out, export_dot(g, data.config));
      out << "wrote " << o.out << "\n";
      return kExitOk;
    }
  }
  raise(ErrorCode::kNotFound, "clip '" + o.clip + "' has no frame " + std::to_string(*o.frame));
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidFoldCount:
    case ErrorCode::kVocabularyMismatch:
    case ErrorCode::kDegenerateCalibration:
    case ErrorCode::kInvalidArgument:
      return kExitConfig;
    case ErrorCode::kNotFound:
    case ErrorCode::kParseError:
    case ErrorCode::kSchemaError:
    case ErrorCode::kIoError:
    case ErrorCode::kLabelMissing:
    case ErrorCode::kLabelError:
    case ErrorCode::kEmptyClip:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kDegenerateClasses:
    case ErrorCode::kUnknownActorClass:
    case ErrorCode::kOutOfCalibratedRegion:
    case ErrorCode::kRelationIndexError:
      return kExitData;
    default:
      return kExitInternal;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene-graph extraction and graph learning for road-scene risk"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed for every random stream");
    sub->add_flag("--verbose", o.verbose, "Print progress and warnings");
  };
  auto add_learning = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Learning config JSON");
    sub->add_option("--model-config", o.model_config, "Model config JSON (overrides the learning config's model)");
    sub->add_option("--epochs", o.epochs, "Training epochs");
    sub->add_option("--lr", o.lr, "Learning rate");
    sub->add_option("--folds", o.folds, "Cross-validation folds (1 skips cross-validation)");
  };

  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic state dataset");
  synth->add_option("--config", o.config, "Scenario config JSON");
  synth->add_option("--out", o.out, "Output dataset directory");
  add_common(synth);

  auto* extract = app.add_subcommand("extract", "Extract scene graphs from a dataset directory");
  extract->add_option("--dataset", o.dataset, "Dataset directory");
  extract->add_option("--extraction-config", o.extraction_config, "Extraction config JSON");
  extract->add_option("--calibration", o.calibration, "BEV calibration JSON (image datasets)");
  extract->add_option("--out", o.out, "Output scene-graph dataset file");
  add_common(extract);

  auto* train = app.add_subcommand("train", "Cross-validate, then fit on the full dataset");
  train->add_option("--dataset", o.dataset, "Scene-graph dataset file");
  train->add_option("--out", o.out, "Output directory");
  add_learning(train);
  add_common(train);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a scene-graph dataset");
  evaluate_cmd->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  evaluate_cmd->add_option("--dataset", o.dataset, "Scene-graph dataset file");
  evaluate_cmd->add_option("--out", o.out, "Output directory for results.json");
  add_common(evaluate_cmd);

  auto* transfer = app.add_subcommand("transfer", "Train on a source dataset, evaluate frozen on a target");
  transfer->add_option("--dataset", o.dataset, "Source scene-graph dataset file");
  transfer->add_option("--target", o.target, "Target scene-graph dataset file");
  transfer->add_option("--out", o.out, "Output directory");
  add_learning(transfer);
  add_common(transfer);

  auto* explain_cmd = app.add_subcommand("explain", "Export node and frame attention as CSV");
  explain_cmd->add_option("--checkpoint", o.checkpoint, "Model checkpoint");
  explain_cmd->add_option("--dataset", o.dataset, "Scene-graph dataset file");
  explain_cmd->add_option("--out", o.out, "Output directory");
  add_common(explain_cmd);

  auto* visualize = app.add_subcommand("visualize", "Write Graphviz DOT for scene graphs");
  visualize->add_option("--dataset", o.dataset, "Scene-graph dataset file");
  visualize->add_option("--clip", o.clip, "Clip id");
  visualize->add_option("--frame", o.frame, "Frame index");
  visualize->add_flag("--all", o.all, "One file per frame under --out");
  visualize->add_option("--out", o.out, "Output DOT file, or directory with --all");
  add_common(visualize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (extract->parsed()) return cmd_extract(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (transfer->parsed()) return cmd_transfer(o, out);
    if (explain_cmd->parsed()) return cmd_explain(o, out);
    if (visualize->parsed()) return cmd_visualize(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace roadgraph::cli
