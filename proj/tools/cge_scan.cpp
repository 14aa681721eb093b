/*
 * Copyright 2026 the cge-scan authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// cge-scan: batch scanner and experiment harness for the contract-graph
// vulnerability detector. Subcommands: train, evaluate, detect, dump-graph,
// dump-patterns.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cge/dataset.hpp"
#include "cge/metrics.hpp"
#include "cge/pipeline.hpp"
#include "cge/train.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string kind = "reentrancy";
  std::string manifest;
  double ratio = 0.8;
  uint64_t seed = 0;
  bool seed_given = false;
  double lr = 0.002;
  double dropout = 0.2;
  int batch = 32;
  double l2 = 1e-4;
  int epochs = 50;
  std::string variant = "cge";
  double threshold = 0.5;
  std::string checkpoint;
  std::string out;
  bool fail_on_find = false;
  std::vector<std::string> files;
};

uint64_t resolve_seed(const CommonOptions& opt) {
  if (opt.seed_given) return opt.seed;
  if (const char* env = std::getenv("CGE_SCAN_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw cge::ConfigError("CGE_SCAN_SEED is not a number");
    }
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cge::DataError("cannot read '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw cge::DataError("cannot write '" + out_path + "'");
  out << text;
}

cge::CheckpointMeta make_meta(const cge::ModelConfig& cfg,
                              const cge::TrainConfig& tc, cge::Variant variant,
                              const std::string& kind) {
  cge::CheckpointMeta meta;
  meta.kind = kind;
  meta.seed = tc.seed;
  auto& h = meta.hyperparameters;
  h["base_feature_dim"] = cfg.base_feature_dim;
  h["d"] = cfg.d;
  h["d_h"] = cfg.d_h;
  h["d_out"] = cfg.d_out;
  h["pattern_hidden"] = cfg.pattern_hidden;
  h["conv_channels"] = cfg.conv_channels;
  h["conv_width"] = cfg.conv_width;
  h["pool_width"] = cfg.pool_width;
  h["fc1"] = cfg.fc1;
  h["fc2"] = cfg.fc2;
  h["softmax_update"] = cfg.softmax_update ? 1 : 0;
  h["per_edge_type_message"] = cfg.per_edge_type_message ? 1 : 0;
  h["share_fusion_branches"] = cfg.share_fusion_branches ? 1 : 0;
  h["buckets"] = cfg.feature_options.buckets;
  h["lr"] = tc.lr;
  h["dropout"] = tc.dropout;
  h["batch"] = tc.batch;
  h["l2"] = tc.l2;
  h["epochs"] = tc.epochs;
  h["variant"] = static_cast<double>(static_cast<int>(variant));
  return meta;
}

std::pair<cge::ModelConfig, cge::Variant> config_from_meta(
    const cge::CheckpointMeta& meta) {
  cge::ModelConfig cfg;
  auto get = [&](const char* key, double fallback) {
    auto it = meta.hyperparameters.find(key);
    return it == meta.hyperparameters.end() ? fallback : it->second;
  };
  cfg.base_feature_dim = static_cast<int>(get("base_feature_dim", 24));
  cfg.d = static_cast<int>(get("d", 120));
  cfg.d_h = static_cast<int>(get("d_h", 64));
  cfg.d_out = static_cast<int>(get("d_out", 64));
  cfg.pattern_hidden = static_cast<int>(get("pattern_hidden", 64));
  cfg.conv_channels = static_cast<int>(get("conv_channels", 4));
  cfg.conv_width = static_cast<int>(get("conv_width", 3));
  cfg.pool_width = static_cast<int>(get("pool_width", 2));
  cfg.fc1 = static_cast<int>(get("fc1", 64));
  cfg.fc2 = static_cast<int>(get("fc2", 32));
  cfg.softmax_update = get("softmax_update", 1) != 0;
  cfg.per_edge_type_message = get("per_edge_type_message", 0) != 0;
  cfg.share_fusion_branches = get("share_fusion_branches", 0) != 0;
  cfg.feature_options.buckets = static_cast<int>(get("buckets", 8));
  const auto variant = static_cast<cge::Variant>(static_cast<int>(get("variant", 0)));
  return {cfg, variant};
}

// kind-filtered ingest; the manifest's directory anchors relative paths
std::vector<cge::PreparedSample> load_samples(const CommonOptions& opt,
                                              const cge::ModelConfig& cfg,
                                              cge::VulnerabilityKind kind) {
  if (opt.manifest.empty()) throw cge::ConfigError("--manifest is required");
  auto manifest = cge::load_manifest(opt.manifest);
  cge::DatasetManifest filtered;
  for (const auto& e : manifest.entries)
    if (e.kind == kind) filtered.entries.push_back(e);
  const std::string dir = fs::path(opt.manifest).parent_path().string();
  auto result = cge::ingest(dir.empty() ? "." : dir, filtered, cfg);
  for (const auto& failure : result.failures)
    std::cerr << "warning: skipped " << failure << "\n";
  if (!result.failures.empty())
    std::cerr << "warning: " << result.failures.size() << " entries excluded\n";
  return std::move(result.samples);
}

int run_train(const CommonOptions& opt) {
  const auto kind = cge::kind_from_string(opt.kind);
  cge::ModelConfig cfg = cge::ModelConfig::with_base_dim(24);
  cge::TrainConfig tc;
  tc.lr = opt.lr;
  tc.dropout = opt.dropout;
  tc.batch = opt.batch;
  tc.l2 = opt.l2;
  tc.epochs = opt.epochs;
  tc.seed = resolve_seed(opt);
  const auto variant = cge::variant_from_string(opt.variant);

  auto samples = load_samples(opt, cfg, kind);
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  auto [train_idx, test_idx] = cge::split(samples.size(), labels, opt.ratio, tc.seed);

  std::vector<const cge::PreparedSample*> train_set, val_set;
  for (auto i : train_idx)
    if (samples[i].has_core) train_set.push_back(&samples[i]);
  for (auto i : test_idx)
    if (samples[i].has_core) val_set.push_back(&samples[i]);
  if (train_set.empty()) throw cge::DataError("no trainable samples");

  auto result = cge::train(train_set, val_set, cfg, tc, variant);
  for (const auto& line : result.log) std::cout << cge::to_json(line) << "\n";

  const std::string path = opt.out.empty() ? "model.ckpt" : opt.out;
  cge::save_checkpoint(path, result.store, make_meta(cfg, tc, variant, opt.kind));
  std::cerr << "checkpoint written to " << path << "\n";
  return 0;
}

int run_evaluate(const CommonOptions& opt) {
  if (opt.checkpoint.empty()) throw cge::ConfigError("--checkpoint is required");
  const auto kind = cge::kind_from_string(opt.kind);
  auto [store, meta] = cge::load_checkpoint(opt.checkpoint);
  if (meta.kind != opt.kind)
    throw cge::CheckpointMismatch("checkpoint trained for '" + meta.kind + "'");
  auto [cfg, variant] = config_from_meta(meta);

  auto samples = load_samples(opt, cfg, kind);
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  const uint64_t seed = resolve_seed(opt);
  auto [train_idx, test_idx] = cge::split(samples.size(), labels, opt.ratio, seed);
  if (test_idx.empty()) throw cge::ConfigError("empty test split");

  std::vector<std::pair<double, int>> scored;
  for (auto i : test_idx) {
    const auto result = cge::detect(samples[i], store, cfg, variant, opt.threshold);
    scored.emplace_back(result.score, samples[i].label);
  }
  auto metrics = cge::compute_metrics(scored, opt.threshold);
  write_output(opt.out, cge::to_json(metrics) + "\n");
  return 0;
}

int run_detect(const CommonOptions& opt) {
  if (opt.checkpoint.empty()) throw cge::ConfigError("--checkpoint is required");
  if (opt.files.empty()) throw cge::ConfigError("no input files");
  const auto kind = cge::kind_from_string(opt.kind);
  auto [store, meta] = cge::load_checkpoint(opt.checkpoint);
  if (meta.kind != opt.kind)
    throw cge::CheckpointMismatch("checkpoint trained for '" + meta.kind + "'");
  auto [cfg, variant] = config_from_meta(meta);

  // files scan in parallel; results join in input order through one writer
  struct FileResult {
    std::string text;
    std::vector<cge::Diagnostic> warnings;
    bool finding = false;
  };
  std::vector<std::future<FileResult>> futures;
  for (const auto& file : opt.files) {
    futures.push_back(std::async(std::launch::async, [&, file]() {
      FileResult fr;
      auto parsed = cge::parse_text(read_file(file), file);
      fr.warnings = parsed.warnings;
      for (const auto& contract : parsed.contracts) {
        for (const auto& fn : contract.functions) {
          const auto resolved = cge::resolve_function(contract, fn.name);
          auto sample = cge::prepare_sample(resolved, kind, cfg);
          sample.path = file;
          sample.contract = contract.name;
          const auto result =
              cge::detect(sample, store, cfg, variant, opt.threshold);
          fr.finding |= result.label;
          fr.text += cge::to_json(result) + "\n";
        }
      }
      return fr;
    }));
  }

  bool any_finding = false;
  std::string out_text;
  for (auto& future : futures) {
    FileResult fr = future.get();
    for (const auto& warning : fr.warnings)
      std::cerr << warning.file << ":" << warning.pos.line << ":"
                << warning.pos.column << ": " << warning.message << "\n";
    any_finding |= fr.finding;
    out_text += fr.text;
  }
  write_output(opt.out, out_text);
  return any_finding && opt.fail_on_find ? 1 : 0;
}

template <typename DumpFn>
int run_dump(const CommonOptions& opt, DumpFn&& dump) {
  if (opt.files.empty()) throw cge::ConfigError("no input files");
  const auto kind = cge::kind_from_string(opt.kind);
  std::string out_text;
  for (const auto& file : opt.files) {
    auto parsed = cge::parse_text(read_file(file), file);
    for (const auto& contract : parsed.contracts)
      for (const auto& fn : contract.functions) {
        const auto resolved = cge::resolve_function(contract, fn.name);
        out_text += dump(resolved, kind) + "\n";
      }
  }
  write_output(opt.out, out_text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"function-level smart-contract vulnerability scanner"};
  app.require_subcommand(1);

  CommonOptions opt;
  auto add_common = [&](CLI::App* cmd, bool with_files) {
    cmd->add_option("--kind", opt.kind,
                    "vulnerability kind: reentrancy|timestamp|infinite-loop");
    cmd->add_option("--manifest", opt.manifest, "dataset manifest CSV");
    cmd->add_option("--ratio", opt.ratio, "train split ratio");
    cmd->add_option("--seed", opt.seed, "random seed (CGE_SCAN_SEED fallback)")
        ->each([&](const std::string&) { opt.seed_given = true; });
    cmd->add_option("--lr", opt.lr, "learning rate");
    cmd->add_option("--dropout", opt.dropout, "dropout rate");
    cmd->add_option("--batch", opt.batch, "mini-batch size");
    cmd->add_option("--l2", opt.l2, "L2 coefficient");
    cmd->add_option("--epochs", opt.epochs, "training epochs");
    cmd->add_option("--variant", opt.variant, "model variant: cge|wog|woe|won");
    cmd->add_option("--threshold", opt.threshold, "decision threshold");
    cmd->add_option("--checkpoint", opt.checkpoint, "checkpoint path");
    cmd->add_option("--out", opt.out, "output path (stdout when omitted)");
    cmd->add_flag("--fail-on-find", opt.fail_on_find,
                  "exit 1 when any function is flagged");
    if (with_files)
      cmd->add_option("files", opt.files, "Solidity source files");
  };

  auto* train_cmd = app.add_subcommand("train", "train a per-kind model");
  add_common(train_cmd, false);
  auto* eval_cmd = app.add_subcommand("evaluate", "score the held-out split");
  add_common(eval_cmd, false);
  auto* detect_cmd = app.add_subcommand("detect", "scan source files");
  add_common(detect_cmd, true);
  auto* dump_graph_cmd =
      app.add_subcommand("dump-graph", "emit contract graphs as JSON");
  add_common(dump_graph_cmd, true);
  auto* dump_patterns_cmd =
      app.add_subcommand("dump-patterns", "emit pattern reports as JSON");
  add_common(dump_patterns_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (train_cmd->parsed()) return run_train(opt);
    if (eval_cmd->parsed()) return run_evaluate(opt);
    if (detect_cmd->parsed()) return run_detect(opt);
    if (dump_graph_cmd->parsed())
      return run_dump(opt, [](const cge::FunctionAst& fn, cge::VulnerabilityKind k) {
        return cge::to_json(cge::build_graph(fn, k));
      });
    if (dump_patterns_cmd->parsed())
      return run_dump(opt, [](const cge::FunctionAst& fn, cge::VulnerabilityKind k) {
        return cge::to_json(cge::extract_patterns(fn, k));
      });
  } catch (const cge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
