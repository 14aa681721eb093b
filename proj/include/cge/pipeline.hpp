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
#pragma once

#include <string>
#include <vector>

#include "cge/model.hpp"
#include "cge/normalize.hpp"
#include "cge/parser.hpp"
#include "cge/patterns.hpp"

namespace cge {

inline VulnerabilityKind kind_from_string(const std::string& s) {
  if (s == "reentrancy") return VulnerabilityKind::Reentrancy;
  if (s == "timestamp") return VulnerabilityKind::TimestampDependence;
  if (s == "infinite-loop") return VulnerabilityKind::InfiniteLoop;
  throw ConfigError("unknown vulnerability kind '" + s + "'");
}

// One function made network-ready: pattern vector plus both graph inputs (the
// normalized one and the raw one the no-normalization variant consumes).
struct PreparedSample {
  std::string path;
  std::string contract;
  std::string function;
  VulnerabilityKind kind = VulnerabilityKind::Reentrancy;
  int label = 0;

  PatternReport report;
  Vector pattern;  // length 30
  ContractGraph cgraph;
  bool has_core = false;
  GraphInput normalized;  // aggregate features, eliminated nodes
  GraphInput raw;         // every node, feature in the self slot only
};

inline const GraphInput& graph_input_for(const PreparedSample& s, Variant v) {
  return v == Variant::WON ? s.raw : s.normalized;
}

/// Runs frontend -> patterns -> graph -> normalize for one resolved function.
inline PreparedSample prepare_sample(const FunctionAst& fn, VulnerabilityKind kind,
                                     const ModelConfig& cfg) {
  PreparedSample out;
  out.function = fn.name;
  out.kind = kind;
  out.report = extract_patterns(fn, kind);
  const auto enc = encode_patterns(out.report);
  out.pattern.assign(enc.values.begin(), enc.values.end());

  out.cgraph = build_graph(fn, kind);
  out.has_core = out.cgraph.has_core();

  const auto base_feats = out.cgraph.nodes.empty()
                              ? std::vector<Vector>{}
                              : encode_node_features(out.cgraph,
                                                     cfg.base_feature_dim,
                                                     cfg.feature_options);
  if (out.has_core) {
    NormalizedGraph ng = normalize_graph(out.cgraph, base_feats);
    out.normalized.feats = ng.feature_matrix();
    out.normalized.edges = temporal_edges(ng);
  }
  // raw input: self feature followed by four zeroed aggregate slots
  out.raw.feats.reserve(base_feats.size());
  for (const auto& row : base_feats) {
    Vector wide(static_cast<size_t>(cfg.d), 0.0);
    std::copy(row.begin(), row.end(), wide.begin());
    out.raw.feats.push_back(std::move(wide));
  }
  out.raw.edges = temporal_edges(out.cgraph);
  return out;
}

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

struct DetectionResult {
  std::string function;
  VulnerabilityKind kind = VulnerabilityKind::Reentrancy;
  double score = 0.0;
  bool label = false;
  PatternReport pattern_report;
  std::string explanation;
};

inline void write_report_json(JsonWriter& w, const PatternReport& r) {
  w.begin_object();
  w.key("kind").value(to_string(r.kind));
  w.key("flags").begin_object();
  for (auto id : sub_patterns_of(r.kind)) w.key(to_string(id)).value(r.flag(id));
  w.end_object();
  w.key("evidence").begin_array();
  for (auto id : sub_patterns_of(r.kind)) {
    auto it = r.evidence.find(id);
    if (it == r.evidence.end()) continue;
    for (const auto& pos : it->second) {
      w.begin_object();
      w.key("pattern").value(to_string(id));
      w.key("line").value(pos.line);
      w.key("column").value(pos.column);
      w.end_object();
    }
  }
  w.end_array();
  w.end_object();
}

inline std::string to_json(const PatternReport& r) {
  JsonWriter w;
  write_report_json(w, r);
  return w.str();
}

inline std::string to_json(const DetectionResult& r) {
  JsonWriter w;
  w.begin_object();
  w.key("function").value(r.function);
  w.key("kind").value(to_string(r.kind));
  w.key("score").value(r.score);
  w.key("label").value(r.label);
  w.key("patterns");
  write_report_json(w, r.pattern_report);
  w.key("explanation").value(r.explanation);
  w.end_object();
  return w.str();
}

namespace detail {

inline std::string summarize(const PreparedSample& s) {
  std::string out;
  for (auto id : sub_patterns_of(s.report.kind)) {
    if (!s.report.flag(id)) continue;
    auto it = s.report.evidence.find(id);
    if (it == s.report.evidence.end() || it->second.empty()) continue;
    if (!out.empty()) out += "; ";
    out += std::string(to_string(id)) + " at " +
           std::to_string(it->second.front().line) + ":" +
           std::to_string(it->second.front().column);
  }
  int core = 0, normal = 0, fallback = 0;
  for (const auto& n : s.cgraph.nodes) {
    if (n.role == NodeRole::Core) ++core;
    if (n.role == NodeRole::Normal) ++normal;
    if (n.role == NodeRole::Fallback) ++fallback;
  }
  if (!out.empty()) out += "; ";
  out += "graph: " + std::to_string(core) + " core, " + std::to_string(normal) +
         " normal, " + std::to_string(fallback) + " fallback nodes, " +
         std::to_string(s.cgraph.edges.size()) + " edges";
  return out;
}

}  // namespace detail

/// Scores one prepared function with a trained model. Functions with no core
/// node never reach the network and come back as safe.
inline DetectionResult detect(const PreparedSample& sample,
                              const ParameterStore& store, const ModelConfig& cfg,
                              Variant variant = Variant::CGE,
                              double threshold = 0.5) {
  DetectionResult r;
  r.function = sample.function;
  r.kind = sample.kind;
  r.pattern_report = sample.report;
  if (!sample.has_core) {
    r.score = 0.0;
    r.label = false;
    r.explanation = "no trigger construct";
    return r;
  }
  SplitMix64 rng(0);  // eval mode draws nothing
  r.score = model_forward(sample.pattern, graph_input_for(sample, variant), store,
                          cfg, variant, 0.0, false, rng);
  r.label = r.score >= threshold;
  r.explanation = detail::summarize(sample);
  return r;
}

/// Full pipeline on raw source: parse, resolve, extract, build, normalize,
/// score. Checkpoint kind must match the requested kind.
inline DetectionResult predict(const std::string& source,
                               const std::string& function,
                               VulnerabilityKind kind,
                               const ParameterStore& store,
                               const CheckpointMeta& meta, const ModelConfig& cfg,
                               Variant variant = Variant::CGE,
                               double threshold = 0.5) {
  if (!meta.kind.empty() && meta.kind != to_string(kind))
    throw CheckpointMismatch("checkpoint trained for '" + meta.kind +
                             "', requested '" + to_string(kind) + "'");
  auto parsed = parse_text(source);
  for (const auto& contract : parsed.contracts) {
    for (const auto& fn : contract.functions) {
      if (fn.name != function) continue;
      const FunctionAst resolved = resolve_function(contract, function);
      PreparedSample sample = prepare_sample(resolved, kind, cfg);
      sample.contract = contract.name;
      return detect(sample, store, cfg, variant, threshold);
    }
  }
  throw UnknownFunction(function);
}

}  // namespace cge
