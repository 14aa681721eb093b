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
#include "cge/pipeline.hpp"

namespace cge {

struct TrainConfig {
  double lr = 0.002;
  double dropout = 0.2;
  int batch = 32;
  double l2 = 1e-4;
  int epochs = 50;
  uint64_t seed = 1;
  int patience = 10;  // early stop on validation loss

  void validate() const {
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0,1)");
    if (batch < 1) throw ConfigError("batch size must be >= 1");
    if (l2 < 0.0) throw ConfigError("l2 must be non-negative");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
  }
};

struct EpochLog {
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  ParameterStore store;
  std::vector<EpochLog> log;
  int epochs_run = 0;
};

namespace detail {

inline void check_sample(const PreparedSample& s, const ModelConfig& cfg) {
  if (static_cast<int>(s.pattern.size()) != cfg.pattern_input)
    throw DataError("sample '" + s.function + "': pattern width " +
                    std::to_string(s.pattern.size()));
  for (const auto& g : {&s.normalized, &s.raw})
    for (const auto& row : g->feats)
      if (static_cast<int>(row.size()) != cfg.d)
        throw DataError("sample '" + s.function + "': feature width " +
                        std::to_string(row.size()) + " != d");
}

struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

inline EvalStats evaluate_samples(const std::vector<const PreparedSample*>& samples,
                                  const ParameterStore& store,
                                  const ModelConfig& cfg, Variant variant) {
  EvalStats stats;
  if (samples.empty()) return stats;
  SplitMix64 rng(0);
  double bce = 0.0;
  int correct = 0;
  for (const auto* s : samples) {
    const double score = model_forward(s->pattern, graph_input_for(*s, variant),
                                       store, cfg, variant, 0.0, false, rng);
    bce += bce_loss(score, s->label);
    if ((score >= 0.5) == (s->label == 1)) ++correct;
  }
  stats.loss = bce / static_cast<double>(samples.size()) +
               0.5 * store.l2 * store.squared_norm();
  stats.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
  return stats;
}

}  // namespace detail

/// Mini-batch training. Samples without a core node cannot produce a graph
/// and must be filtered out by the caller. Deterministic for a fixed seed:
/// shuffling, dropout and initialization all draw from seeded SplitMix64
/// streams, and batch gradients accumulate in sample order.
inline TrainResult train(const std::vector<const PreparedSample*>& train_set,
                         const std::vector<const PreparedSample*>& val_set,
                         const ModelConfig& model_cfg, const TrainConfig& cfg,
                         Variant variant) {
  cfg.validate();
  model_cfg.validate();
  if (train_set.empty()) throw DataError("empty training set");
  for (const auto* s : train_set) detail::check_sample(*s, model_cfg);
  for (const auto* s : val_set) detail::check_sample(*s, model_cfg);

  TrainResult result;
  result.store = init_parameters(model_cfg, cfg.seed, cfg.l2);
  SplitMix64 shuffle_rng(cfg.seed ^ 0x5350u);
  SplitMix64 dropout_rng(cfg.seed ^ 0xd0u);

  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(cfg.batch)) {
      const size_t end =
          std::min(order.size(), begin + static_cast<size_t>(cfg.batch));
      GradientMap grads;
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (size_t i = begin; i < end; ++i) {
        const PreparedSample& s = *train_set[order[i]];
        SampleTape tape;
        const double score =
            model_forward(s.pattern, graph_input_for(s, variant), result.store,
                          model_cfg, variant, cfg.dropout, true, dropout_rng,
                          &tape);
        const double dlogit = (score - static_cast<double>(s.label)) * inv;
        model_backward(tape, dlogit, result.store, model_cfg, variant, grads);
      }
      result.store.apply_gradients(grads, cfg.lr);
    }

    const auto train_stats =
        detail::evaluate_samples(train_set, result.store, model_cfg, variant);
    result.log.push_back({epoch, "train", train_stats.loss, train_stats.accuracy});
    result.epochs_run = epoch;

    if (!val_set.empty()) {
      const auto val_stats =
          detail::evaluate_samples(val_set, result.store, model_cfg, variant);
      result.log.push_back({epoch, "val", val_stats.loss, val_stats.accuracy});
      if (val_stats.loss < best_val - 1e-12) {
        best_val = val_stats.loss;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        break;
      }
    }
  }
  return result;
}

inline std::string to_json(const EpochLog& log) {
  JsonWriter w;
  w.begin_object();
  w.key("epoch").value(log.epoch);
  w.key("split").value(log.split);
  w.key("loss").value(log.loss);
  w.key("accuracy").value(log.accuracy);
  w.end_object();
  return w.str();
}

}  // namespace cge
