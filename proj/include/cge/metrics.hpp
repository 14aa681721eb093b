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

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "cge/diagnostics.hpp"
#include "cge/jsonout.hpp"

namespace cge {

struct Metrics {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  std::vector<std::pair<double, double>> roc;  // (fpr, tpr)
  double auc = 0.0;
};

/// Confusion counts at the threshold (score >= threshold predicts positive),
/// ROC over every distinct score threshold, AUC by the trapezoidal rule.
inline Metrics compute_metrics(const std::vector<std::pair<double, int>>& scored,
                               double threshold) {
  if (scored.empty()) throw DataError("compute_metrics: empty input");
  Metrics m;
  long long pos = 0, neg = 0;
  for (const auto& [score, label] : scored) {
    const bool predicted = score >= threshold;
    if (label == 1) {
      ++pos;
      predicted ? ++m.tp : ++m.fn;
    } else {
      ++neg;
      predicted ? ++m.fp : ++m.tn;
    }
  }
  const double total = static_cast<double>(scored.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  m.precision = (m.tp + m.fp) == 0
                    ? 0.0
                    : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  m.recall = (m.tp + m.fn) == 0
                 ? 0.0
                 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);

  // ROC sweep from the strictest threshold (above every score) downwards
  std::set<double, std::greater<double>> cuts;
  for (const auto& [score, label] : scored) cuts.insert(score);
  m.roc.emplace_back(0.0, 0.0);
  for (double cut : cuts) {
    long long tp = 0, fp = 0;
    for (const auto& [score, label] : scored) {
      if (score >= cut) (label == 1 ? ++tp : ++fp);
    }
    const double tpr = pos == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pos);
    const double fpr = neg == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(neg);
    m.roc.emplace_back(fpr, tpr);
  }
  for (size_t i = 1; i < m.roc.size(); ++i) {
    const auto& [x0, y0] = m.roc[i - 1];
    const auto& [x1, y1] = m.roc[i];
    m.auc += (x1 - x0) * (y0 + y1) * 0.5;
  }
  return m;
}

inline std::string to_json(const Metrics& m) {
  JsonWriter w;
  w.begin_object();
  w.key("tp").value(m.tp);
  w.key("fp").value(m.fp);
  w.key("tn").value(m.tn);
  w.key("fn").value(m.fn);
  w.key("accuracy").value(m.accuracy);
  w.key("precision").value(m.precision);
  w.key("recall").value(m.recall);
  w.key("f1").value(m.f1);
  w.key("auc").value(m.auc);
  w.key("roc").begin_array();
  for (const auto& [fpr, tpr] : m.roc)
    w.begin_array().value(fpr).value(tpr).end_array();
  w.end_array();
  w.end_object();
  return w.str();
}

}  // namespace cge
