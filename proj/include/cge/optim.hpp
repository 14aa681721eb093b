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

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cge/jsonout.hpp"
#include "cge/matrix.hpp"

namespace cge {

struct AdamState {
  long long step = 0;
  Matrix m;  // first moment, parameter-shaped
  Matrix v;  // second moment
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected adaptive-moment update. The L2 term l2*param joins the
/// gradient before the moment update, so the moments see the regularized
/// gradient.
inline void adam_step(Matrix& param, const Matrix& grad, AdamState& state,
                      double lr, double l2) {
  if (!param.same_shape(grad)) throw ShapeError("adam_step: grad shape mismatch");
  if (state.m.size() == 0) {
    state.m = Matrix(param.rows(), param.cols());
    state.v = Matrix(param.rows(), param.cols());
  }
  if (!param.same_shape(state.m)) throw ShapeError("adam_step: state shape mismatch");

  state.step += 1;
  const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto& p = param.data();
  const auto& g = grad.data();
  auto& m = state.m.data();
  auto& v = state.v.data();
  for (size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i] + l2 * p[i];
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
    const double mhat = m[i] / b1t;
    const double vhat = v[i] / b2t;
    p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

// All learnable tensors by name, with per-parameter optimizer state and the
// shared L2 coefficient. Iteration order is the (sorted) name order, which
// fixes the update and serialization order.
class ParameterStore {
public:
  double l2 = 1e-4;

  Matrix& add(const std::string& name, Matrix value) {
    auto [it, fresh] = params_.emplace(name, Entry{std::move(value), {}});
    if (!fresh) throw ConfigError("duplicate parameter '" + name + "'");
    return it->second.value;
  }

  bool has(const std::string& name) const { return params_.count(name) > 0; }

  Matrix& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second.value;
  }
  const Matrix& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second.value;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(params_.size());
    for (const auto& [name, entry] : params_) out.push_back(name);
    return out;
  }

  void apply_gradients(const std::map<std::string, Matrix>& grads, double lr) {
    for (const auto& [name, grad] : grads)
      adam_step(at(name), grad, params_.at(name).adam, lr, l2);
  }

  /// Sum of squared entries over every parameter; the loss's L2 term is
  /// (l2/2) times this.
  double squared_norm() const {
    double acc = 0.0;
    for (const auto& [name, entry] : params_)
      for (double v : entry.value.data()) acc += v * v;
    return acc;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [name, entry] : params_) fn(name, entry.value);
  }
  template <typename Fn>
  void for_each_mutable(Fn&& fn) {
    for (auto& [name, entry] : params_) fn(name, entry.value);
  }

private:
  struct Entry {
    Matrix value;
    AdamState adam;
  };
  std::map<std::string, Entry> params_;
};

// ---------------------------------------------------------------------------
// Checkpoint format: one JSON header line, then one base64 line of
// little-endian 64-bit floats per parameter, in name order.
// ---------------------------------------------------------------------------

struct CheckpointMeta {
  int version = 1;
  std::string kind;
  std::map<std::string, double> hyperparameters;
  uint64_t seed = 0;
};

inline std::string serialize_checkpoint(const ParameterStore& store,
                                        const CheckpointMeta& meta) {
  JsonWriter w;
  w.begin_object();
  w.key("version").value(meta.version);
  w.key("kind").value(meta.kind);
  w.key("names").begin_array();
  store.for_each([&](const std::string& name, const Matrix&) { w.value(name); });
  w.end_array();
  w.key("shapes").begin_object();
  store.for_each([&](const std::string& name, const Matrix& m) {
    w.key(name).begin_array().value(m.rows()).value(m.cols()).end_array();
  });
  w.end_object();
  w.key("hyperparameters").begin_object();
  for (const auto& [k, v] : meta.hyperparameters) w.key(k).value(v);
  w.end_object();
  w.key("l2").value(store.l2);
  w.key("seed").value(static_cast<long long>(meta.seed));
  w.end_object();

  std::string out = w.str();
  out += "\n";
  store.for_each([&](const std::string&, const Matrix& m) {
    const auto& d = m.data();
    out += base64::encode(reinterpret_cast<const unsigned char*>(d.data()),
                          d.size() * sizeof(double));
    out += "\n";
  });
  return out;
}

inline std::pair<ParameterStore, CheckpointMeta> deserialize_checkpoint(
    const std::string& text) {
  const auto header_end = text.find('\n');
  if (header_end == std::string::npos)
    throw DataError("checkpoint missing header line");
  nlohmann::json header = nlohmann::json::parse(text.substr(0, header_end));

  CheckpointMeta meta;
  meta.version = header.at("version").get<int>();
  meta.kind = header.at("kind").get<std::string>();
  meta.seed = header.at("seed").get<uint64_t>();
  if (header.contains("hyperparameters"))
    for (auto& [k, v] : header.at("hyperparameters").items())
      meta.hyperparameters[k] = v.get<double>();

  ParameterStore store;
  store.l2 = header.value("l2", 1e-4);

  size_t cursor = header_end + 1;
  for (const auto& name : header.at("names")) {
    const std::string pname = name.get<std::string>();
    const auto shape = header.at("shapes").at(pname);
    const int rows = shape[0].get<int>();
    const int cols = shape[1].get<int>();
    auto line_end = text.find('\n', cursor);
    if (line_end == std::string::npos) line_end = text.size();
    const auto bytes = base64::decode(
        std::string_view(text).substr(cursor, line_end - cursor));
    cursor = line_end + 1;
    if (bytes.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols) *
                            sizeof(double))
      throw DataError("checkpoint payload size mismatch for '" + pname + "'");
    Matrix m(rows, cols);
    std::memcpy(m.data().data(), bytes.data(), bytes.size());
    store.add(pname, std::move(m));
  }
  return {std::move(store), std::move(meta)};
}

inline void save_checkpoint(const std::string& path, const ParameterStore& store,
                            const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  out << serialize_checkpoint(store, meta);
}

inline std::pair<ParameterStore, CheckpointMeta> load_checkpoint(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize_checkpoint(text);
}

}  // namespace cge
