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

#include <map>
#include <string>
#include <vector>

#include "cge/graph.hpp"
#include "cge/matrix.hpp"
#include "cge/normalize.hpp"
#include "cge/optim.hpp"
#include "cge/random.hpp"

namespace cge {

enum class Variant { CGE, WOG, WOE, WON };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::CGE: return "cge";
    case Variant::WOG: return "wog";
    case Variant::WOE: return "woe";
    case Variant::WON: return "won";
  }
  return "";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "cge") return Variant::CGE;
  if (s == "wog") return Variant::WOG;
  if (s == "woe") return Variant::WOE;
  if (s == "won") return Variant::WON;
  throw ConfigError("unknown variant '" + s + "'");
}

struct ModelConfig {
  int base_feature_dim = 24;  // encoded node feature width E
  int d = 120;                // hidden width; 5*E so the five-part aggregate fits
  int d_h = 64;               // readout gate hidden width
  int d_out = 64;             // readout gate output width
  int pattern_input = 30;
  int pattern_hidden = 64;
  int conv_channels = 4;
  int conv_width = 3;
  int pool_width = 2;
  int fc1 = 64;
  int fc2 = 32;
  bool softmax_update = true;        // hidden-state activation (sigmoid otherwise)
  bool per_edge_type_message = false;
  bool share_fusion_branches = false;
  NodeFeatureOptions feature_options{};

  static ModelConfig with_base_dim(int base) {
    ModelConfig cfg;
    cfg.base_feature_dim = base;
    cfg.d = 5 * base;
    return cfg;
  }

  int conv_out_len() const { return d - conv_width + 1; }
  int pooled_len() const { return conv_out_len() / pool_width; }
  int branch_out() const { return pooled_len() * conv_channels; }

  void validate() const {
    if (d < 1 || d_h < 1 || d_out < 1 || pattern_hidden < 1 || fc1 < 1 || fc2 < 1)
      throw ConfigError("model widths must be positive");
    if (conv_out_len() < pool_width)
      throw ConfigError("hidden width too small for the convolution/pooling stack");
  }
};

// ---------------------------------------------------------------------------
// Parameter initialization
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix glorot(int rows, int cols, SplitMix64& rng) {
  Matrix m(rows, cols);
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (auto& v : m.data()) v = rng.uniform(-s, s);
  return m;
}

inline std::string msg_weight_name(const ModelConfig& cfg, int type) {
  if (!cfg.per_edge_type_message) return "tmp.W_msg";
  return "tmp.W_msg." + std::to_string(type);
}
inline std::string msg_bias_name(const ModelConfig& cfg, int type) {
  if (!cfg.per_edge_type_message) return "tmp.b_msg";
  return "tmp.b_msg." + std::to_string(type);
}

inline std::string branch_prefix(const ModelConfig& cfg, bool pattern_branch) {
  if (cfg.share_fusion_branches) return "fusion.S";
  return pattern_branch ? "fusion.P" : "fusion.G";
}

}  // namespace detail

inline ParameterStore init_parameters(const ModelConfig& cfg, uint64_t seed,
                                      double l2 = 1e-4) {
  cfg.validate();
  SplitMix64 rng(seed);
  ParameterStore store;
  store.l2 = l2;

  store.add("pattern.W1", detail::glorot(cfg.pattern_hidden, cfg.pattern_input, rng));
  store.add("pattern.b1", Matrix(cfg.pattern_hidden, 1));
  store.add("pattern.W2", detail::glorot(cfg.d, cfg.pattern_hidden, rng));
  store.add("pattern.b2", Matrix(cfg.d, 1));

  const int msg_in = cfg.d + kEdgeTypeCount;
  if (cfg.per_edge_type_message) {
    for (int t = 0; t < kEdgeTypeCount; ++t) {
      store.add(detail::msg_weight_name(cfg, t), detail::glorot(cfg.d, msg_in, rng));
      store.add(detail::msg_bias_name(cfg, t), Matrix(cfg.d, 1));
    }
  } else {
    store.add("tmp.W_msg", detail::glorot(cfg.d, msg_in, rng));
    store.add("tmp.b_msg", Matrix(cfg.d, 1));
  }
  store.add("tmp.U", detail::glorot(cfg.d, cfg.d, rng));
  store.add("tmp.Z", detail::glorot(cfg.d, cfg.d, rng));
  store.add("tmp.R", detail::glorot(cfg.d, cfg.d, rng));
  store.add("tmp.b1", Matrix(cfg.d, 1));
  store.add("tmp.b2", Matrix(cfg.d, 1));

  for (const char* gate : {"g", "o"}) {
    const std::string p = std::string("readout.") + gate;
    store.add(p + ".W1", detail::glorot(cfg.d_h, 2 * cfg.d, rng));
    store.add(p + ".b1", Matrix(cfg.d_h, 1));
    store.add(p + ".W2", detail::glorot(cfg.d_out, cfg.d_h, rng));
    store.add(p + ".b2", Matrix(cfg.d_out, 1));
  }
  store.add("readout.W_fc", detail::glorot(cfg.d, cfg.d_out, rng));
  store.add("readout.b_fc", Matrix(cfg.d, 1));

  auto add_branch = [&](const std::string& prefix) {
    if (store.has(prefix + ".conv_k")) return;
    store.add(prefix + ".conv_k", detail::glorot(cfg.conv_channels, cfg.conv_width, rng));
    store.add(prefix + ".conv_b", Matrix(cfg.conv_channels, 1));
  };
  add_branch(detail::branch_prefix(cfg, true));
  add_branch(detail::branch_prefix(cfg, false));

  store.add("head.W1", detail::glorot(cfg.fc1, 2 * cfg.branch_out(), rng));
  store.add("head.b1", Matrix(cfg.fc1, 1));
  store.add("head.W2", detail::glorot(cfg.fc2, cfg.fc1, rng));
  store.add("head.b2", Matrix(cfg.fc2, 1));
  store.add("head.W3", detail::glorot(1, cfg.fc2, rng));
  store.add("head.b3", Matrix(1, 1));
  return store;
}

// gradient accumulators shaped like the parameters they belong to
using GradientMap = std::map<std::string, Matrix>;

namespace detail {

inline Matrix& grad_for(GradientMap& grads, const ParameterStore& store,
                        const std::string& name) {
  auto it = grads.find(name);
  if (it == grads.end()) {
    const Matrix& p = store.at(name);
    it = grads.emplace(name, Matrix(p.rows(), p.cols())).first;
  }
  return it->second;
}

inline const Vector& bias_vec(const ParameterStore& store, const std::string& name) {
  return store.at(name).data();
}

inline void add_bias_grad(GradientMap& grads, const ParameterStore& store,
                          const std::string& name, const Vector& d) {
  add_into(grad_for(grads, store, name).data(), d);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dropout
// ---------------------------------------------------------------------------

struct DropoutMask {
  Vector scale;  // 0 or 1/(1-rate) per unit; empty means identity
};

inline Vector apply_dropout(const Vector& x, double rate, bool train,
                            SplitMix64& rng, DropoutMask& mask) {
  if (!train || rate <= 0.0) {
    mask.scale.clear();
    return x;
  }
  mask.scale.assign(x.size(), 0.0);
  Vector out(x.size());
  const double keep = 1.0 - rate;
  for (size_t i = 0; i < x.size(); ++i) {
    if (rng.uniform() < keep) mask.scale[i] = 1.0 / keep;
    out[i] = x[i] * mask.scale[i];
  }
  return out;
}

inline Vector dropout_backward(const Vector& dy, const DropoutMask& mask) {
  if (mask.scale.empty()) return dy;
  Vector dx(dy.size());
  for (size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask.scale[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Pattern encoder phi: 30 -> hidden (tanh, dropout) -> d
// ---------------------------------------------------------------------------

struct PatternTape {
  Vector x, h_act, hd, out;
  DropoutMask mask;
};

inline Vector pattern_forward(const Vector& x, const ParameterStore& store,
                              const ModelConfig& cfg, double dropout, bool train,
                              SplitMix64& rng, PatternTape* tape = nullptr) {
  if (static_cast<int>(x.size()) != cfg.pattern_input)
    throw ShapeError("pattern_forward: input width " + std::to_string(x.size()));
  Vector h = tanh_vec(affine(store.at("pattern.W1"), x,
                             detail::bias_vec(store, "pattern.b1")));
  DropoutMask mask;
  Vector hd = apply_dropout(h, dropout, train, rng, mask);
  Vector out = affine(store.at("pattern.W2"), hd,
                      detail::bias_vec(store, "pattern.b2"));
  if (tape) {
    tape->x = x;
    tape->h_act = std::move(h);
    tape->hd = hd;
    tape->mask = std::move(mask);
    tape->out = out;
  }
  return out;
}

inline void pattern_backward(const PatternTape& tape, const Vector& dout,
                             const ParameterStore& store, GradientMap& grads) {
  add_outer(detail::grad_for(grads, store, "pattern.W2"), dout, tape.hd);
  detail::add_bias_grad(grads, store, "pattern.b2", dout);
  Vector dhd = matvec_t(store.at("pattern.W2"), dout);
  Vector dh = dropout_backward(dhd, tape.mask);
  Vector dpre = tanh_backward(tape.h_act, dh);
  add_outer(detail::grad_for(grads, store, "pattern.W1"), dpre, tape.x);
  detail::add_bias_grad(grads, store, "pattern.b1", dpre);
}

// ---------------------------------------------------------------------------
// Temporal message propagation
// ---------------------------------------------------------------------------

// one directed edge of the propagation schedule, type already as an ordinal
struct TemporalEdge {
  int start = 0;
  int end = 0;
  int type = 0;
};

inline std::vector<TemporalEdge> temporal_edges(const NormalizedGraph& g) {
  std::vector<TemporalEdge> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges)
    out.push_back({g.index_of(e.start), g.index_of(e.end),
                   static_cast<int>(e.etype)});
  return out;
}

inline std::vector<TemporalEdge> temporal_edges(const ContractGraph& g) {
  std::vector<TemporalEdge> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges)
    out.push_back({e.start, e.end, static_cast<int>(e.etype)});
  return out;
}

struct TmpStepTape {
  int start, end, type;
  Vector h_start, h_end_prev, x, m, hhat, h_new;
};

struct TmpTape {
  std::vector<Vector> h0;
  std::vector<TmpStepTape> steps;
  std::vector<Vector> hT;
};

/// Runs the message phase: edges fire one per time step in temporal order,
/// each updating the hidden state of its end node from the start node's state
/// and the edge type.
inline std::vector<Vector> tmp_message_phase(const std::vector<TemporalEdge>& edges,
                                             const std::vector<Vector>& feats,
                                             const ParameterStore& store,
                                             const ModelConfig& cfg,
                                             TmpTape* tape = nullptr) {
  if (feats.empty()) throw EmptyGraph();
  for (const auto& row : feats)
    if (static_cast<int>(row.size()) != cfg.d)
      throw ShapeError("tmp_message_phase: feature width != d");

  std::vector<Vector> h = feats;
  if (tape) {
    tape->h0 = feats;
    tape->steps.clear();
  }
  for (const auto& e : edges) {
    if (e.start < 0 || e.end < 0 || e.start >= static_cast<int>(h.size()) ||
        e.end >= static_cast<int>(h.size()))
      throw ShapeError("tmp_message_phase: edge endpoint out of range");
    Vector x = h[static_cast<size_t>(e.start)];
    x.resize(static_cast<size_t>(cfg.d + kEdgeTypeCount), 0.0);
    x[static_cast<size_t>(cfg.d + e.type)] = 1.0;

    TmpStepTape step;
    step.start = e.start;
    step.end = e.end;
    step.type = e.type;
    step.h_start = h[static_cast<size_t>(e.start)];
    step.h_end_prev = h[static_cast<size_t>(e.end)];

    Vector m = affine(store.at(detail::msg_weight_name(cfg, e.type)), x,
                      detail::bias_vec(store, detail::msg_bias_name(cfg, e.type)));
    Vector pre1 = affine(store.at("tmp.U"), m, detail::bias_vec(store, "tmp.b1"));
    add_into(pre1, affine(store.at("tmp.Z"), step.h_end_prev,
                          Vector(static_cast<size_t>(cfg.d), 0.0)));
    Vector hhat = tanh_vec(pre1);
    Vector pre2 = affine(store.at("tmp.R"), hhat, detail::bias_vec(store, "tmp.b2"));
    Vector h_new = cfg.softmax_update ? softmax(pre2) : sigmoid_vec(pre2);

    h[static_cast<size_t>(e.end)] = h_new;
    if (tape) {
      step.x = std::move(x);
      step.m = std::move(m);
      step.hhat = std::move(hhat);
      step.h_new = std::move(h_new);
      tape->steps.push_back(std::move(step));
    }
  }
  if (tape) tape->hT = h;
  return h;
}

/// Back-propagates through the edge schedule in reverse. `dH` is the loss
/// gradient of each node's final hidden state; on return it holds the
/// gradient of the initial states (the node features).
inline void tmp_backward(const TmpTape& tape, std::vector<Vector>& dH,
                         const ParameterStore& store, const ModelConfig& cfg,
                         GradientMap& grads) {
  for (auto it = tape.steps.rbegin(); it != tape.steps.rend(); ++it) {
    const TmpStepTape& step = *it;
    Vector dh_new = dH[static_cast<size_t>(step.end)];

    Vector dpre2 = cfg.softmax_update ? softmax_backward(step.h_new, dh_new)
                                      : [&] {
                                          Vector dz(dh_new.size());
                                          for (size_t i = 0; i < dz.size(); ++i)
                                            dz[i] = step.h_new[i] *
                                                    (1.0 - step.h_new[i]) *
                                                    dh_new[i];
                                          return dz;
                                        }();
    add_outer(detail::grad_for(grads, store, "tmp.R"), dpre2, step.hhat);
    detail::add_bias_grad(grads, store, "tmp.b2", dpre2);
    Vector dhhat = matvec_t(store.at("tmp.R"), dpre2);
    Vector dpre1 = tanh_backward(step.hhat, dhhat);
    add_outer(detail::grad_for(grads, store, "tmp.U"), dpre1, step.m);
    detail::add_bias_grad(grads, store, "tmp.b1", dpre1);
    add_outer(detail::grad_for(grads, store, "tmp.Z"), dpre1, step.h_end_prev);
    Vector dm = matvec_t(store.at("tmp.U"), dpre1);
    Vector dh_prev = matvec_t(store.at("tmp.Z"), dpre1);

    add_outer(detail::grad_for(grads, store, detail::msg_weight_name(cfg, step.type)),
              dm, step.x);
    detail::add_bias_grad(grads, store, detail::msg_bias_name(cfg, step.type), dm);
    Vector dx = matvec_t(store.at(detail::msg_weight_name(cfg, step.type)), dm);

    // the end node's pre-step state receives dh_prev; the start node's state
    // receives the h-slice of dx (a self-loop sums both)
    dH[static_cast<size_t>(step.end)] = std::move(dh_prev);
    auto& ds = dH[static_cast<size_t>(step.start)];
    for (int i = 0; i < cfg.d; ++i)
      ds[static_cast<size_t>(i)] += dx[static_cast<size_t>(i)];
  }
}

// ---------------------------------------------------------------------------
// Readout: gated sum over node state differences
// ---------------------------------------------------------------------------

struct ReadoutNodeTape {
  Vector s, tg, g, to, o;
};

struct ReadoutTape {
  std::vector<ReadoutNodeTape> nodes;
  Vector sum;
};

inline Vector tmp_readout(const std::vector<Vector>& h0,
                          const std::vector<Vector>& hT,
                          const ParameterStore& store, const ModelConfig& cfg,
                          ReadoutTape* tape = nullptr) {
  if (h0.size() != hT.size() || h0.empty())
    throw ShapeError("tmp_readout: state shape mismatch");
  Vector sum(static_cast<size_t>(cfg.d_out), 0.0);
  if (tape) tape->nodes.clear();
  for (size_t i = 0; i < h0.size(); ++i) {
    ReadoutNodeTape n;
    n.s = concat(hT[i], h0[i]);
    n.tg = tanh_vec(affine(store.at("readout.g.W1"), n.s,
                           detail::bias_vec(store, "readout.g.b1")));
    n.g = softmax(affine(store.at("readout.g.W2"), n.tg,
                         detail::bias_vec(store, "readout.g.b2")));
    n.to = tanh_vec(affine(store.at("readout.o.W1"), n.s,
                           detail::bias_vec(store, "readout.o.b1")));
    n.o = softmax(affine(store.at("readout.o.W2"), n.to,
                         detail::bias_vec(store, "readout.o.b2")));
    for (int j = 0; j < cfg.d_out; ++j)
      sum[static_cast<size_t>(j)] +=
          n.o[static_cast<size_t>(j)] * n.g[static_cast<size_t>(j)];
    if (tape) tape->nodes.push_back(std::move(n));
  }
  Vector out = affine(store.at("readout.W_fc"), sum,
                      detail::bias_vec(store, "readout.b_fc"));
  if (tape) tape->sum = std::move(sum);
  return out;
}

/// dG_r flows back into parameter grads and the two state matrices.
inline void readout_backward(const ReadoutTape& tape, const Vector& dout,
                             const ParameterStore& store, const ModelConfig& cfg,
                             GradientMap& grads, std::vector<Vector>& dH0,
                             std::vector<Vector>& dHT) {
  add_outer(detail::grad_for(grads, store, "readout.W_fc"), dout, tape.sum);
  detail::add_bias_grad(grads, store, "readout.b_fc", dout);
  Vector dsum = matvec_t(store.at("readout.W_fc"), dout);

  for (size_t i = 0; i < tape.nodes.size(); ++i) {
    const auto& n = tape.nodes[i];
    Vector dg(n.g.size()), do_(n.o.size());
    for (size_t j = 0; j < n.g.size(); ++j) {
      dg[j] = dsum[j] * n.o[j];
      do_[j] = dsum[j] * n.g[j];
    }
    Vector ds(n.s.size(), 0.0);
    auto gate_back = [&](const char* gate, const Vector& soft_out,
                         const Vector& tanh_out, const Vector& dsoft) {
      const std::string p = std::string("readout.") + gate;
      Vector dz2 = softmax_backward(soft_out, dsoft);
      add_outer(detail::grad_for(grads, store, p + ".W2"), dz2, tanh_out);
      detail::add_bias_grad(grads, store, p + ".b2", dz2);
      Vector dt = matvec_t(store.at(p + ".W2"), dz2);
      Vector dz1 = tanh_backward(tanh_out, dt);
      add_outer(detail::grad_for(grads, store, p + ".W1"), dz1, n.s);
      detail::add_bias_grad(grads, store, p + ".b1", dz1);
      add_into(ds, matvec_t(store.at(p + ".W1"), dz1));
    };
    gate_back("g", n.g, n.tg, dg);
    gate_back("o", n.o, n.to, do_);
    for (int j = 0; j < cfg.d; ++j) {
      dHT[i][static_cast<size_t>(j)] += ds[static_cast<size_t>(j)];
      dH0[i][static_cast<size_t>(j)] += ds[static_cast<size_t>(cfg.d + j)];
    }
  }
}

// ---------------------------------------------------------------------------
// Fusion: per-branch conv + max-pool, concat, 3 FC layers, sigmoid
// ---------------------------------------------------------------------------

struct PsiTape {
  Vector in;
  Vector act;              // channels x conv_out_len, channel-major
  std::vector<int> argmax; // channels x pooled_len
  Vector out;
};

inline Vector psi_forward(const Vector& v, const std::string& prefix,
                          const ParameterStore& store, const ModelConfig& cfg,
                          PsiTape* tape = nullptr) {
  if (static_cast<int>(v.size()) != cfg.d)
    throw ShapeError("fusion branch input width != d");
  const Matrix& K = store.at(prefix + ".conv_k");
  const Vector& b = detail::bias_vec(store, prefix + ".conv_b");
  const int L = cfg.conv_out_len();
  const int P = cfg.pooled_len();

  Vector act(static_cast<size_t>(cfg.conv_channels) * static_cast<size_t>(L));
  for (int c = 0; c < cfg.conv_channels; ++c)
    for (int i = 0; i < L; ++i) {
      double acc = b[static_cast<size_t>(c)];
      for (int j = 0; j < cfg.conv_width; ++j)
        acc += K(c, j) * v[static_cast<size_t>(i + j)];
      act[static_cast<size_t>(c * L + i)] = std::tanh(acc);
    }

  Vector out(static_cast<size_t>(cfg.conv_channels) * static_cast<size_t>(P));
  std::vector<int> argmax(out.size());
  for (int c = 0; c < cfg.conv_channels; ++c)
    for (int p = 0; p < P; ++p) {
      int best = c * L + p * cfg.pool_width;
      for (int k = 1; k < cfg.pool_width; ++k) {
        const int idx = c * L + p * cfg.pool_width + k;
        if (act[static_cast<size_t>(idx)] > act[static_cast<size_t>(best)])
          best = idx;
      }
      out[static_cast<size_t>(c * P + p)] = act[static_cast<size_t>(best)];
      argmax[static_cast<size_t>(c * P + p)] = best;
    }
  if (tape) {
    tape->in = v;
    tape->act = std::move(act);
    tape->argmax = std::move(argmax);
    tape->out = out;
  }
  return out;
}

inline Vector psi_backward(const PsiTape& tape, const Vector& dout,
                           const std::string& prefix, const ParameterStore& store,
                           const ModelConfig& cfg, GradientMap& grads) {
  const int L = cfg.conv_out_len();
  Vector dact(tape.act.size(), 0.0);
  for (size_t k = 0; k < dout.size(); ++k)
    dact[static_cast<size_t>(tape.argmax[k])] += dout[k];

  Matrix& dK = detail::grad_for(grads, store, prefix + ".conv_k");
  Matrix& db = detail::grad_for(grads, store, prefix + ".conv_b");
  const Matrix& K = store.at(prefix + ".conv_k");
  Vector dv(tape.in.size(), 0.0);
  for (int c = 0; c < cfg.conv_channels; ++c)
    for (int i = 0; i < L; ++i) {
      const double a = tape.act[static_cast<size_t>(c * L + i)];
      const double dpre = (1.0 - a * a) * dact[static_cast<size_t>(c * L + i)];
      if (dpre == 0.0) continue;
      db(c, 0) += dpre;
      for (int j = 0; j < cfg.conv_width; ++j) {
        dK(c, j) += dpre * tape.in[static_cast<size_t>(i + j)];
        dv[static_cast<size_t>(i + j)] += dpre * K(c, j);
      }
    }
  return dv;
}

struct FusionTape {
  PsiTape psi_p, psi_g;
  Vector x, t1, td1, t2, td2;
  DropoutMask mask1, mask2;
  double logit = 0.0;
  double score = 0.5;
};

inline double fuse_and_classify(const Vector& P_r, const Vector& G_r,
                                const ParameterStore& store, const ModelConfig& cfg,
                                double dropout, bool train, SplitMix64& rng,
                                FusionTape* tape = nullptr) {
  FusionTape local;
  FusionTape& t = tape ? *tape : local;
  Vector fp = psi_forward(P_r, detail::branch_prefix(cfg, true), store, cfg, &t.psi_p);
  Vector fg = psi_forward(G_r, detail::branch_prefix(cfg, false), store, cfg, &t.psi_g);
  t.x = concat(fp, fg);
  t.t1 = tanh_vec(affine(store.at("head.W1"), t.x, detail::bias_vec(store, "head.b1")));
  t.td1 = apply_dropout(t.t1, dropout, train, rng, t.mask1);
  t.t2 = tanh_vec(affine(store.at("head.W2"), t.td1, detail::bias_vec(store, "head.b2")));
  t.td2 = apply_dropout(t.t2, dropout, train, rng, t.mask2);
  const Vector z = affine(store.at("head.W3"), t.td2, detail::bias_vec(store, "head.b3"));
  t.logit = z[0];
  t.score = sigmoid(t.logit);
  return t.score;
}

/// Backward from d(loss)/d(logit); returns the gradients of the two branch
/// inputs (pattern first).
inline std::pair<Vector, Vector> fusion_backward(const FusionTape& tape,
                                                 double dlogit,
                                                 const ParameterStore& store,
                                                 const ModelConfig& cfg,
                                                 GradientMap& grads) {
  Vector dz{dlogit};
  add_outer(detail::grad_for(grads, store, "head.W3"), dz, tape.td2);
  detail::add_bias_grad(grads, store, "head.b3", dz);
  Vector dtd2 = matvec_t(store.at("head.W3"), dz);
  Vector dt2 = dropout_backward(dtd2, tape.mask2);
  Vector dpre2 = tanh_backward(tape.t2, dt2);
  add_outer(detail::grad_for(grads, store, "head.W2"), dpre2, tape.td1);
  detail::add_bias_grad(grads, store, "head.b2", dpre2);
  Vector dtd1 = matvec_t(store.at("head.W2"), dpre2);
  Vector dt1 = dropout_backward(dtd1, tape.mask1);
  Vector dpre1 = tanh_backward(tape.t1, dt1);
  add_outer(detail::grad_for(grads, store, "head.W1"), dpre1, tape.x);
  detail::add_bias_grad(grads, store, "head.b1", dpre1);
  Vector dx = matvec_t(store.at("head.W1"), dpre1);

  const size_t half = tape.psi_p.out.size();
  Vector dfp(dx.begin(), dx.begin() + static_cast<long>(half));
  Vector dfg(dx.begin() + static_cast<long>(half), dx.end());
  Vector dP = psi_backward(tape.psi_p, dfp, detail::branch_prefix(cfg, true), store,
                           cfg, grads);
  Vector dG = psi_backward(tape.psi_g, dfg, detail::branch_prefix(cfg, false), store,
                           cfg, grads);
  return {std::move(dP), std::move(dG)};
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

/// Binary cross-entropy with the probability clamped away from 0/1 so the
/// loss stays finite under saturated sigmoids.
inline double bce_loss(double score, int label) {
  const double p = std::min(std::max(score, 1e-12), 1.0 - 1e-12);
  return label ? -std::log(p) : -std::log(1.0 - p);
}

/// Training objective: cross-entropy plus (l2/2) * sum of squared parameters.
inline double loss(double score, int label, const ParameterStore& store) {
  return bce_loss(score, label) + 0.5 * store.l2 * store.squared_norm();
}

// ---------------------------------------------------------------------------
// Whole-model forward/backward over one sample
// ---------------------------------------------------------------------------

// everything the network needs to score one function
struct GraphInput {
  std::vector<Vector> feats;        // width d rows
  std::vector<TemporalEdge> edges;  // temporal order
};

struct SampleTape {
  PatternTape pattern;
  TmpTape tmp;
  ReadoutTape readout;
  FusionTape fusion;
  bool graph_used = false;
  size_t n_nodes = 0;
};

inline double model_forward(const Vector& pattern_vec, const GraphInput& graph,
                            const ParameterStore& store, const ModelConfig& cfg,
                            Variant variant, double dropout, bool train,
                            SplitMix64& rng, SampleTape* tape = nullptr) {
  Vector P_r(static_cast<size_t>(cfg.d), 0.0);
  if (variant != Variant::WOE)
    P_r = pattern_forward(pattern_vec, store, cfg, dropout, train, rng,
                          tape ? &tape->pattern : nullptr);

  Vector G_r(static_cast<size_t>(cfg.d), 0.0);
  if (variant != Variant::WOG) {
    auto hT = tmp_message_phase(graph.edges, graph.feats, store, cfg,
                                tape ? &tape->tmp : nullptr);
    G_r = tmp_readout(graph.feats, hT, store, cfg, tape ? &tape->readout : nullptr);
    if (tape) {
      tape->graph_used = true;
      tape->n_nodes = graph.feats.size();
    }
  }
  return fuse_and_classify(P_r, G_r, store, cfg, dropout, train, rng,
                           tape ? &tape->fusion : nullptr);
}

inline void model_backward(const SampleTape& tape, double dlogit,
                           const ParameterStore& store, const ModelConfig& cfg,
                           Variant variant, GradientMap& grads) {
  auto [dP, dG] = fusion_backward(tape.fusion, dlogit, store, cfg, grads);
  if (variant != Variant::WOE) pattern_backward(tape.pattern, dP, store, grads);
  if (variant != Variant::WOG && tape.graph_used) {
    std::vector<Vector> dH0(tape.n_nodes, Vector(static_cast<size_t>(cfg.d), 0.0));
    std::vector<Vector> dHT(tape.n_nodes, Vector(static_cast<size_t>(cfg.d), 0.0));
    readout_backward(tape.readout, dG, store, cfg, grads, dH0, dHT);
    tmp_backward(tape.tmp, dHT, store, cfg, grads);
    // dHT now holds d(loss)/d(h0) from the propagation path; dH0 holds the
    // readout's direct use of h0. Features are inputs, so both stop here.
  }
}

}  // namespace cge
