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

#include <deque>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "cge/graph.hpp"
#include "cge/matrix.hpp"

namespace cge {

// Per-core-node feature after node elimination: the node's own feature plus
// the features of eliminated neighbours, kept apart by direction and by
// whether the eliminated node modelled a variable or an invocation.
struct AggregatedFeature {
  Vector self_part;
  Vector in_var;
  Vector in_inv;
  Vector out_var;
  Vector out_inv;

  Vector flatten() const {
    Vector out;
    out.reserve(self_part.size() * 5);
    for (const Vector* part : {&self_part, &in_var, &in_inv, &out_var, &out_inv})
      out.insert(out.end(), part->begin(), part->end());
    return out;
  }
};

struct NormalizedNode {
  GraphNode node;  // role == Core, id keeps the original graph id
  AggregatedFeature feature;
};

struct NormalizedGraph {
  VulnerabilityKind kind = VulnerabilityKind::Reentrancy;
  std::string function_name;
  std::vector<NormalizedNode> nodes;              // ascending original id
  std::vector<GraphEdge> edges;                   // endpoints rerouted to core ids
  std::map<int, std::set<int>> merge_log;         // removed id -> receiver ids

  int index_of(int node_id) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].node.id == node_id) return static_cast<int>(i);
    return -1;
  }

  /// Dense feature matrix for the propagation network: one row per core node
  /// (ascending id), each row the flattened five-part aggregate.
  std::vector<Vector> feature_matrix() const {
    std::vector<Vector> rows;
    rows.reserve(nodes.size());
    for (const auto& n : nodes) rows.push_back(n.feature.flatten());
    return rows;
  }
};

/// Core nodes at minimal undirected hop distance from `node_id`, ties
/// included. Nodes disconnected from every core adopt the lowest-id core so
/// elimination stays total.
inline std::set<int> nearest_core_nodes(const ContractGraph& graph, int node_id) {
  std::vector<int> cores;
  for (const auto& n : graph.nodes)
    if (n.role == NodeRole::Core) cores.push_back(n.id);
  if (cores.empty()) throw NoCoreNode();

  std::vector<std::vector<int>> adj(graph.nodes.size());
  for (const auto& e : graph.edges) {
    adj[static_cast<size_t>(e.start)].push_back(e.end);
    adj[static_cast<size_t>(e.end)].push_back(e.start);
  }

  std::vector<int> dist(graph.nodes.size(), -1);
  std::deque<int> queue{node_id};
  dist[static_cast<size_t>(node_id)] = 0;
  int best = std::numeric_limits<int>::max();
  std::set<int> result;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    const int du = dist[static_cast<size_t>(u)];
    if (du > best) break;
    if (graph.nodes[static_cast<size_t>(u)].role == NodeRole::Core && u != node_id) {
      best = du;
      result.insert(u);
      continue;
    }
    for (int v : adj[static_cast<size_t>(u)]) {
      if (dist[static_cast<size_t>(v)] < 0) {
        dist[static_cast<size_t>(v)] = du + 1;
        queue.push_back(v);
      }
    }
  }
  if (result.empty()) result.insert(*std::min_element(cores.begin(), cores.end()));
  return result;
}

/// Node elimination: removes Normal and Fallback nodes, reroutes their edges
/// to the lowest-id nearest core node, and adds their features into the
/// receiving cores' directional aggregates (variable and invocation features
/// summed separately). Feature rows must align with graph.nodes.
inline NormalizedGraph normalize_graph(const ContractGraph& graph,
                                       const std::vector<Vector>& features) {
  if (features.size() != graph.nodes.size())
    throw ShapeError("normalize_graph: feature rows != node count");

  std::vector<int> cores;
  for (const auto& n : graph.nodes)
    if (n.role == NodeRole::Core) cores.push_back(n.id);
  if (cores.empty()) throw NoCoreNode();

  const size_t dim = features.empty() ? 0 : features[0].size();

  NormalizedGraph out;
  out.kind = graph.kind;
  out.function_name = graph.function_name;

  // receivers for every removed node
  std::map<int, std::set<int>> receivers;
  std::map<int, int> route;  // any id -> core id carrying its edges
  for (const auto& n : graph.nodes) {
    if (n.role == NodeRole::Core) {
      route[n.id] = n.id;
    } else {
      auto nearest = nearest_core_nodes(graph, n.id);
      route[n.id] = *nearest.begin();
      receivers[n.id] = std::move(nearest);
    }
  }
  out.merge_log = receivers;

  // edges keep their order and type; endpoints move to the routing core
  out.edges.reserve(graph.edges.size());
  for (const auto& e : graph.edges) {
    GraphEdge r = e;
    r.start = route.at(e.start);
    r.end = route.at(e.end);
    out.edges.push_back(r);
  }

  // aggregate features
  std::map<int, AggregatedFeature> agg;
  for (int c : cores) {
    AggregatedFeature f;
    f.self_part = features[static_cast<size_t>(c)];
    f.in_var.assign(dim, 0.0);
    f.in_inv.assign(dim, 0.0);
    f.out_var.assign(dim, 0.0);
    f.out_inv.assign(dim, 0.0);
    agg[c] = std::move(f);
  }

  for (const auto& [removed, recv_set] : receivers) {
    const GraphNode& rnode = graph.nodes[static_cast<size_t>(removed)];
    const bool is_var = rnode.sub_role == NodeSubRole::Variable;
    for (int c : recv_set) {
      // direction of the removed node relative to this receiver, judged on
      // the rerouted edges
      bool points_in = false, points_out = false;
      for (const auto& e : graph.edges) {
        if (e.start == removed && route.at(e.end) == c) points_in = true;
        if (e.end == removed && route.at(e.start) == c) points_out = true;
      }
      if (!points_in && !points_out) points_in = true;  // disconnected adoptee
      auto& target = agg.at(c);
      if (points_in) add_into(is_var ? target.in_var : target.in_inv,
                              features[static_cast<size_t>(removed)]);
      if (points_out) add_into(is_var ? target.out_var : target.out_inv,
                               features[static_cast<size_t>(removed)]);
    }
  }

  for (int c : cores) {
    NormalizedNode n;
    n.node = graph.nodes[static_cast<size_t>(c)];
    n.feature = std::move(agg.at(c));
    out.nodes.push_back(std::move(n));
  }
  return out;
}

/// Convenience overload: encodes node features first.
inline NormalizedGraph normalize_graph(const ContractGraph& graph, int feature_dim,
                                       const NodeFeatureOptions& opt = {}) {
  return normalize_graph(graph, encode_node_features(graph, feature_dim, opt));
}

inline void write_normalized_json(JsonWriter& w, const NormalizedGraph& g) {
  w.begin_object();
  w.key("kind").value(to_string(g.kind));
  w.key("function").value(g.function_name);
  w.key("nodes").begin_array();
  for (const auto& nn : g.nodes) {
    const auto& n = nn.node;
    w.begin_object();
    w.key("id").value(n.id);
    w.key("label").value(n.label);
    w.key("role").value(to_string(n.role));
    w.key("sub_role").value(to_string(n.sub_role));
    w.key("acc_flag").value(to_string(n.acc_flag));
    w.key("caller_class").value(to_string(n.caller_class));
    w.key("aggregate").begin_object();
    w.key("self").reals(nn.feature.self_part);
    w.key("in_var").reals(nn.feature.in_var);
    w.key("in_inv").reals(nn.feature.in_inv);
    w.key("out_var").reals(nn.feature.out_var);
    w.key("out_inv").reals(nn.feature.out_inv);
    w.end_object();
    w.end_object();
  }
  w.end_array();
  w.key("edges").begin_array();
  for (const auto& e : g.edges) {
    w.begin_object();
    w.key("start").value(e.start);
    w.key("end").value(e.end);
    w.key("order").value(e.order);
    w.key("type").value(to_string(e.etype));
    w.end_object();
  }
  w.end_array();
  w.key("merge_log").begin_object();
  for (const auto& [removed, recv] : g.merge_log) {
    w.key(std::to_string(removed)).begin_array();
    for (int c : recv) w.value(c);
    w.end_array();
  }
  w.end_object();
  w.end_object();
}

inline std::string to_json(const NormalizedGraph& g) {
  JsonWriter w;
  write_normalized_json(w, g);
  return w.str();
}

}  // namespace cge
