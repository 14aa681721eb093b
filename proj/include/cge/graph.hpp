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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cge/ast.hpp"
#include "cge/jsonout.hpp"
#include "cge/parser.hpp"
#include "cge/patterns.hpp"
#include "cge/taint.hpp"

namespace cge {

enum class NodeRole { Core, Normal, Fallback };
enum class NodeSubRole { Invocation, Variable, FallbackFn };
enum class AccFlag { LimitedACC, NoLimited, NotApplicable };
enum class CallerClass { SelfContract, MsgSender, ExternalAddress, NotApplicable };

inline const char* to_string(NodeRole r) {
  switch (r) {
    case NodeRole::Core: return "Core";
    case NodeRole::Normal: return "Normal";
    case NodeRole::Fallback: return "Fallback";
  }
  return "";
}
inline const char* to_string(NodeSubRole r) {
  switch (r) {
    case NodeSubRole::Invocation: return "Invocation";
    case NodeSubRole::Variable: return "Variable";
    case NodeSubRole::FallbackFn: return "FallbackFn";
  }
  return "";
}
inline const char* to_string(AccFlag f) {
  switch (f) {
    case AccFlag::LimitedACC: return "LimitedACC";
    case AccFlag::NoLimited: return "NoLimited";
    case AccFlag::NotApplicable: return "NotApplicable";
  }
  return "";
}
inline const char* to_string(CallerClass c) {
  switch (c) {
    case CallerClass::SelfContract: return "SelfContract";
    case CallerClass::MsgSender: return "MsgSender";
    case CallerClass::ExternalAddress: return "ExternalAddress";
    case CallerClass::NotApplicable: return "NotApplicable";
  }
  return "";
}

// Table-ordered edge taxonomy; the ordinal doubles as the one-hot index.
enum class EdgeType { AH, RG, IR, IT, IF, GB, GN, WH, FR, FW, AG, AC, FB };

inline constexpr int kEdgeTypeCount = 13;

inline const char* to_string(EdgeType t) {
  static const char* names[] = {"AH", "RG", "IR", "IT", "IF", "GB", "GN",
                                "WH", "FR", "FW", "AG", "AC", "FB"};
  return names[static_cast<int>(t)];
}

enum class EdgeCategory { ControlFlow, DataFlow, Fallback };

inline EdgeCategory category(EdgeType t) {
  switch (t) {
    case EdgeType::AG:
    case EdgeType::AC:
      return EdgeCategory::DataFlow;
    case EdgeType::FB:
      return EdgeCategory::Fallback;
    default:
      return EdgeCategory::ControlFlow;
  }
}

struct GraphNode {
  int id = 0;
  std::string label;  // C1 / N1 / F display labels
  std::string name;   // source-level identity ("Balance", "call.value", ...)
  NodeRole role = NodeRole::Normal;
  NodeSubRole sub_role = NodeSubRole::Variable;
  AccFlag acc_flag = AccFlag::NotApplicable;
  CallerClass caller_class = CallerClass::NotApplicable;
  int source_pos = -1;  // statement index of the first reference
};

struct GraphEdge {
  int start = 0;
  int end = 0;
  int order = 0;  // 1-based temporal number, contiguous across the graph
  EdgeType etype = EdgeType::FW;
};

struct ContractGraph {
  VulnerabilityKind kind = VulnerabilityKind::Reentrancy;
  std::string function_name;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  bool has_core() const {
    for (const auto& n : nodes)
      if (n.role == NodeRole::Core) return true;
    return false;
  }
};

namespace detail {

// Everything needed to build nodes and edges for one (function, kind) pair.
class GraphBuilder {
public:
  GraphBuilder(const FunctionAst& fn, VulnerabilityKind kind)
      : fn_(fn), kind_(kind) {
    graph_.kind = kind;
    graph_.function_name = fn.name;
  }

  ContractGraph build() {
    scan_core_criteria();
    create_nodes();
    emit_edges();
    assign_labels();
    return std::move(graph_);
  }

private:
  const FunctionAst& fn_;
  VulnerabilityKind kind_;
  ContractGraph graph_;

  // site identity for invocation nodes: address of the expression node
  std::map<const Expression*, int> inv_nodes_;
  std::map<std::string, int> var_nodes_;
  std::map<const Statement*, int> loop_nodes_;
  int fn_node_ = -1;
  int fallback_node_ = -1;
  int prev_ = -1;
  const Expression* fallback_trigger_ = nullptr;

  // core criteria membership, filled by scan_core_criteria
  std::set<const Expression*> core_invocations_;
  std::set<std::string> core_vars_;
  bool loops_are_core_ = false;
  bool any_loops_ = false;
  bool fn_is_core_ = false;
  bool money_transfer_ = false;

  // The function's own node exists once the body contains anything the kind
  // cares about; a triggerless function reduces to its plain variable nodes.
  bool has_fn_node() const {
    return money_transfer_ || !core_invocations_.empty() || !core_vars_.empty() ||
           (loops_are_core_ && any_loops_);
  }

  AccFlag fn_acc_flag() const {
    if (!fn_.modifiers.empty() || fn_.visibility == Visibility::Internal ||
        fn_.visibility == Visibility::Private)
      return AccFlag::LimitedACC;
    return AccFlag::NoLimited;
  }

  static bool is_invocation_expr(const Expression& e) {
    switch (e.kind) {
      case ExprKind::Call:
      case ExprKind::CallValue:
      case ExprKind::Transfer:
      case ExprKind::Send:
      case ExprKind::BlockTimestamp:
        return true;
      default:
        return false;
    }
  }

  static bool is_money_transfer(const Expression& e) {
    return e.kind == ExprKind::CallValue || e.kind == ExprKind::Transfer ||
           e.kind == ExprKind::Send;
  }

  static bool is_var_read(const Expression& e) {
    return e.kind == ExprKind::Identifier &&
           (e.ident_class == IdentClass::Param ||
            e.ident_class == IdentClass::Local ||
            e.ident_class == IdentClass::State);
  }

  void scan_core_criteria() {
    std::vector<const Expression*> money_sites;
    walk_stmts(fn_.body, [&](const Statement& s) {
      for (const auto& e : s.exprs)
        walk_expr(e, [&](const Expression& sub) {
          if (is_money_transfer(sub)) money_sites.push_back(&sub);
        });
    });
    money_transfer_ = !money_sites.empty();
    if (money_transfer_) {
      // the first call.value, or the first transfer/send when none exists
      for (const auto* e : money_sites)
        if (e->kind == ExprKind::CallValue) {
          fallback_trigger_ = e;
          break;
        }
      if (!fallback_trigger_) fallback_trigger_ = money_sites.front();
    }

    const auto writes = collect_writes(fn_.body);
    switch (kind_) {
      case VulnerabilityKind::Reentrancy: {
        for (const auto* e : money_sites) core_invocations_.insert(e);
        const auto balance_vars = find_balance_vars(fn_);
        for (const auto& v : balance_vars) core_vars_.insert(v);
        // variables feeding a plain assignment into a user balance
        for (const auto& w : writes) {
          if (w.op != "=" || !w.value) continue;
          if (std::find(balance_vars.begin(), balance_vars.end(), w.target) ==
              balance_vars.end())
            continue;
          walk_expr(*w.value, [&](const Expression& sub) {
            if (is_var_read(sub) && sub.text != w.target)
              core_vars_.insert(sub.text);
          });
        }
        fn_is_core_ = money_transfer_;  // the re-entered function is critical
        break;
      }
      case VulnerabilityKind::TimestampDependence: {
        walk_stmts(fn_.body, [&](const Statement& s) {
          for (const auto& e : s.exprs)
            walk_expr(e, [&](const Expression& sub) {
              if (sub.kind == ExprKind::BlockTimestamp)
                core_invocations_.insert(&sub);
              // invocations fed by block.timestamp (random-seed style)
              if ((sub.kind == ExprKind::Call || sub.kind == ExprKind::CallValue) &&
                  sub.operands.size() > 1) {
                for (size_t i = 1; i < sub.operands.size(); ++i) {
                  bool has_ts = false;
                  walk_expr(sub.operands[i], [&](const Expression& a) {
                    has_ts = has_ts || a.kind == ExprKind::BlockTimestamp;
                  });
                  if (has_ts) core_invocations_.insert(&sub);
                }
              }
            });
        });
        for (const auto& w : writes)
          if (w.value) {
            bool has_ts = false;
            walk_expr(*w.value, [&](const Expression& a) {
              has_ts = has_ts || a.kind == ExprKind::BlockTimestamp;
            });
            if (has_ts) core_vars_.insert(w.target);
          }
        break;
      }
      case VulnerabilityKind::InfiniteLoop: {
        loops_are_core_ = true;
        walk_stmts(fn_.body, [&](const Statement& s) {
          if (s.kind == StmtKind::For || s.kind == StmtKind::While) {
            any_loops_ = true;
            walk_expr(s.exprs[0], [&](const Expression& sub) {
              if (is_var_read(sub)) core_vars_.insert(sub.text);
            });
          }
          if (s.kind == StmtKind::SelfInvocationCall)
            core_invocations_.insert(&s.exprs[0]);
        });
        break;
      }
    }
  }

  int add_node(std::string name, NodeRole role, NodeSubRole sub_role,
               int source_pos) {
    GraphNode n;
    n.id = static_cast<int>(graph_.nodes.size());
    n.name = std::move(name);
    n.role = role;
    n.sub_role = sub_role;
    n.source_pos = source_pos;
    if (sub_role == NodeSubRole::Invocation) {
      n.acc_flag = fn_acc_flag();
      n.caller_class = CallerClass::SelfContract;
    }
    graph_.nodes.push_back(std::move(n));
    return graph_.nodes.back().id;
  }

  std::string invocation_name(const Expression& e) const {
    switch (e.kind) {
      case ExprKind::CallValue: return "call.value";
      case ExprKind::Transfer: return "transfer";
      case ExprKind::Send: return "send";
      case ExprKind::BlockTimestamp: return "block.timestamp";
      case ExprKind::Call: {
        if (auto root = root_identifier(e.operands[0])) return *root;
        return "call";
      }
      default:
        return "?";
    }
  }

  void create_invocation_node(const Expression& e, int stmt_index) {
    if (inv_nodes_.count(&e)) return;
    const bool core = core_invocations_.count(&e) > 0;
    inv_nodes_[&e] = add_node(invocation_name(e),
                              core ? NodeRole::Core : NodeRole::Normal,
                              NodeSubRole::Invocation, stmt_index);
  }

  void create_var_node(const Expression& e, int stmt_index) {
    if (!is_var_read(e) || var_nodes_.count(e.text)) return;
    const bool core = core_vars_.count(e.text) > 0;
    var_nodes_[e.text] = add_node(e.text, core ? NodeRole::Core : NodeRole::Normal,
                                  NodeSubRole::Variable, stmt_index);
  }

  void create_nodes_for_expr(const Expression& e, int stmt_index) {
    walk_expr(e, [&](const Expression& sub) {
      if (is_invocation_expr(sub)) create_invocation_node(sub, stmt_index);
      create_var_node(sub, stmt_index);
    });
  }

  void create_nodes_in(const std::vector<Statement>& body) {
    for (const auto& s : body) {
      if (loops_are_core_ &&
          (s.kind == StmtKind::For || s.kind == StmtKind::While)) {
        loop_nodes_[&s] = add_node(s.kind == StmtKind::For ? "for" : "while",
                                   NodeRole::Core, NodeSubRole::Invocation,
                                   s.index);
      }
      for (const auto& e : s.exprs) create_nodes_for_expr(e, s.index);
      create_nodes_in(s.init);
      create_nodes_in(s.update);
      create_nodes_in(s.children);
      create_nodes_in(s.else_children);
    }
  }

  void create_nodes() {
    // The function's own node comes first. It is a core node for reentrancy
    // when the body transfers money (the fallback re-enters through it), and
    // a normal node otherwise.
    if (has_fn_node()) {
      GraphNode n;
      n.id = 0;
      n.name = fn_.name.empty() ? "fallback" : fn_.name;
      n.role = fn_is_core_ ? NodeRole::Core : NodeRole::Normal;
      n.sub_role = NodeSubRole::Invocation;
      n.acc_flag = fn_acc_flag();
      n.caller_class = CallerClass::MsgSender;
      n.source_pos = -1;
      graph_.nodes.push_back(std::move(n));
      fn_node_ = 0;
    }
    create_nodes_in(fn_.body);
    if (money_transfer_ && fn_node_ >= 0) {
      const int id = static_cast<int>(graph_.nodes.size());
      GraphNode n;
      n.id = id;
      n.name = "fallback";
      n.role = NodeRole::Fallback;
      n.sub_role = NodeSubRole::FallbackFn;
      n.source_pos = -1;
      graph_.nodes.push_back(std::move(n));
      fallback_node_ = id;
    }
  }

  // --- edge emission ---

  void emit(EdgeType t, int from, int to) {
    if (from < 0 || to < 0) return;
    GraphEdge e;
    e.start = from;
    e.end = to;
    e.etype = t;
    e.order = static_cast<int>(graph_.edges.size()) + 1;
    graph_.edges.push_back(e);
  }

  int node_of_expr(const Expression& e) const {
    // first invocation or variable node in pre-order
    int found = -1;
    walk_expr(e, [&](const Expression& sub) {
      if (found >= 0) return;
      if (auto it = inv_nodes_.find(&sub); it != inv_nodes_.end())
        found = it->second;
      else if (sub.kind == ExprKind::Identifier) {
        if (auto vt = var_nodes_.find(sub.text); vt != var_nodes_.end())
          found = vt->second;
      }
    });
    return found;
  }

  int written_node(const Statement& s) const {
    auto root = root_identifier(s.exprs[0]);
    if (!root || !var_nodes_.count(*root)) {
      throw GraphBuildError("assignment target '" +
                            (root ? *root : to_canonical(s.exprs[0])) +
                            "' has no graph node (unresolved identifier)");
    }
    return var_nodes_.at(*root);
  }

  // Collects the directly-read entities of an expression in pre-order:
  // variable nodes and invocation nodes, without descending below an
  // invocation (its own arguments are its reads, not the caller's).
  void direct_reads(const Expression& e, std::vector<int>& out) const {
    if (auto it = inv_nodes_.find(&e); it != inv_nodes_.end()) {
      out.push_back(it->second);
      return;
    }
    if (is_var_read(e)) {
      if (auto vt = var_nodes_.find(e.text); vt != var_nodes_.end())
        out.push_back(vt->second);
      return;
    }
    for (const auto& op : e.operands) direct_reads(op, out);
  }

  // AC edges from each call site to the entities its receiver and arguments
  // read directly.
  void emit_argument_accesses(const Statement& s) {
    for (const auto& top : s.exprs)
      walk_expr(top, [&](const Expression& sub) {
        if (!is_invocation_expr(sub) || sub.kind == ExprKind::BlockTimestamp)
          return;
        const int inv = inv_nodes_.at(&sub);
        std::vector<int> reads;
        for (const auto& operand : sub.operands) direct_reads(operand, reads);
        for (int r : reads) emit(EdgeType::AC, inv, r);
      });
  }

  void emit_assignment_dataflow(const Statement& s, int cur) {
    const Expression& rhs = s.exprs.back();
    auto lhs_root = root_identifier(s.exprs[0]);

    // access edge: the written variable is read by the same statement
    bool reads_self = s.kind == StmtKind::CompoundAssignment;
    if (!reads_self && lhs_root)
      walk_expr(rhs, [&](const Expression& sub) {
        if (sub.kind == ExprKind::Identifier && sub.text == *lhs_root)
          reads_self = true;
      });
    if (reads_self) emit(EdgeType::AC, cur, cur);

    if (s.exprs.size() < 2) return;
    // assign edges fan out from the written node to each distinct source
    std::vector<int> reads;
    direct_reads(rhs, reads);
    std::set<int> emitted;
    for (int target : reads) {
      if (target == cur || emitted.count(target)) continue;
      emitted.insert(target);
      emit(EdgeType::AG, cur, target);
    }
  }

  void emit_fallback_edges(const Statement& s) {
    if (fallback_node_ < 0 || !fallback_trigger_) return;
    bool trigger_here = false;
    for (const auto& e : s.exprs)
      walk_expr(e, [&](const Expression& sub) {
        if (&sub == fallback_trigger_) trigger_here = true;
      });
    if (!trigger_here) return;
    emit(EdgeType::FB, inv_nodes_.at(fallback_trigger_), fallback_node_);
    emit(EdgeType::FB, fallback_node_, fn_node_);
    fallback_trigger_ = nullptr;  // the pair is built around the first one only
  }

  static bool all_of_kind(const std::vector<Statement>& body, StmtKind kind) {
    if (body.empty()) return false;
    for (const auto& s : body)
      if (s.kind != kind) return false;
    return true;
  }

  std::optional<EdgeType> guard_edge_type(const Statement& s) const {
    switch (s.kind) {
      case StmtKind::Assert: return EdgeType::AH;
      case StmtKind::Require: return EdgeType::RG;
      case StmtKind::While: return EdgeType::WH;
      case StmtKind::For: return EdgeType::FR;
      case StmtKind::If:
        if (all_of_kind(s.children, StmtKind::Revert)) return EdgeType::IR;
        if (all_of_kind(s.children, StmtKind::Throw)) return EdgeType::IT;
        return EdgeType::IF;
      case StmtKind::IfElse: return EdgeType::IF;
      default: return std::nullopt;
    }
  }

  // Statement-sequence edges use FW unless a branch entry set a pending type.
  EdgeType pending_ = EdgeType::FW;

  void process_statements(const std::vector<Statement>& body) {
    for (const auto& s : body) process_statement(s);
  }

  void process_statement(const Statement& s) {
    const auto guard = guard_edge_type(s);

    int cur = -1;
    if (s.kind == StmtKind::Declaration || s.kind == StmtKind::Assignment ||
        s.kind == StmtKind::CompoundAssignment) {
      if (s.kind == StmtKind::Declaration)
        cur = var_nodes_.count(s.exprs[0].text) ? var_nodes_.at(s.exprs[0].text)
                                                : -1;
      else
        cur = written_node(s);
    } else if (guard && loops_are_core_ &&
               (s.kind == StmtKind::For || s.kind == StmtKind::While)) {
      cur = loop_nodes_.at(&s);
    } else if (!s.exprs.empty()) {
      cur = node_of_expr(s.exprs[0]);
    }

    if (s.kind == StmtKind::For) {
      process_statements(s.init);
    }

    if (cur >= 0) {
      if (guard) {
        emit(*guard, prev_, cur);
      } else {
        emit(pending_, prev_, cur);
      }
      pending_ = EdgeType::FW;
      prev_ = cur;
    }

    emit_argument_accesses(s);
    if (s.kind == StmtKind::Assignment || s.kind == StmtKind::CompoundAssignment ||
        (s.kind == StmtKind::Declaration && s.exprs.size() > 1)) {
      if (cur >= 0) emit_assignment_dataflow(s, cur);
    }
    if (s.kind == StmtKind::ExpressionStmt && !s.exprs.empty()) {
      // increment/decrement reads and writes its own operand
      const Expression& e = s.exprs[0];
      if (e.kind == ExprKind::UnaryOp && (e.text == "++" || e.text == "--") &&
          cur >= 0)
        emit(EdgeType::AC, cur, cur);
    }
    emit_fallback_edges(s);

    // branches
    if (s.kind == StmtKind::If || s.kind == StmtKind::IfElse) {
      const bool compressed = guard == EdgeType::IR || guard == EdgeType::IT;
      if (!compressed) {
        const int cond_node = cur;
        if (cond_node >= 0) prev_ = cond_node;
        pending_ = EdgeType::GN;
        process_statements(s.children);
        pending_ = EdgeType::FW;
        if (s.kind == StmtKind::IfElse) {
          if (cond_node >= 0) prev_ = cond_node;
          pending_ = EdgeType::GB;
          process_statements(s.else_children);
          pending_ = EdgeType::FW;
        }
      }
    } else if (s.kind == StmtKind::While || s.kind == StmtKind::For) {
      process_statements(s.children);
      if (s.kind == StmtKind::For) process_statements(s.update);
    }
  }

  void emit_edges() {
    prev_ = fn_node_;
    pending_ = EdgeType::FW;
    process_statements(fn_.body);
  }

  void assign_labels() {
    int c = 0, n = 0;
    for (auto& node : graph_.nodes) {
      switch (node.role) {
        case NodeRole::Core: node.label = "C" + std::to_string(++c); break;
        case NodeRole::Normal: node.label = "N" + std::to_string(++n); break;
        case NodeRole::Fallback: node.label = "F"; break;
      }
    }
  }
};

}  // namespace detail

/// Role-classifies all program elements of the function for the given
/// vulnerability and returns the graph's node set.
inline std::vector<GraphNode> assign_roles(const FunctionAst& fn,
                                           VulnerabilityKind kind) {
  return detail::GraphBuilder(fn, kind).build().nodes;
}

/// Builds the full contract graph: role-classified nodes plus temporally
/// ordered control-flow, data-flow and fallback edges.
inline ContractGraph build_graph(const FunctionAst& fn, VulnerabilityKind kind) {
  return detail::GraphBuilder(fn, kind).build();
}

// ---------------------------------------------------------------------------
// Numeric encodings
// ---------------------------------------------------------------------------

struct NodeFeatureOptions {
  int buckets = 8;           // hash buckets for the identifier block
  uint64_t bucket_seed = 0x9e3779b97f4a7c15ull;
};

inline int node_feature_min_width(const NodeFeatureOptions& opt = {}) {
  return opt.buckets + 13;  // buckets + acc(3) + caller(4) + role(3) + sub_role(3)
}

namespace detail {

inline uint64_t fnv1a64(std::string_view s, uint64_t seed) {
  uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Encodes every node as [id-bucket one-hot | acc one-hot | caller one-hot |
/// role one-hot | sub-role one-hot], zero-padded to `dim` columns.
inline std::vector<std::vector<double>> encode_node_features(
    const ContractGraph& graph, int dim, const NodeFeatureOptions& opt = {}) {
  const int min_width = node_feature_min_width(opt);
  if (dim < min_width)
    throw DimensionError("feature dim " + std::to_string(dim) +
                         " below minimum encodable width " +
                         std::to_string(min_width));
  std::vector<std::vector<double>> rows;
  rows.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) {
    std::vector<double> row(static_cast<size_t>(dim), 0.0);
    int off = 0;
    const auto bucket = static_cast<int>(detail::fnv1a64(n.name, opt.bucket_seed) %
                                         static_cast<uint64_t>(opt.buckets));
    row[static_cast<size_t>(off + bucket)] = 1.0;
    off += opt.buckets;
    row[static_cast<size_t>(off + static_cast<int>(n.acc_flag))] = 1.0;
    off += 3;
    row[static_cast<size_t>(off + static_cast<int>(n.caller_class))] = 1.0;
    off += 4;
    row[static_cast<size_t>(off + static_cast<int>(n.role))] = 1.0;
    off += 3;
    row[static_cast<size_t>(off + static_cast<int>(n.sub_role))] = 1.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// One-hot over the Table-ordered edge taxonomy.
inline std::vector<double> encode_edge_type(EdgeType etype) {
  std::vector<double> v(kEdgeTypeCount, 0.0);
  v[static_cast<size_t>(static_cast<int>(etype))] = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Dump format
// ---------------------------------------------------------------------------

inline void write_graph_json(JsonWriter& w, const ContractGraph& g) {
  w.begin_object();
  w.key("kind").value(to_string(g.kind));
  w.key("function").value(g.function_name);
  w.key("nodes").begin_array();
  for (const auto& n : g.nodes) {
    w.begin_object();
    w.key("id").value(n.id);
    w.key("label").value(n.label);
    w.key("role").value(to_string(n.role));
    w.key("sub_role").value(to_string(n.sub_role));
    w.key("acc_flag").value(to_string(n.acc_flag));
    w.key("caller_class").value(to_string(n.caller_class));
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
  w.end_object();
}

inline std::string to_json(const ContractGraph& g) {
  JsonWriter w;
  write_graph_json(w, g);
  return w.str();
}

}  // namespace cge
