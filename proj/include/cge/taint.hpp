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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cge/ast.hpp"

namespace cge {

// The variable a write or read ultimately lands on: the root identifier of an
// lvalue chain (Balance[msg.sender] roots at Balance).
inline std::optional<std::string> root_identifier(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Identifier:
      return e.text;
    case ExprKind::IndexAccess:
    case ExprKind::MemberAccess:
      return root_identifier(e.operands[0]);
    default:
      return std::nullopt;
  }
}

// One store into a variable. `value` is null for initializer-less
// declarations; increment/decrement read their own target.
struct WriteEvent {
  std::string target;
  const Expression* value = nullptr;
  const Statement* stmt = nullptr;
  int stmt_index = 0;
  std::string op;  // "=", "-=", "+=", "++", "--", ...
};

namespace detail {

inline void collect_writes_into(const std::vector<Statement>& body,
                                std::vector<WriteEvent>& out) {
  for (const auto& s : body) {
    switch (s.kind) {
      case StmtKind::Declaration:
        out.push_back({s.exprs[0].text,
                       s.exprs.size() > 1 ? &s.exprs[1] : nullptr, &s, s.index,
                       "="});
        break;
      case StmtKind::Assignment:
      case StmtKind::CompoundAssignment:
        if (auto root = root_identifier(s.exprs[0]))
          out.push_back({*root, &s.exprs[1], &s, s.index, s.op});
        break;
      case StmtKind::ExpressionStmt: {
        const Expression& e = s.exprs[0];
        if (e.kind == ExprKind::UnaryOp && (e.text == "++" || e.text == "--"))
          if (auto root = root_identifier(e.operands[0]))
            out.push_back({*root, &e.operands[0], &s, s.index, e.text});
        break;
      }
      default:
        break;
    }
    collect_writes_into(s.init, out);
    collect_writes_into(s.update, out);
    collect_writes_into(s.children, out);
    collect_writes_into(s.else_children, out);
  }
}

}  // namespace detail

inline std::vector<WriteEvent> collect_writes(const std::vector<Statement>& body) {
  std::vector<WriteEvent> out;
  detail::collect_writes_into(body, out);
  return out;
}

struct TaintState {
  std::set<std::string> tainted;
  std::vector<Expression> sources;

  bool is_tainted(const std::string& name) const { return tainted.count(name) > 0; }
};

namespace detail {

inline bool expr_matches_seed(const Expression& e,
                              const std::vector<Expression>& seeds) {
  for (const auto& s : seeds)
    if (e == s) return true;
  return false;
}

inline bool expr_tainted(const Expression& e, const TaintState& state) {
  if (expr_matches_seed(e, state.sources)) return true;
  if (e.kind == ExprKind::Identifier && state.is_tainted(e.text)) return true;
  for (const auto& op : e.operands)
    if (expr_tainted(op, state)) return true;
  return false;
}

}  // namespace detail

/// Flow- and path-insensitive may-taint closure: a variable becomes tainted
/// when any store writes it from an expression that references a seed or an
/// already-tainted variable. Identifier seeds taint their variable directly.
inline TaintState taint_propagate(const FunctionAst& fn,
                                  const std::vector<Expression>& seeds) {
  TaintState state;
  state.sources = seeds;
  for (const auto& seed : seeds)
    if (seed.kind == ExprKind::Identifier) state.tainted.insert(seed.text);

  const auto writes = collect_writes(fn.body);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& w : writes) {
      if (!w.value || state.is_tainted(w.target)) continue;
      if (detail::expr_tainted(*w.value, state)) {
        state.tainted.insert(w.target);
        changed = true;
      }
    }
  }
  return state;
}

/// True when the expression references a seed or a tainted variable under the
/// given state; used to test guard conditions after propagation.
inline bool expression_tainted(const Expression& e, const TaintState& state) {
  return detail::expr_tainted(e, state);
}

}  // namespace cge
