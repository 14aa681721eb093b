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
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cge/ast.hpp"
#include "cge/taint.hpp"

namespace cge {

enum class VulnerabilityKind { Reentrancy, TimestampDependence, InfiniteLoop };

inline const char* to_string(VulnerabilityKind k) {
  switch (k) {
    case VulnerabilityKind::Reentrancy: return "reentrancy";
    case VulnerabilityKind::TimestampDependence: return "timestamp";
    case VulnerabilityKind::InfiniteLoop: return "infinite-loop";
  }
  return "";
}

enum class SubPatternId {
  CallValueInvocation = 0,
  BalanceDeduction = 1,
  EnoughBalance = 2,
  TimestampInvocation = 3,
  TimestampAssign = 4,
  TimestampContamination = 5,
  LoopStatement = 6,
  LoopCondition = 7,
  SelfInvocation = 8,
};

inline constexpr int kSubPatternCount = 9;

inline const char* to_string(SubPatternId id) {
  switch (id) {
    case SubPatternId::CallValueInvocation: return "callValueInvocation";
    case SubPatternId::BalanceDeduction: return "balanceDeduction";
    case SubPatternId::EnoughBalance: return "enoughBalance";
    case SubPatternId::TimestampInvocation: return "timestampInvocation";
    case SubPatternId::TimestampAssign: return "timestampAssign";
    case SubPatternId::TimestampContamination: return "timestampContamination";
    case SubPatternId::LoopStatement: return "loopStatement";
    case SubPatternId::LoopCondition: return "loopCondition";
    case SubPatternId::SelfInvocation: return "selfInvocation";
  }
  return "";
}

inline std::array<SubPatternId, 3> sub_patterns_of(VulnerabilityKind kind) {
  switch (kind) {
    case VulnerabilityKind::Reentrancy:
      return {SubPatternId::CallValueInvocation, SubPatternId::BalanceDeduction,
              SubPatternId::EnoughBalance};
    case VulnerabilityKind::TimestampDependence:
      return {SubPatternId::TimestampInvocation, SubPatternId::TimestampAssign,
              SubPatternId::TimestampContamination};
    case VulnerabilityKind::InfiniteLoop:
      return {SubPatternId::LoopStatement, SubPatternId::LoopCondition,
              SubPatternId::SelfInvocation};
  }
  return {};
}

struct PatternReport {
  VulnerabilityKind kind = VulnerabilityKind::Reentrancy;
  std::map<SubPatternId, bool> flags;
  std::map<SubPatternId, std::vector<SourcePos>> evidence;
  // transfer/send sightings, kept for explanations; they do not raise
  // callValueInvocation
  std::vector<SourcePos> money_transfer_notes;

  bool flag(SubPatternId id) const {
    auto it = flags.find(id);
    return it != flags.end() && it->second;
  }
};

// Pattern input encoding: per sub-pattern of the kind, a 9-wide one-hot at the
// sub-pattern ordinal followed by a 0/1 presence digit.
struct PatternInputVector {
  std::array<double, 30> values{};
};

inline PatternInputVector encode_patterns(const PatternReport& report) {
  PatternInputVector vec;
  auto ids = sub_patterns_of(report.kind);
  for (size_t block = 0; block < ids.size(); ++block) {
    const size_t base = block * 10;
    vec.values[base + static_cast<size_t>(ids[block])] = 1.0;
    vec.values[base + 9] = report.flag(ids[block]) ? 1.0 : 0.0;
  }
  return vec;
}

// ---------------------------------------------------------------------------
// Occurrence scanning helpers
// ---------------------------------------------------------------------------

struct ExprSite {
  const Expression* expr = nullptr;
  const Statement* stmt = nullptr;
  int stmt_index = 0;
};

namespace detail {

template <typename Pred>
inline void scan_exprs(const std::vector<Statement>& body, Pred&& pred,
                       std::vector<ExprSite>& out) {
  for (const auto& s : body) {
    for (const auto& e : s.exprs)
      walk_expr(e, [&](const Expression& sub) {
        if (pred(sub)) out.push_back({&sub, &s, s.index});
      });
    scan_exprs(s.init, pred, out);
    scan_exprs(s.update, pred, out);
    scan_exprs(s.children, pred, out);
    scan_exprs(s.else_children, pred, out);
  }
}

template <typename Pred>
inline std::vector<ExprSite> find_exprs(const FunctionAst& fn, Pred&& pred) {
  std::vector<ExprSite> out;
  scan_exprs(fn.body, pred, out);
  return out;
}

inline bool contains_kind(const Expression& e, ExprKind kind) {
  if (e.kind == kind) return true;
  for (const auto& op : e.operands)
    if (contains_kind(op, kind)) return true;
  return false;
}

inline bool references_var(const Expression& e, const std::string& name) {
  if (e.kind == ExprKind::Identifier && e.text == name) return true;
  for (const auto& op : e.operands)
    if (references_var(op, name)) return true;
  return false;
}

inline void collect_identifiers(const Expression& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Identifier) out.insert(e.text);
  for (const auto& op : e.operands) collect_identifiers(op, out);
}

inline bool is_comparison(const Expression& e) {
  if (e.kind != ExprKind::BinaryOp) return false;
  return e.text == "<" || e.text == ">" || e.text == "<=" || e.text == ">=" ||
         e.text == "==" || e.text == "!=";
}

template <typename Pred>
inline void for_each_comparison(const Expression& e, Pred&& pred) {
  if (is_comparison(e)) pred(e);
  for (const auto& op : e.operands) for_each_comparison(op, pred);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// User-balance identification
// ---------------------------------------------------------------------------

// A user balance is a numeric address-keyed state mapping that the function
// indexes with msg.sender or an address parameter, and either updates
// arithmetically (compound update, assignment involving itself, a zero reset)
// or compares inside a guard condition.
inline std::vector<std::string> find_balance_vars(const FunctionAst& fn) {
  std::vector<std::string> result;
  const auto writes = collect_writes(fn.body);

  std::set<std::string> address_params;
  for (const auto& p : fn.params)
    if (p.type == "address") address_params.insert(p.name);

  for (const auto& sv : fn.state_vars) {
    if (!sv.is_mapping || sv.key_type != "address") continue;
    if (!sv.value_type.starts_with("uint") && !sv.value_type.starts_with("int"))
      continue;

    auto accesses = detail::find_exprs(fn, [&](const Expression& e) {
      if (e.kind != ExprKind::IndexAccess) return false;
      auto root = root_identifier(e.operands[0]);
      if (!root || *root != sv.name) return false;
      const Expression& key = e.operands[1];
      return key.kind == ExprKind::MsgSender ||
             (key.kind == ExprKind::Identifier && address_params.count(key.text));
    });
    if (accesses.empty()) continue;

    bool updated = false;
    for (const auto& w : writes) {
      if (w.target != sv.name || !w.value) continue;
      if (w.op != "=") {
        updated = true;  // compound arithmetic update
        break;
      }
      if (w.value->kind == ExprKind::Literal && w.value->text == "0") {
        updated = true;
        break;
      }
      if (detail::references_var(*w.value, sv.name)) {
        updated = true;
        break;
      }
    }

    bool compared = false;
    walk_stmts(fn.body, [&](const Statement& s) {
      if (s.kind != StmtKind::Require && s.kind != StmtKind::Assert &&
          s.kind != StmtKind::If && s.kind != StmtKind::IfElse &&
          s.kind != StmtKind::While && s.kind != StmtKind::For)
        return;
      if (s.exprs.empty()) return;
      detail::for_each_comparison(s.exprs[0], [&](const Expression& cmp) {
        compared = compared || detail::references_var(cmp, sv.name);
      });
    });

    if (updated || compared) result.push_back(sv.name);
  }
  return result;
}

// A deduction is a write that lowers or resets the balance.
inline bool is_deduction(const WriteEvent& w, const std::string& var) {
  if (w.target != var || !w.value) return false;
  if (w.op == "-=") return true;
  if (w.op == "=") {
    if (w.value->kind == ExprKind::Literal && w.value->text == "0") return true;
    if (w.value->kind == ExprKind::BinaryOp && w.value->text == "-" &&
        detail::references_var(w.value->operands[0], var))
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Extractors
// ---------------------------------------------------------------------------

inline PatternReport extract_reentrancy(const FunctionAst& fn) {
  PatternReport report;
  report.kind = VulnerabilityKind::Reentrancy;

  auto call_values = detail::find_exprs(
      fn, [](const Expression& e) { return e.kind == ExprKind::CallValue; });
  auto transfers = detail::find_exprs(fn, [](const Expression& e) {
    return e.kind == ExprKind::Transfer || e.kind == ExprKind::Send;
  });
  for (const auto& site : transfers)
    report.money_transfer_notes.push_back(site.expr->pos);

  const bool has_call_value = !call_values.empty();
  report.flags[SubPatternId::CallValueInvocation] = has_call_value;
  for (const auto& site : call_values)
    report.evidence[SubPatternId::CallValueInvocation].push_back(site.expr->pos);

  // balanceDeduction / enoughBalance are conditions relative to a transfer;
  // without one they are forced false.
  bool deduction_after = false;
  bool balance_checked = false;
  if (has_call_value) {
    const int first_cv = call_values.front().stmt_index;
    const Expression& amount = call_values.front().expr->operands[1];
    std::set<std::string> amount_vars;
    detail::collect_identifiers(amount, amount_vars);

    const auto writes = collect_writes(fn.body);
    for (const auto& var : find_balance_vars(fn)) {
      std::vector<const WriteEvent*> deductions;
      for (const auto& w : writes)
        if (is_deduction(w, var)) deductions.push_back(&w);
      if (!deductions.empty() &&
          std::all_of(deductions.begin(), deductions.end(),
                      [&](const WriteEvent* w) { return w->stmt_index > first_cv; })) {
        deduction_after = true;
        for (const auto* w : deductions)
          report.evidence[SubPatternId::BalanceDeduction].push_back(w->stmt->pos);
      }

      // a guard comparing the balance against the transfer amount before the
      // call
      walk_stmts(fn.body, [&](const Statement& s) {
        if (s.index >= first_cv) return;
        if (s.kind != StmtKind::Require && s.kind != StmtKind::Assert &&
            s.kind != StmtKind::If && s.kind != StmtKind::IfElse)
          return;
        detail::for_each_comparison(s.exprs[0], [&](const Expression& cmp) {
          const bool lhs_bal = detail::references_var(cmp.operands[0], var);
          const bool rhs_bal = detail::references_var(cmp.operands[1], var);
          if (!lhs_bal && !rhs_bal) return;
          const Expression& other = lhs_bal ? cmp.operands[1] : cmp.operands[0];
          bool versus_amount = amount_vars.empty();
          for (const auto& v : amount_vars)
            if (detail::references_var(other, v)) versus_amount = true;
          if (versus_amount) {
            balance_checked = true;
            report.evidence[SubPatternId::EnoughBalance].push_back(s.pos);
          }
        });
      });
    }
  }
  report.flags[SubPatternId::BalanceDeduction] = deduction_after;
  report.flags[SubPatternId::EnoughBalance] = balance_checked;
  return report;
}

inline PatternReport extract_timestamp(const FunctionAst& fn) {
  PatternReport report;
  report.kind = VulnerabilityKind::TimestampDependence;

  auto ts_sites = detail::find_exprs(
      fn, [](const Expression& e) { return e.kind == ExprKind::BlockTimestamp; });
  report.flags[SubPatternId::TimestampInvocation] = !ts_sites.empty();
  for (const auto& site : ts_sites)
    report.evidence[SubPatternId::TimestampInvocation].push_back(site.expr->pos);

  // timestampAssign: block.timestamp flows into a variable or a call argument
  bool assigned = false;
  for (const auto& w : collect_writes(fn.body)) {
    if (w.value && detail::contains_kind(*w.value, ExprKind::BlockTimestamp)) {
      assigned = true;
      report.evidence[SubPatternId::TimestampAssign].push_back(w.stmt->pos);
    }
  }
  auto arg_sites = detail::find_exprs(fn, [](const Expression& e) {
    if (e.kind != ExprKind::Call && e.kind != ExprKind::CallValue &&
        e.kind != ExprKind::Transfer && e.kind != ExprKind::Send)
      return false;
    const size_t first_arg = e.kind == ExprKind::Call ? 1 : 1;
    for (size_t i = first_arg; i < e.operands.size(); ++i)
      if (detail::contains_kind(e.operands[i], ExprKind::BlockTimestamp))
        return true;
    return false;
  });
  for (const auto& site : arg_sites) {
    assigned = true;
    report.evidence[SubPatternId::TimestampAssign].push_back(site.expr->pos);
  }
  report.flags[SubPatternId::TimestampAssign] = assigned;

  // timestampContamination: taint seeded at block.timestamp reaches the
  // condition of a guard protecting a money transfer or state write.
  Expression seed;
  seed.kind = ExprKind::BlockTimestamp;
  const TaintState taint = taint_propagate(fn, {seed});

  std::set<std::string> state_names;
  for (const auto& sv : fn.state_vars) state_names.insert(sv.name);
  auto is_critical = [&](const Statement& s) {
    bool critical = false;
    for (const auto& e : s.exprs)
      walk_expr(e, [&](const Expression& sub) {
        if (sub.kind == ExprKind::CallValue || sub.kind == ExprKind::Transfer ||
            sub.kind == ExprKind::Send)
          critical = true;
      });
    if ((s.kind == StmtKind::Assignment || s.kind == StmtKind::CompoundAssignment))
      if (auto root = root_identifier(s.exprs[0]))
        if (state_names.count(*root)) critical = true;
    return critical;
  };
  auto subtree_critical = [&](const std::vector<Statement>& body) {
    bool found = false;
    walk_stmts(body, [&](const Statement& s) { found = found || is_critical(s); });
    return found;
  };
  std::vector<int> critical_indices;
  walk_stmts(fn.body, [&](const Statement& s) {
    if (is_critical(s)) critical_indices.push_back(s.index);
  });

  bool contaminated = false;
  walk_stmts(fn.body, [&](const Statement& s) {
    if (s.exprs.empty()) return;
    bool guards_critical = false;
    if (s.kind == StmtKind::If || s.kind == StmtKind::IfElse)
      guards_critical = subtree_critical(s.children) ||
                        subtree_critical(s.else_children);
    else if (s.kind == StmtKind::Require || s.kind == StmtKind::Assert)
      guards_critical = std::any_of(critical_indices.begin(), critical_indices.end(),
                                    [&](int i) { return i > s.index; });
    if (guards_critical && expression_tainted(s.exprs[0], taint)) {
      contaminated = true;
      report.evidence[SubPatternId::TimestampContamination].push_back(s.pos);
    }
  });
  report.flags[SubPatternId::TimestampContamination] = contaminated;
  return report;
}

inline PatternReport extract_infinite_loop(const FunctionAst& fn) {
  PatternReport report;
  report.kind = VulnerabilityKind::InfiniteLoop;

  bool has_loop = false, suspicious_cond = false;
  walk_stmts(fn.body, [&](const Statement& s) {
    if (s.kind != StmtKind::For && s.kind != StmtKind::While) return;
    has_loop = true;
    report.evidence[SubPatternId::LoopStatement].push_back(s.pos);

    const Expression& cond = s.exprs[0];
    const bool const_true =
        cond.kind == ExprKind::Literal &&
        (cond.text == "true" || (cond.text != "0" && cond.text.find_first_not_of(
                                                         "0123456789") == std::string::npos));
    std::set<std::string> cond_vars;
    detail::collect_identifiers(cond, cond_vars);

    std::set<std::string> written;
    for (const auto& w : collect_writes(s.children)) written.insert(w.target);
    for (const auto& w : collect_writes(s.update)) written.insert(w.target);

    const bool static_cond =
        !cond_vars.empty() &&
        std::none_of(cond_vars.begin(), cond_vars.end(),
                     [&](const std::string& v) { return written.count(v) > 0; });
    if (const_true || static_cond) {
      suspicious_cond = true;
      report.evidence[SubPatternId::LoopCondition].push_back(s.pos);
    }
  });
  report.flags[SubPatternId::LoopStatement] = has_loop;
  report.flags[SubPatternId::LoopCondition] = suspicious_cond;

  // selfInvocation: recursion sites not shielded by any if statement
  bool unconditional_self = false;
  std::function<void(const std::vector<Statement>&, bool)> scan =
      [&](const std::vector<Statement>& body, bool in_if) {
        for (const auto& s : body) {
          if (s.kind == StmtKind::SelfInvocationCall && !in_if) {
            unconditional_self = true;
            report.evidence[SubPatternId::SelfInvocation].push_back(s.pos);
          }
          const bool nested_if =
              in_if || s.kind == StmtKind::If || s.kind == StmtKind::IfElse;
          scan(s.init, in_if);
          scan(s.update, in_if);
          scan(s.children, nested_if);
          scan(s.else_children, nested_if);
        }
      };
  scan(fn.body, false);
  report.flags[SubPatternId::SelfInvocation] = unconditional_self;
  return report;
}

inline PatternReport extract_patterns(const FunctionAst& fn,
                                      VulnerabilityKind kind) {
  switch (kind) {
    case VulnerabilityKind::Reentrancy: return extract_reentrancy(fn);
    case VulnerabilityKind::TimestampDependence: return extract_timestamp(fn);
    case VulnerabilityKind::InfiniteLoop: return extract_infinite_loop(fn);
  }
  return {};
}

}  // namespace cge
