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

#include <functional>
#include <string>
#include <vector>

#include "cge/diagnostics.hpp"

namespace cge {

enum class Visibility { Public, External, Internal, Private };

enum class IdentClass { Unresolved, Param, Local, State, Builtin };

enum class ExprKind {
  Identifier,
  MemberAccess,  // text = member name, operands[0] = base
  IndexAccess,   // operands = {base, index}
  Call,          // operands[0] = callee, operands[1..] = args
  CallValue,     // operands = {receiver, amount, args...}
  Transfer,      // operands = {receiver, amount}
  Send,          // operands = {receiver, amount}
  BinaryOp,      // text = operator, operands = {lhs, rhs}
  UnaryOp,       // text = operator, operands = {operand}
  Literal,       // text = raw literal
  MsgSender,
  BlockTimestamp,
};

struct Expression {
  ExprKind kind = ExprKind::Literal;
  std::string text;
  std::vector<Expression> operands;
  SourcePos pos;
  IdentClass ident_class = IdentClass::Unresolved;  // Identifier kind only
  bool prefix = true;                               // UnaryOp kind only

  bool operator==(const Expression& o) const {
    return kind == o.kind && text == o.text && prefix == o.prefix &&
           operands == o.operands;
  }
};

// Applies fn to every node of the expression tree, pre-order.
inline void walk_expr(const Expression& e,
                      const std::function<void(const Expression&)>& fn) {
  fn(e);
  for (const auto& op : e.operands) walk_expr(op, fn);
}

enum class StmtKind {
  Declaration,         // exprs = {target ident, init?}
  Assignment,          // exprs = {lvalue, rvalue}
  CompoundAssignment,  // exprs = {lvalue, rvalue}, op = "-=" etc.
  If,                  // exprs = {cond}, children = then
  IfElse,              // exprs = {cond}, children = then, else_children
  For,                 // exprs = {cond, update?}, init holds 0..1 statements
  While,               // exprs = {cond}, children = body
  Require,             // exprs = {cond}
  Assert,              // exprs = {cond}
  Revert,
  Throw,
  Return,              // exprs = {value?}
  ExpressionStmt,      // exprs = {expr}
  SelfInvocationCall,  // exprs = {call expr}
  ExternalCall,        // exprs = {call expr}
};

struct Statement {
  int index = 0;  // textual order within the enclosing function
  StmtKind kind = StmtKind::ExpressionStmt;
  SourcePos pos;
  std::vector<Expression> exprs;
  std::vector<Statement> children;
  std::vector<Statement> else_children;
  std::vector<Statement> init;    // for-loop initializer (0..1)
  std::vector<Statement> update;  // for-loop update clause (0..1)
  std::string decl_type;          // Declaration only
  std::string op;                 // assignment operator

  bool operator==(const Statement& o) const {
    return kind == o.kind && exprs == o.exprs && children == o.children &&
           else_children == o.else_children && init == o.init &&
           update == o.update && decl_type == o.decl_type && op == o.op;
  }
};

// Applies fn to every statement, pre-order, descending into branches,
// initializers and update clauses.
inline void walk_stmts(const std::vector<Statement>& body,
                       const std::function<void(const Statement&)>& fn) {
  for (const auto& s : body) {
    fn(s);
    walk_stmts(s.init, fn);
    walk_stmts(s.update, fn);
    walk_stmts(s.children, fn);
    walk_stmts(s.else_children, fn);
  }
}

struct Param {
  std::string name;
  std::string type;

  bool operator==(const Param&) const = default;
};

struct StateVar {
  std::string name;
  std::string declared_type;  // full declared type text
  bool is_mapping = false;
  std::string key_type;    // mapping key type, "" otherwise
  std::string value_type;  // mapping value type, "" otherwise

  bool operator==(const StateVar&) const = default;
};

struct FunctionAst {
  std::string name;  // empty for the fallback function
  std::vector<Param> params;
  std::vector<std::string> modifiers;
  Visibility visibility = Visibility::Public;
  bool payable = false;
  std::vector<Statement> body;

  // Resolution context, filled by resolve_function.
  std::vector<StateVar> state_vars;
  std::vector<std::string> sibling_functions;
  bool resolved = false;

  bool operator==(const FunctionAst& o) const {
    return name == o.name && params == o.params && modifiers == o.modifiers &&
           visibility == o.visibility && payable == o.payable && body == o.body;
  }
};

struct ContractAst {
  std::string name;
  std::vector<StateVar> state_vars;
  std::vector<FunctionAst> functions;
  bool has_fallback = false;
  std::vector<std::string> modifier_names;

  bool operator==(const ContractAst& o) const {
    return name == o.name && state_vars == o.state_vars &&
           functions == o.functions && has_fallback == o.has_fallback;
  }
};

struct ParseResult {
  std::vector<ContractAst> contracts;
  std::vector<Diagnostic> warnings;
};

}  // namespace cge
