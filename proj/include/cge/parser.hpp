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
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cge/ast.hpp"
#include "cge/token.hpp"

namespace cge {

namespace detail {

inline bool is_type_keyword(const Token& t) {
  if (t.kind != TokenKind::Keyword) return false;
  const std::string& s = t.text;
  if (s == "address" || s == "bool" || s == "string" || s == "mapping" ||
      s == "var")
    return true;
  auto sized = [&](std::string_view base) {
    if (!std::string_view(s).starts_with(base)) return false;
    auto rest = std::string_view(s).substr(base.size());
    return rest.empty() ||
           std::all_of(rest.begin(), rest.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  return sized("uint") || sized("int") || sized("bytes");
}

class Parser {
public:
  Parser(std::vector<Token> tokens, std::string file)
      : toks_(std::move(tokens)), file_(std::move(file)) {}

  ParseResult run() {
    ParseResult result;
    while (!at_end()) {
      if (peek_is(TokenKind::Keyword, "pragma")) {
        skip_to_semi();
        continue;
      }
      if (peek_is(TokenKind::Keyword, "library") ||
          peek_is(TokenKind::Keyword, "interface")) {
        warn("skipped " + peek().text + " declaration");
        advance();
        if (!at_end() && peek().kind == TokenKind::Identifier) advance();
        skip_balanced_block();
        continue;
      }
      if (peek_is(TokenKind::Keyword, "contract")) {
        result.contracts.push_back(parse_contract());
        continue;
      }
      warn("skipped unsupported top-level construct '" + peek().text + "'");
      advance();
    }
    result.warnings = std::move(warnings_);
    return result;
  }

private:
  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;
  int stmt_index_ = 0;
  std::vector<Diagnostic> warnings_;

  // --- token helpers ---
  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek(size_t ahead = 0) const {
    static const Token eof{TokenKind::Punctuation, "<eof>", 0, 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof;
  }
  bool peek_is(TokenKind k, std::string_view t, size_t ahead = 0) const {
    return peek(ahead).kind == k && peek(ahead).text == t;
  }
  const Token& advance() {
    const Token& t = peek();
    if (!at_end()) ++pos_;
    return t;
  }
  SourcePos here() const { return {peek().line, peek().column}; }

  const Token& expect(TokenKind k, std::string_view text) {
    if (!peek_is(k, text))
      throw ParseError(std::string("'") + std::string(text) + "'", peek().text,
                       here());
    return advance();
  }
  void warn(std::string msg) {
    warnings_.push_back({file_, here(), std::move(msg)});
  }
  void skip_to_semi() {
    while (!at_end() && !peek_is(TokenKind::Punctuation, ";")) advance();
    if (!at_end()) advance();
  }
  void skip_balanced_block() {
    while (!at_end() && !peek_is(TokenKind::Punctuation, "{")) advance();
    if (at_end()) return;
    int depth = 0;
    do {
      if (peek_is(TokenKind::Punctuation, "{")) ++depth;
      if (peek_is(TokenKind::Punctuation, "}")) --depth;
      advance();
    } while (!at_end() && depth > 0);
  }

  // --- grammar ---
  ContractAst parse_contract() {
    expect(TokenKind::Keyword, "contract");
    ContractAst contract;
    if (peek().kind != TokenKind::Identifier)
      throw ParseError("contract name", peek().text, here());
    contract.name = advance().text;
    if (peek_is(TokenKind::Keyword, "is")) {
      warn("inheritance list skipped");
      while (!at_end() && !peek_is(TokenKind::Punctuation, "{")) advance();
    }
    expect(TokenKind::Punctuation, "{");
    while (!at_end() && !peek_is(TokenKind::Punctuation, "}")) {
      parse_contract_part(contract);
    }
    expect(TokenKind::Punctuation, "}");
    for (auto& fn : contract.functions) {
      for (const auto& other : contract.functions)
        fn.sibling_functions.push_back(other.name);
      fn.state_vars = contract.state_vars;
    }
    return contract;
  }

  void parse_contract_part(ContractAst& contract) {
    if (peek_is(TokenKind::Keyword, "function") ||
        peek_is(TokenKind::Keyword, "constructor")) {
      contract.functions.push_back(parse_function());
      if (contract.functions.back().name.empty()) contract.has_fallback = true;
      return;
    }
    if (peek_is(TokenKind::Keyword, "modifier")) {
      advance();
      if (peek().kind == TokenKind::Identifier)
        contract.modifier_names.push_back(advance().text);
      if (peek_is(TokenKind::Punctuation, "(")) skip_parens();
      skip_balanced_block();
      return;
    }
    if (peek_is(TokenKind::Keyword, "struct") ||
        peek_is(TokenKind::Keyword, "enum")) {
      warn("skipped " + peek().text + " definition");
      advance();
      if (peek().kind == TokenKind::Identifier) advance();
      skip_balanced_block();
      return;
    }
    if (peek_is(TokenKind::Keyword, "event") ||
        peek_is(TokenKind::Keyword, "using")) {
      warn("skipped " + peek().text + " declaration");
      skip_to_semi();
      return;
    }
    if (is_type_keyword(peek())) {
      contract.state_vars.push_back(parse_state_var());
      return;
    }
    warn("skipped unsupported contract member '" + peek().text + "'");
    skip_to_semi();
  }

  void skip_parens() {
    int depth = 0;
    do {
      if (peek_is(TokenKind::Punctuation, "(")) ++depth;
      if (peek_is(TokenKind::Punctuation, ")")) --depth;
      advance();
    } while (!at_end() && depth > 0);
  }

  // Type name as flat text: "uint", "mapping(address => uint)", ...
  struct TypeInfo {
    std::string text;
    bool is_mapping = false;
    std::string key_type, value_type;
  };

  TypeInfo parse_type() {
    TypeInfo info;
    if (peek_is(TokenKind::Keyword, "mapping")) {
      advance();
      expect(TokenKind::Punctuation, "(");
      TypeInfo key = parse_type();
      expect(TokenKind::Operator, "=>");
      TypeInfo value = parse_type();
      expect(TokenKind::Punctuation, ")");
      info.is_mapping = true;
      info.key_type = key.text;
      info.value_type = value.text;
      info.text = "mapping(" + key.text + " => " + value.text + ")";
      return info;
    }
    if (!is_type_keyword(peek()))
      throw ParseError("type name", peek().text, here());
    info.text = advance().text;
    return info;
  }

  StateVar parse_state_var() {
    TypeInfo type = parse_type();
    // visibility / constant markers between type and name
    while (peek_is(TokenKind::Keyword, "public") ||
           peek_is(TokenKind::Keyword, "private") ||
           peek_is(TokenKind::Keyword, "internal") ||
           peek_is(TokenKind::Keyword, "constant"))
      advance();
    if (peek().kind != TokenKind::Identifier)
      throw ParseError("state variable name", peek().text, here());
    StateVar sv;
    sv.name = advance().text;
    sv.declared_type = type.text;
    sv.is_mapping = type.is_mapping;
    sv.key_type = type.key_type;
    sv.value_type = type.value_type;
    if (peek_is(TokenKind::Operator, "=")) {
      advance();
      parse_expression();  // initializer value kept out of the AST
    }
    expect(TokenKind::Punctuation, ";");
    return sv;
  }

  FunctionAst parse_function() {
    FunctionAst fn;
    if (peek_is(TokenKind::Keyword, "constructor")) {
      advance();
      fn.name = "constructor";
    } else {
      expect(TokenKind::Keyword, "function");
      if (peek().kind == TokenKind::Identifier) fn.name = advance().text;
    }
    expect(TokenKind::Punctuation, "(");
    while (!peek_is(TokenKind::Punctuation, ")")) {
      TypeInfo type = parse_type();
      while (peek_is(TokenKind::Keyword, "memory") ||
             peek_is(TokenKind::Keyword, "storage") ||
             peek_is(TokenKind::Keyword, "calldata"))
        advance();
      std::string name;
      if (peek().kind == TokenKind::Identifier) name = advance().text;
      fn.params.push_back({name, type.text});
      if (peek_is(TokenKind::Punctuation, ",")) advance();
    }
    expect(TokenKind::Punctuation, ")");

    while (true) {
      if (peek_is(TokenKind::Keyword, "public")) { fn.visibility = Visibility::Public; advance(); continue; }
      if (peek_is(TokenKind::Keyword, "external")) { fn.visibility = Visibility::External; advance(); continue; }
      if (peek_is(TokenKind::Keyword, "internal")) { fn.visibility = Visibility::Internal; advance(); continue; }
      if (peek_is(TokenKind::Keyword, "private")) { fn.visibility = Visibility::Private; advance(); continue; }
      if (peek_is(TokenKind::Keyword, "payable")) { fn.payable = true; advance(); continue; }
      if (peek_is(TokenKind::Keyword, "constant") || peek_is(TokenKind::Keyword, "view") ||
          peek_is(TokenKind::Keyword, "pure")) { advance(); continue; }
      if (peek_is(TokenKind::Keyword, "returns")) {
        advance();
        skip_parens();
        continue;
      }
      if (peek().kind == TokenKind::Identifier) {  // modifier invocation
        fn.modifiers.push_back(advance().text);
        if (peek_is(TokenKind::Punctuation, "(")) skip_parens();
        continue;
      }
      break;
    }

    stmt_index_ = 0;
    if (peek_is(TokenKind::Punctuation, ";")) {
      advance();  // bodyless declaration
      return fn;
    }
    fn.body = parse_block();
    reclassify_calls(fn.body, fn.name);
    return fn;
  }

  // Expression statements whose top-level expression is a call get the more
  // specific statement kind once the enclosing function name is known.
  void reclassify_calls(std::vector<Statement>& body, const std::string& fn_name) {
    for (auto& s : body) {
      if (s.kind == StmtKind::ExpressionStmt && !s.exprs.empty()) {
        const Expression& e = s.exprs[0];
        if (e.kind == ExprKind::Call && !e.operands.empty() &&
            e.operands[0].kind == ExprKind::Identifier &&
            e.operands[0].text == fn_name && !fn_name.empty()) {
          s.kind = StmtKind::SelfInvocationCall;
        } else if (e.kind == ExprKind::CallValue || e.kind == ExprKind::Transfer ||
                   e.kind == ExprKind::Send ||
                   (e.kind == ExprKind::Call && !e.operands.empty() &&
                    e.operands[0].kind == ExprKind::MemberAccess)) {
          s.kind = StmtKind::ExternalCall;
        }
      }
      reclassify_calls(s.init, fn_name);
      reclassify_calls(s.update, fn_name);
      reclassify_calls(s.children, fn_name);
      reclassify_calls(s.else_children, fn_name);
    }
  }

  std::vector<Statement> parse_block() {
    expect(TokenKind::Punctuation, "{");
    std::vector<Statement> stmts;
    while (!at_end() && !peek_is(TokenKind::Punctuation, "}")) {
      if (auto s = parse_statement()) stmts.push_back(std::move(*s));
    }
    expect(TokenKind::Punctuation, "}");
    return stmts;
  }

  std::vector<Statement> parse_branch() {
    if (peek_is(TokenKind::Punctuation, "{")) return parse_block();
    std::vector<Statement> stmts;
    if (auto s = parse_statement()) stmts.push_back(std::move(*s));
    return stmts;
  }

  Statement make_stmt(StmtKind kind, SourcePos pos) {
    Statement s;
    s.kind = kind;
    s.pos = pos;
    s.index = stmt_index_++;
    return s;
  }

  // Returns nullopt for constructs skipped with a warning.
  std::optional<Statement> parse_statement() {
    SourcePos pos = here();

    if (peek_is(TokenKind::Keyword, "assembly")) {
      warn("assembly block skipped");
      advance();
      skip_balanced_block();
      return std::nullopt;
    }
    if (peek_is(TokenKind::Keyword, "emit")) {
      warn("emit statement skipped");
      skip_to_semi();
      return std::nullopt;
    }
    if (peek_is(TokenKind::Keyword, "if")) return parse_if(pos);
    if (peek_is(TokenKind::Keyword, "while")) {
      Statement s = make_stmt(StmtKind::While, pos);
      advance();
      expect(TokenKind::Punctuation, "(");
      s.exprs.push_back(parse_expression());
      expect(TokenKind::Punctuation, ")");
      s.children = parse_branch();
      return s;
    }
    if (peek_is(TokenKind::Keyword, "for")) return parse_for(pos);
    if (peek_is(TokenKind::Keyword, "require") ||
        peek_is(TokenKind::Keyword, "assert")) {
      StmtKind kind = peek().text == "require" ? StmtKind::Require : StmtKind::Assert;
      Statement s = make_stmt(kind, pos);
      advance();
      expect(TokenKind::Punctuation, "(");
      s.exprs.push_back(parse_expression());
      if (peek_is(TokenKind::Punctuation, ",")) {  // optional message dropped
        advance();
        parse_expression();
      }
      expect(TokenKind::Punctuation, ")");
      expect(TokenKind::Punctuation, ";");
      return s;
    }
    if (peek_is(TokenKind::Keyword, "revert")) {
      Statement s = make_stmt(StmtKind::Revert, pos);
      advance();
      if (peek_is(TokenKind::Punctuation, "(")) skip_parens();
      expect(TokenKind::Punctuation, ";");
      return s;
    }
    if (peek_is(TokenKind::Keyword, "throw")) {
      Statement s = make_stmt(StmtKind::Throw, pos);
      advance();
      expect(TokenKind::Punctuation, ";");
      return s;
    }
    if (peek_is(TokenKind::Keyword, "return")) {
      Statement s = make_stmt(StmtKind::Return, pos);
      advance();
      if (!peek_is(TokenKind::Punctuation, ";"))
        s.exprs.push_back(parse_expression());
      expect(TokenKind::Punctuation, ";");
      return s;
    }
    if (is_type_keyword(peek()) && !peek_is(TokenKind::Keyword, "mapping")) {
      Statement s = parse_declaration(pos);
      expect(TokenKind::Punctuation, ";");
      return s;
    }

    Statement s = parse_simple_statement(pos);
    expect(TokenKind::Punctuation, ";");
    return s;
  }

  Statement parse_declaration(SourcePos pos) {
    Statement s = make_stmt(StmtKind::Declaration, pos);
    TypeInfo type = parse_type();
    s.decl_type = type.text;
    if (peek().kind != TokenKind::Identifier)
      throw ParseError("variable name", peek().text, here());
    Expression target;
    target.kind = ExprKind::Identifier;
    target.pos = here();
    target.text = advance().text;
    s.exprs.push_back(std::move(target));
    if (peek_is(TokenKind::Operator, "=")) {
      advance();
      s.exprs.push_back(parse_expression());
    }
    return s;
  }

  // assignment | compound assignment | bare expression (no trailing ';')
  Statement parse_simple_statement(SourcePos pos) {
    Expression first = parse_expression();
    static const std::unordered_set<std::string> compound = {"+=", "-=", "*=",
                                                             "/=", "%="};
    if (peek().kind == TokenKind::Operator &&
        (peek().text == "=" || compound.count(peek().text))) {
      bool is_compound = peek().text != "=";
      Statement s = make_stmt(
          is_compound ? StmtKind::CompoundAssignment : StmtKind::Assignment, pos);
      s.op = advance().text;
      s.exprs.push_back(std::move(first));
      s.exprs.push_back(parse_expression());
      return s;
    }
    Statement s = make_stmt(StmtKind::ExpressionStmt, pos);
    s.exprs.push_back(std::move(first));
    return s;
  }

  Statement parse_if(SourcePos pos) {
    Statement s = make_stmt(StmtKind::If, pos);
    advance();
    expect(TokenKind::Punctuation, "(");
    s.exprs.push_back(parse_expression());
    expect(TokenKind::Punctuation, ")");
    s.children = parse_branch();
    if (peek_is(TokenKind::Keyword, "else")) {
      advance();
      s.kind = StmtKind::IfElse;
      s.else_children = parse_branch();
    }
    return s;
  }

  Statement parse_for(SourcePos pos) {
    Statement s = make_stmt(StmtKind::For, pos);
    advance();
    expect(TokenKind::Punctuation, "(");
    if (!peek_is(TokenKind::Punctuation, ";")) {
      SourcePos ipos = here();
      if (is_type_keyword(peek()))
        s.init.push_back(parse_declaration(ipos));
      else
        s.init.push_back(parse_simple_statement(ipos));
    }
    expect(TokenKind::Punctuation, ";");
    if (!peek_is(TokenKind::Punctuation, ";")) {
      s.exprs.push_back(parse_expression());
    } else {
      Expression always;  // missing condition means loop-forever
      always.kind = ExprKind::Literal;
      always.text = "true";
      always.pos = here();
      s.exprs.push_back(std::move(always));
    }
    expect(TokenKind::Punctuation, ";");
    if (!peek_is(TokenKind::Punctuation, ")"))
      s.update.push_back(parse_simple_statement(here()));
    expect(TokenKind::Punctuation, ")");
    s.children = parse_branch();
    return s;
  }

  // --- expressions, precedence climbing ---
  Expression parse_expression() { return parse_or(); }

  Expression parse_binary_level(Expression (Parser::*next)(),
                                std::initializer_list<std::string_view> ops) {
    Expression lhs = (this->*next)();
    while (peek().kind == TokenKind::Operator &&
           std::find(ops.begin(), ops.end(), peek().text) != ops.end()) {
      Expression node;
      node.kind = ExprKind::BinaryOp;
      node.pos = here();
      node.text = advance().text;
      node.operands.push_back(std::move(lhs));
      node.operands.push_back((this->*next)());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expression parse_or() { return parse_binary_level(&Parser::parse_and, {"||"}); }
  Expression parse_and() { return parse_binary_level(&Parser::parse_equality, {"&&"}); }
  Expression parse_equality() {
    return parse_binary_level(&Parser::parse_relational, {"==", "!="});
  }
  Expression parse_relational() {
    return parse_binary_level(&Parser::parse_additive, {"<", ">", "<=", ">="});
  }
  Expression parse_additive() {
    return parse_binary_level(&Parser::parse_multiplicative, {"+", "-"});
  }
  Expression parse_multiplicative() {
    return parse_binary_level(&Parser::parse_unary, {"*", "/", "%"});
  }

  Expression parse_unary() {
    if (peek().kind == TokenKind::Operator &&
        (peek().text == "!" || peek().text == "-" || peek().text == "++" ||
         peek().text == "--")) {
      Expression node;
      node.kind = ExprKind::UnaryOp;
      node.pos = here();
      node.text = advance().text;
      node.prefix = true;
      node.operands.push_back(parse_unary());
      return node;
    }
    return parse_postfix();
  }

  Expression parse_postfix() {
    Expression expr = parse_primary();
    while (true) {
      if (peek_is(TokenKind::Operator, ".")) {
        SourcePos pos = here();
        advance();
        if (peek().kind != TokenKind::Identifier &&
            peek().kind != TokenKind::Keyword)
          throw ParseError("member name", peek().text, here());
        std::string member = advance().text;
        expr = fold_member(std::move(expr), std::move(member), pos);
        continue;
      }
      if (peek_is(TokenKind::Punctuation, "[")) {
        SourcePos pos = here();
        advance();
        Expression node;
        node.kind = ExprKind::IndexAccess;
        node.pos = pos;
        node.operands.push_back(std::move(expr));
        node.operands.push_back(parse_expression());
        expect(TokenKind::Punctuation, "]");
        expr = std::move(node);
        continue;
      }
      if (peek_is(TokenKind::Punctuation, "(")) {
        SourcePos pos = here();
        advance();
        std::vector<Expression> args;
        while (!peek_is(TokenKind::Punctuation, ")")) {
          args.push_back(parse_expression());
          if (peek_is(TokenKind::Punctuation, ",")) advance();
        }
        expect(TokenKind::Punctuation, ")");
        expr = fold_call(std::move(expr), std::move(args), pos);
        continue;
      }
      if (peek().kind == TokenKind::Operator &&
          (peek().text == "++" || peek().text == "--")) {
        Expression node;
        node.kind = ExprKind::UnaryOp;
        node.pos = here();
        node.text = advance().text;
        node.prefix = false;
        node.operands.push_back(std::move(expr));
        expr = std::move(node);
        continue;
      }
      break;
    }
    return expr;
  }

  // Recognizes msg.sender, block.timestamp, transfer/send shapes.
  Expression fold_member(Expression base, std::string member, SourcePos pos) {
    if (base.kind == ExprKind::Identifier && base.text == "msg" &&
        member == "sender") {
      Expression node;
      node.kind = ExprKind::MsgSender;
      node.pos = base.pos;
      return node;
    }
    if (base.kind == ExprKind::Identifier && base.text == "block" &&
        member == "timestamp") {
      Expression node;
      node.kind = ExprKind::BlockTimestamp;
      node.pos = base.pos;
      return node;
    }
    Expression node;
    node.kind = ExprKind::MemberAccess;
    node.pos = pos;
    node.text = std::move(member);
    node.operands.push_back(std::move(base));
    return node;
  }

  // Recognizes <expr>.call.value(v)(...), <expr>.transfer(v), <expr>.send(v).
  Expression fold_call(Expression callee, std::vector<Expression> args,
                       SourcePos pos) {
    if (callee.kind == ExprKind::MemberAccess) {
      const std::string& m = callee.text;
      if ((m == "transfer" || m == "send") && args.size() == 1) {
        Expression node;
        node.kind = m == "transfer" ? ExprKind::Transfer : ExprKind::Send;
        node.pos = pos;
        node.operands.push_back(std::move(callee.operands[0]));
        node.operands.push_back(std::move(args[0]));
        return node;
      }
    }
    // outer call of the call.value shape: callee is Call(Member(Member(x,"call"),"value"), {amount})
    if (callee.kind == ExprKind::Call &&
        callee.operands[0].kind == ExprKind::MemberAccess &&
        callee.operands[0].text == "value" &&
        callee.operands[0].operands[0].kind == ExprKind::MemberAccess &&
        callee.operands[0].operands[0].text == "call" && callee.operands.size() == 2) {
      Expression node;
      node.kind = ExprKind::CallValue;
      node.pos = callee.pos;
      node.operands.push_back(std::move(callee.operands[0].operands[0].operands[0]));
      node.operands.push_back(std::move(callee.operands[1]));
      for (auto& a : args) node.operands.push_back(std::move(a));
      return node;
    }
    Expression node;
    node.kind = ExprKind::Call;
    node.pos = pos;
    node.operands.push_back(std::move(callee));
    for (auto& a : args) node.operands.push_back(std::move(a));
    return node;
  }

  Expression parse_primary() {
    SourcePos pos = here();
    if (peek_is(TokenKind::Punctuation, "(")) {
      advance();
      Expression inner = parse_expression();
      expect(TokenKind::Punctuation, ")");
      return inner;
    }
    const Token& t = peek();
    if (t.kind == TokenKind::IntegerLiteral || t.kind == TokenKind::StringLiteral) {
      Expression node;
      node.kind = ExprKind::Literal;
      node.pos = pos;
      node.text = advance().text;
      return node;
    }
    if (t.kind == TokenKind::Keyword &&
        (t.text == "true" || t.text == "false")) {
      Expression node;
      node.kind = ExprKind::Literal;
      node.pos = pos;
      node.text = advance().text;
      return node;
    }
    if (t.kind == TokenKind::Keyword && t.text == "now") {
      advance();  // canonicalized: downstream passes see one timestamp form
      Expression node;
      node.kind = ExprKind::BlockTimestamp;
      node.pos = pos;
      return node;
    }
    if (t.kind == TokenKind::Keyword && t.text == "address") {
      // address(expr) cast reduced to its operand
      advance();
      expect(TokenKind::Punctuation, "(");
      Expression inner = parse_expression();
      expect(TokenKind::Punctuation, ")");
      return inner;
    }
    if (t.kind == TokenKind::Identifier) {
      Expression node;
      node.kind = ExprKind::Identifier;
      node.pos = pos;
      node.text = advance().text;
      return node;
    }
    throw ParseError("expression", t.text, pos);
  }
};

}  // namespace detail

/// Parses a token stream into contract syntax trees. Constructs outside the
/// supported subset are skipped and reported as warnings.
inline ParseResult parse_source(std::vector<Token> tokens,
                                std::string file = "<memory>") {
  return detail::Parser(std::move(tokens), std::move(file)).run();
}

inline ParseResult parse_text(std::string_view source,
                              std::string file = "<memory>") {
  return parse_source(tokenize(source), std::move(file));
}

namespace detail {

inline void classify_idents(Expression& e,
                            const std::unordered_map<std::string, IdentClass>& env) {
  if (e.kind == ExprKind::Identifier) {
    auto it = env.find(e.text);
    e.ident_class = it == env.end() ? IdentClass::Unresolved : it->second;
  }
  for (auto& op : e.operands) classify_idents(op, env);
}

inline void classify_stmts(std::vector<Statement>& body,
                           std::unordered_map<std::string, IdentClass>& env) {
  for (auto& s : body) {
    if (s.kind == StmtKind::Declaration && !s.exprs.empty())
      env[s.exprs[0].text] = IdentClass::Local;
    classify_stmts(s.init, env);
    for (auto& e : s.exprs) classify_idents(e, env);
    classify_stmts(s.update, env);
    classify_stmts(s.children, env);
    classify_stmts(s.else_children, env);
  }
}

}  // namespace detail

/// Looks up `name` in the contract and returns its FunctionAst with every
/// identifier classified as param/local/state/builtin or flagged unresolved.
inline FunctionAst resolve_function(const ContractAst& contract,
                                    const std::string& name) {
  const FunctionAst* found = nullptr;
  for (const auto& fn : contract.functions)
    if (fn.name == name) {
      found = &fn;
      break;
    }
  if (!found) throw UnknownFunction(name);

  FunctionAst fn = *found;
  fn.state_vars = contract.state_vars;
  fn.sibling_functions.clear();
  for (const auto& f : contract.functions) fn.sibling_functions.push_back(f.name);

  std::unordered_map<std::string, IdentClass> env;
  static const char* builtins[] = {"msg",      "block",      "tx",     "this",
                                   "require",  "assert",     "revert", "keccak256",
                                   "sha256",   "sha3",       "addmod", "mulmod",
                                   "selfdestruct", "suicide"};
  for (const char* b : builtins) env[b] = IdentClass::Builtin;
  for (const auto& f : contract.functions)
    if (!f.name.empty()) env[f.name] = IdentClass::Builtin;
  for (const auto& m : contract.modifier_names) env[m] = IdentClass::Builtin;
  for (const auto& sv : contract.state_vars) env[sv.name] = IdentClass::State;
  for (const auto& p : fn.params)
    if (!p.name.empty()) env[p.name] = IdentClass::Param;

  // First pass collects locals from every declaration so that use-before-decl
  // in branches still resolves; the subset has function-level scoping.
  walk_stmts(fn.body, [&](const Statement& s) {
    if (s.kind == StmtKind::Declaration && !s.exprs.empty())
      env[s.exprs[0].text] = IdentClass::Local;
  });
  detail::classify_stmts(fn.body, env);
  fn.resolved = true;
  return fn;
}

// ---------------------------------------------------------------------------
// Canonical printing. The canonical form is fully parenthesized so that
// re-parsing it reproduces the same tree.
// ---------------------------------------------------------------------------

inline std::string to_canonical(const Expression& e);

namespace detail {

inline std::string paren(const Expression& e) {
  std::string s = to_canonical(e);
  switch (e.kind) {
    case ExprKind::BinaryOp:
    case ExprKind::UnaryOp:
      return "(" + s + ")";
    default:
      return s;
  }
}

}  // namespace detail

inline std::string to_canonical(const Expression& e) {
  switch (e.kind) {
    case ExprKind::Identifier:
    case ExprKind::Literal:
      return e.text;
    case ExprKind::MsgSender:
      return "msg.sender";
    case ExprKind::BlockTimestamp:
      return "block.timestamp";
    case ExprKind::MemberAccess:
      return detail::paren(e.operands[0]) + "." + e.text;
    case ExprKind::IndexAccess:
      return detail::paren(e.operands[0]) + "[" + to_canonical(e.operands[1]) + "]";
    case ExprKind::Call: {
      std::string s = detail::paren(e.operands[0]) + "(";
      for (size_t i = 1; i < e.operands.size(); ++i) {
        if (i > 1) s += ", ";
        s += to_canonical(e.operands[i]);
      }
      return s + ")";
    }
    case ExprKind::CallValue: {
      std::string s = detail::paren(e.operands[0]) + ".call.value(" +
                      to_canonical(e.operands[1]) + ")(";
      for (size_t i = 2; i < e.operands.size(); ++i) {
        if (i > 2) s += ", ";
        s += to_canonical(e.operands[i]);
      }
      return s + ")";
    }
    case ExprKind::Transfer:
      return detail::paren(e.operands[0]) + ".transfer(" +
             to_canonical(e.operands[1]) + ")";
    case ExprKind::Send:
      return detail::paren(e.operands[0]) + ".send(" +
             to_canonical(e.operands[1]) + ")";
    case ExprKind::BinaryOp:
      return detail::paren(e.operands[0]) + " " + e.text + " " +
             detail::paren(e.operands[1]);
    case ExprKind::UnaryOp:
      return e.prefix ? e.text + detail::paren(e.operands[0])
                      : detail::paren(e.operands[0]) + e.text;
  }
  return "";
}

namespace detail {

inline void print_stmts(const std::vector<Statement>& body, int depth,
                        std::string& out);

inline void print_stmt(const Statement& s, int depth, std::string& out) {
  std::string ind(static_cast<size_t>(depth) * 4, ' ');
  switch (s.kind) {
    case StmtKind::Declaration:
      out += ind + s.decl_type + " " + s.exprs[0].text;
      if (s.exprs.size() > 1) out += " = " + to_canonical(s.exprs[1]);
      out += ";\n";
      break;
    case StmtKind::Assignment:
    case StmtKind::CompoundAssignment:
      out += ind + to_canonical(s.exprs[0]) + " " + s.op + " " +
             to_canonical(s.exprs[1]) + ";\n";
      break;
    case StmtKind::If:
    case StmtKind::IfElse:
      out += ind + "if (" + to_canonical(s.exprs[0]) + ") {\n";
      print_stmts(s.children, depth + 1, out);
      out += ind + "}";
      if (s.kind == StmtKind::IfElse) {
        out += " else {\n";
        print_stmts(s.else_children, depth + 1, out);
        out += ind + "}";
      }
      out += "\n";
      break;
    case StmtKind::For: {
      auto inline_stmt = [](const Statement& st) {
        std::string tmp;
        print_stmt(st, 0, tmp);
        tmp.erase(tmp.find_last_of(';'));  // strip ";\n" of the nested printer
        return tmp;
      };
      out += ind + "for (";
      if (!s.init.empty()) out += inline_stmt(s.init[0]);
      out += "; " + to_canonical(s.exprs[0]) + "; ";
      if (!s.update.empty()) out += inline_stmt(s.update[0]);
      out += ") {\n";
      print_stmts(s.children, depth + 1, out);
      out += ind + "}\n";
      break;
    }
    case StmtKind::While:
      out += ind + "while (" + to_canonical(s.exprs[0]) + ") {\n";
      print_stmts(s.children, depth + 1, out);
      out += ind + "}\n";
      break;
    case StmtKind::Require:
      out += ind + "require(" + to_canonical(s.exprs[0]) + ");\n";
      break;
    case StmtKind::Assert:
      out += ind + "assert(" + to_canonical(s.exprs[0]) + ");\n";
      break;
    case StmtKind::Revert:
      out += ind + "revert();\n";
      break;
    case StmtKind::Throw:
      out += ind + "throw;\n";
      break;
    case StmtKind::Return:
      out += ind + "return";
      if (!s.exprs.empty()) out += " " + to_canonical(s.exprs[0]);
      out += ";\n";
      break;
    case StmtKind::ExpressionStmt:
    case StmtKind::SelfInvocationCall:
    case StmtKind::ExternalCall:
      out += ind + to_canonical(s.exprs[0]) + ";\n";
      break;
  }
}

inline void print_stmts(const std::vector<Statement>& body, int depth,
                        std::string& out) {
  for (const auto& s : body) print_stmt(s, depth, out);
}

}  // namespace detail

inline std::string to_canonical(const FunctionAst& fn) {
  std::string out = "    function " + fn.name + "(";
  for (size_t i = 0; i < fn.params.size(); ++i) {
    if (i) out += ", ";
    out += fn.params[i].type + " " + fn.params[i].name;
  }
  out += ")";
  for (const auto& m : fn.modifiers) out += " " + m;
  switch (fn.visibility) {
    case Visibility::Public: out += " public"; break;
    case Visibility::External: out += " external"; break;
    case Visibility::Internal: out += " internal"; break;
    case Visibility::Private: out += " private"; break;
  }
  if (fn.payable) out += " payable";
  out += " {\n";
  detail::print_stmts(fn.body, 2, out);
  out += "    }\n";
  return out;
}

inline std::string to_canonical(const ContractAst& contract) {
  std::string out = "contract " + contract.name + " {\n";
  for (const auto& sv : contract.state_vars)
    out += "    " + sv.declared_type + " " + sv.name + ";\n";
  for (const auto& fn : contract.functions) out += to_canonical(fn);
  out += "}\n";
  return out;
}

}  // namespace cge
