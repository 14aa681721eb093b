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

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cge/diagnostics.hpp"

namespace cge {

enum class TokenKind {
  Identifier,
  Keyword,
  IntegerLiteral,
  StringLiteral,
  Punctuation,
  Operator,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line;    // 1-based
  int column;  // 1-based

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

namespace detail {

inline bool is_keyword(std::string_view s) {
  static const std::unordered_set<std::string_view> kws = {
      "pragma",   "contract", "function", "modifier", "constructor",
      "mapping",  "returns",  "return",   "if",       "else",
      "for",      "while",    "require",  "assert",   "revert",
      "throw",    "true",     "false",    "now",      "var",
      "is",       "public",   "external", "internal", "private",
      "payable",  "constant", "view",     "pure",     "memory",
      "storage",  "calldata", "event",    "emit",     "struct",
      "enum",     "library",  "interface","using",    "new",
      "delete",   "address",  "bool",     "string",   "assembly",
  };
  if (kws.count(s)) return true;
  // sized integer and bytes families: uint, uint8..uint256, int, bytes, bytes1..bytes32
  auto sized = [](std::string_view base, std::string_view w) {
    if (!w.starts_with(base)) return false;
    auto rest = w.substr(base.size());
    if (rest.empty()) return true;
    for (char c : rest)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  return sized("uint", s) || sized("int", s) || sized("bytes", s);
}

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace detail

/// Splits UTF-8 Solidity source into tokens, stripping comments.
/// Throws LexError on an unrecognizable character sequence.
inline std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  const size_t n = source.size();

  auto advance = [&](size_t count) {
    for (size_t k = 0; k < count && i < n; ++k, ++i) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  // Longest-match operator table: longer entries listed first.
  static const std::array<std::string_view, 31> ops3_2 = {
      "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=",
      "%=", "++", "--", "<<", ">>", "<",  ">",  "=",  "+",  "-",  "*",
      "/",  "%",  "!",  ".",  "?",  "^",  "&",  "|",  "~",
  };

  while (i < n) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '*') {
      advance(2);
      while (i + 1 < n && !(source[i] == '*' && source[i + 1] == '/')) advance(1);
      if (i + 1 >= n) throw LexError({line, col}, "unterminated comment");
      advance(2);
      continue;
    }

    const int tl = line, tc = col;
    if (detail::is_ident_start(c)) {
      size_t j = i;
      while (j < n && detail::is_ident_char(source[j])) ++j;
      std::string text(source.substr(i, j - i));
      advance(j - i);
      out.push_back({detail::is_keyword(text) ? TokenKind::Keyword
                                              : TokenKind::Identifier,
                     std::move(text), tl, tc});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      if (c == '0' && j + 1 < n && (source[j + 1] == 'x' || source[j + 1] == 'X')) {
        j += 2;
        while (j < n && std::isxdigit(static_cast<unsigned char>(source[j]))) ++j;
      } else {
        while (j < n && (std::isdigit(static_cast<unsigned char>(source[j])) ||
                         source[j] == '_'))
          ++j;
      }
      std::string text(source.substr(i, j - i));
      advance(j - i);
      out.push_back({TokenKind::IntegerLiteral, std::move(text), tl, tc});
      continue;
    }
    if (c == '"' || c == '\'') {
      const char quote = c;
      size_t j = i + 1;
      while (j < n && source[j] != quote) {
        if (source[j] == '\\' && j + 1 < n) ++j;
        ++j;
      }
      if (j >= n) throw LexError({tl, tc}, "unterminated string");
      std::string text(source.substr(i, j - i + 1));
      advance(j - i + 1);
      out.push_back({TokenKind::StringLiteral, std::move(text), tl, tc});
      continue;
    }
    if (c == '(' || c == ')' || c == '{' || c == '}' || c == '[' || c == ']' ||
        c == ';' || c == ',' || c == ':') {
      out.push_back({TokenKind::Punctuation, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    bool matched = false;
    for (auto op : ops3_2) {
      if (source.substr(i, op.size()) == op) {
        out.push_back({TokenKind::Operator, std::string(op), tl, tc});
        advance(op.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;

    throw LexError({tl, tc}, std::string(source.substr(i, std::min<size_t>(8, n - i))));
  }
  return out;
}

}  // namespace cge
