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

#include <stdexcept>
#include <string>
#include <vector>

namespace cge {

// 1-based source position.
struct SourcePos {
  int line = 0;
  int column = 0;

  bool operator==(const SourcePos&) const = default;
};

// Non-fatal finding attached to a file location (skipped constructs etc.).
struct Diagnostic {
  std::string file;
  SourcePos pos;
  std::string message;
};

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class LexError : public Error {
public:
  LexError(SourcePos p, std::string snip)
      : Error("lex error at " + std::to_string(p.line) + ":" +
              std::to_string(p.column) + " near '" + snip + "'"),
        pos(p), snippet(std::move(snip)) {}

  SourcePos pos;
  std::string snippet;
};

class ParseError : public Error {
public:
  ParseError(std::string exp, std::string got, SourcePos p)
      : Error("parse error at " + std::to_string(p.line) + ":" +
              std::to_string(p.column) + ": expected " + exp + ", found '" +
              got + "'"),
        expected(std::move(exp)), found(std::move(got)), pos(p) {}

  std::string expected;
  std::string found;
  SourcePos pos;
};

class UnknownFunction : public Error {
public:
  explicit UnknownFunction(const std::string& name)
      : Error("unknown function '" + name + "'") {}
};

class GraphBuildError : public Error {
public:
  using Error::Error;
};

class NoCoreNode : public Error {
public:
  NoCoreNode() : Error("graph has no core node") {}
};

class EmptyGraph : public Error {
public:
  EmptyGraph() : Error("graph has no nodes") {}
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class CheckpointMismatch : public Error {
public:
  using Error::Error;
};

class ManifestError : public Error {
public:
  using Error::Error;
};

}  // namespace cge
