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

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cge/pipeline.hpp"
#include "cge/random.hpp"

namespace cge {

struct ManifestEntry {
  std::string path;
  std::string contract;
  std::string function;
  VulnerabilityKind kind = VulnerabilityKind::Reentrancy;
  int label = 0;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// CSV with header path,contract,function,kind,label.
inline DatasetManifest parse_manifest(const std::string& text) {
  DatasetManifest manifest;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ManifestError("empty manifest");
  // tolerate trailing CR from CRLF files
  auto strip = [](std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  };
  if (strip(line) != "path,contract,function,kind,label")
    throw ManifestError("manifest header must be path,contract,function,kind,label");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::string col;
    std::istringstream ls(line);
    while (std::getline(ls, col, ',')) cols.push_back(col);
    if (cols.size() != 5)
      throw ManifestError("manifest line " + std::to_string(lineno) +
                          ": expected 5 columns");
    ManifestEntry e;
    e.path = cols[0];
    e.contract = cols[1];
    e.function = cols[2];
    try {
      e.kind = kind_from_string(cols[3]);
    } catch (const ConfigError&) {
      throw ManifestError("manifest line " + std::to_string(lineno) +
                          ": bad kind '" + cols[3] + "'");
    }
    if (cols[4] != "0" && cols[4] != "1")
      throw ManifestError("manifest line " + std::to_string(lineno) +
                          ": label must be 0 or 1");
    e.label = cols[4] == "1" ? 1 : 0;
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot read manifest '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_manifest(text);
}

struct IngestResult {
  std::vector<PreparedSample> samples;
  std::vector<std::string> failures;  // human-readable reasons, entry order
};

namespace detail {

struct ParsedFile {
  bool ok = false;
  std::string error;
  ParseResult result;
};

inline uint64_t content_hash(const std::string& text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Parses every referenced file and prepares each manifest entry. Distinct
/// file contents are parsed once (keyed by content hash) and in parallel;
/// entries that fail to parse or resolve are excluded and reported.
inline IngestResult ingest(const std::string& dir, const DatasetManifest& manifest,
                           const ModelConfig& cfg) {
  namespace fs = std::filesystem;
  IngestResult out;

  // read files sequentially, parse distinct contents in parallel
  std::map<std::string, uint64_t> path_hash;
  std::map<std::string, std::string> path_error;
  std::map<uint64_t, std::string> contents;
  for (const auto& e : manifest.entries) {
    if (path_hash.count(e.path) || path_error.count(e.path)) continue;
    const fs::path full = fs::path(dir) / e.path;
    std::ifstream in(full);
    if (!in) {
      path_error[e.path] = "cannot read '" + full.string() + "'";
      continue;
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const uint64_t h = detail::content_hash(text);
    path_hash[e.path] = h;
    contents.emplace(h, std::move(text));
  }
  std::map<uint64_t, std::shared_future<detail::ParsedFile>> parsed;
  for (const auto& [hash, text] : contents) {
    const std::string* body = &text;
    parsed.emplace(hash, std::async(std::launch::async, [body]() {
                     detail::ParsedFile pf;
                     try {
                       pf.result = parse_text(*body);
                       pf.ok = true;
                     } catch (const Error& err) {
                       pf.error = err.what();
                     }
                     return pf;
                   }).share());
  }

  for (const auto& entry : manifest.entries) {
    if (auto it = path_error.find(entry.path); it != path_error.end()) {
      out.failures.push_back(entry.path + ": " + it->second);
      continue;
    }
    const detail::ParsedFile& pf = parsed.at(path_hash.at(entry.path)).get();
    if (!pf.ok) {
      out.failures.push_back(entry.path + ": " + pf.error);
      continue;
    }
    const ContractAst* contract = nullptr;
    for (const auto& c : pf.result.contracts)
      if (c.name == entry.contract) contract = &c;
    if (!contract) {
      out.failures.push_back(entry.path + ": no contract '" + entry.contract + "'");
      continue;
    }
    try {
      const FunctionAst fn = resolve_function(*contract, entry.function);
      PreparedSample sample = prepare_sample(fn, entry.kind, cfg);
      sample.path = entry.path;
      sample.contract = entry.contract;
      sample.label = entry.label;
      out.samples.push_back(std::move(sample));
    } catch (const Error& err) {
      out.failures.push_back(entry.path + "/" + entry.function + ": " + err.what());
    }
  }
  return out;
}

/// Seeded stratified split: shuffles each label class separately, then takes
/// `ratio` of each for the first part. Classes with at least two members keep
/// a member on each side.
inline std::pair<std::vector<size_t>, std::vector<size_t>> split(
    size_t count, const std::vector<int>& labels, double ratio, uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
  std::vector<size_t> pos, neg;
  for (size_t i = 0; i < count; ++i) (labels[i] == 1 ? pos : neg).push_back(i);

  SplitMix64 rng(seed);
  std::pair<std::vector<size_t>, std::vector<size_t>> result;
  for (auto* cls : {&pos, &neg}) {
    rng.shuffle(*cls);
    if (cls->empty()) continue;
    size_t k = static_cast<size_t>(
        std::floor(static_cast<double>(cls->size()) * ratio + 0.5));
    if (cls->size() >= 2) {
      k = std::max<size_t>(1, std::min(k, cls->size() - 1));
    } else {
      k = std::min(k, cls->size());
    }
    for (size_t i = 0; i < cls->size(); ++i)
      (i < k ? result.first : result.second).push_back((*cls)[i]);
  }
  std::sort(result.first.begin(), result.first.end());
  std::sort(result.second.begin(), result.second.end());
  return result;
}

}  // namespace cge
