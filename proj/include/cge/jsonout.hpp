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

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace cge {

// Deterministic JSON emission: keys in insertion order, reals with 17
// significant digits, so identical inputs give byte-identical output.
namespace jsonout {

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace jsonout

// Streaming writer for nested objects/arrays.
class JsonWriter {
public:
  std::string str() const { return out_; }

  JsonWriter& begin_object() { return punct("{"); }
  JsonWriter& end_object() {
    comma_ = true;
    out_ += "}";
    return *this;
  }
  JsonWriter& begin_array() { return punct("["); }
  JsonWriter& end_array() {
    comma_ = true;
    out_ += "]";
    return *this;
  }

  JsonWriter& key(std::string_view k) {
    maybe_comma();
    out_ += "\"" + jsonout::escape(k) + "\":";
    comma_ = false;
    return *this;
  }

  JsonWriter& value(std::string_view v) {
    maybe_comma();
    out_ += "\"" + jsonout::escape(v) + "\"";
    comma_ = true;
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& value(bool v) {
    maybe_comma();
    out_ += v ? "true" : "false";
    comma_ = true;
    return *this;
  }
  JsonWriter& value(long long v) {
    maybe_comma();
    out_ += std::to_string(v);
    comma_ = true;
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(size_t v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(double v) {
    maybe_comma();
    out_ += jsonout::real(v);
    comma_ = true;
    return *this;
  }

  JsonWriter& reals(const std::vector<double>& vs) {
    begin_array();
    for (double v : vs) value(v);
    return end_array();
  }

private:
  JsonWriter& punct(const char* p) {
    maybe_comma();
    out_ += p;
    comma_ = false;
    return *this;
  }
  void maybe_comma() {
    if (comma_) out_ += ",";
    comma_ = false;
  }

  std::string out_;
  bool comma_ = false;
};

// Base64 without line breaks, standard alphabet with padding.
namespace base64 {

inline std::string encode(const unsigned char* data, size_t len) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  size_t i = 0;
  while (i + 3 <= len) {
    uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += alphabet[(n >> 6) & 63];
    out += alphabet[n & 63];
    i += 3;
  }
  if (len - i == 1) {
    uint32_t n = data[i] << 16;
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += "==";
  } else if (len - i == 2) {
    uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += alphabet[(n >> 6) & 63];
    out += "=";
  }
  return out;
}

inline std::vector<unsigned char> decode(std::string_view s) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  int buf = 0, bits = 0;
  for (char c : s) {
    if (c == '=') break;
    int v = val(c);
    if (v < 0) continue;
    buf = (buf << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((buf >> bits) & 0xff));
    }
  }
  return out;
}

}  // namespace base64

}  // namespace cge
