// Copyright 2026 The TrustMee Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Deterministic CBOR profile used on every TrustMee wire surface:
//   - definite lengths only
//   - integer headers in shortest form on encode
//   - map keys sorted bytewise by their encoded representation
//   - no floating point, no tags, no indefinite items
// The decoder is hardened against adversarial input: bounded depth, no
// recursion past the limit, duplicate map keys rejected, trailing bytes
// rejected.

#ifndef TRUSTMEE_CBOR_HPP_
#define TRUSTMEE_CBOR_HPP_

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trustmee/bytes.hpp"
#include "trustmee/error.hpp"

namespace trustmee::cbor {

class Value;
using Entry = std::pair<Value, Value>;

enum class Type { kUnsigned, kNegative, kBytes, kText, kArray, kMap, kBool, kNull };

class Value {
 public:
  Value() : type_(Type::kNull) {}

  static Value uns(uint64_t v) {
    Value x;
    x.type_ = Type::kUnsigned;
    x.num_ = v;
    return x;
  }
  static Value integer(int64_t v) {
    Value x;
    if (v >= 0) {
      x.type_ = Type::kUnsigned;
      x.num_ = static_cast<uint64_t>(v);
    } else {
      x.type_ = Type::kNegative;
      x.num_ = static_cast<uint64_t>(-(v + 1));
    }
    return x;
  }
  static Value bytes(Bytes b) {
    Value x;
    x.type_ = Type::kBytes;
    x.blob_ = std::move(b);
    return x;
  }
  static Value bytes(std::span<const uint8_t> b) { return bytes(Bytes(b.begin(), b.end())); }
  static Value text(std::string s) {
    Value x;
    x.type_ = Type::kText;
    x.str_ = std::move(s);
    return x;
  }
  static Value text(std::string_view s) { return text(std::string(s)); }
  static Value text(const char* s) { return text(std::string(s)); }
  static Value array() {
    Value x;
    x.type_ = Type::kArray;
    return x;
  }
  static Value map() {
    Value x;
    x.type_ = Type::kMap;
    return x;
  }
  static Value boolean(bool b) {
    Value x;
    x.type_ = Type::kBool;
    x.num_ = b ? 1 : 0;
    return x;
  }
  static Value null() { return Value(); }

  Type type() const { return type_; }
  bool is_uns() const { return type_ == Type::kUnsigned; }
  bool is_int() const { return type_ == Type::kUnsigned || type_ == Type::kNegative; }
  bool is_bytes() const { return type_ == Type::kBytes; }
  bool is_text() const { return type_ == Type::kText; }
  bool is_array() const { return type_ == Type::kArray; }
  bool is_map() const { return type_ == Type::kMap; }
  bool is_bool() const { return type_ == Type::kBool; }
  bool is_null() const { return type_ == Type::kNull; }

  uint64_t as_uns() const {
    if (type_ != Type::kUnsigned) fail(Errc::kMalformed, "expected unsigned");
    return num_;
  }
  int64_t as_int() const {
    if (type_ == Type::kUnsigned) {
      if (num_ > static_cast<uint64_t>(INT64_MAX)) fail(Errc::kMalformed, "int out of range");
      return static_cast<int64_t>(num_);
    }
    if (type_ == Type::kNegative) {
      if (num_ > static_cast<uint64_t>(INT64_MAX)) fail(Errc::kMalformed, "int out of range");
      return -static_cast<int64_t>(num_) - 1;
    }
    fail(Errc::kMalformed, "expected integer");
  }
  const Bytes& as_bytes() const {
    if (type_ != Type::kBytes) fail(Errc::kMalformed, "expected byte string");
    return blob_;
  }
  const std::string& as_text() const {
    if (type_ != Type::kText) fail(Errc::kMalformed, "expected text string");
    return str_;
  }
  bool as_bool() const {
    if (type_ != Type::kBool) fail(Errc::kMalformed, "expected bool");
    return num_ != 0;
  }

  const std::vector<Value>& items() const {
    if (type_ != Type::kArray) fail(Errc::kMalformed, "expected array");
    return arr_;
  }
  std::vector<Value>& items() {
    if (type_ != Type::kArray) fail(Errc::kMalformed, "expected array");
    return arr_;
  }
  void push(Value v) { items().push_back(std::move(v)); }

  const std::vector<Entry>& entries() const {
    if (type_ != Type::kMap) fail(Errc::kMalformed, "expected map");
    return map_;
  }
  size_t size() const {
    if (type_ == Type::kArray) return arr_.size();
    if (type_ == Type::kMap) return map_.size();
    fail(Errc::kMalformed, "no size for scalar");
  }

  // Inserts at the canonical position; an existing equal key is replaced.
  void put(Value key, Value val) {
    if (type_ != Type::kMap) fail(Errc::kMalformed, "expected map");
    Bytes kenc = encoded(key);
    auto it = std::lower_bound(map_.begin(), map_.end(), kenc,
                               [](const Entry& e, const Bytes& k) { return encoded(e.first) < k; });
    if (it != map_.end() && encoded(it->first) == kenc) {
      it->second = std::move(val);
    } else {
      map_.insert(it, Entry(std::move(key), std::move(val)));
    }
  }
  void put(std::string_view key, Value val) { put(Value::text(key), std::move(val)); }

  const Value* get(const Value& key) const {
    if (type_ != Type::kMap) return nullptr;
    Bytes kenc = encoded(key);
    auto it = std::lower_bound(map_.begin(), map_.end(), kenc,
                               [](const Entry& e, const Bytes& k) { return encoded(e.first) < k; });
    if (it != map_.end() && encoded(it->first) == kenc) return &it->second;
    return nullptr;
  }
  const Value* get(std::string_view key) const { return get(Value::text(key)); }

  bool operator==(const Value& o) const {
    if (type_ != o.type_) return false;
    switch (type_) {
      case Type::kUnsigned:
      case Type::kNegative:
      case Type::kBool:
        return num_ == o.num_;
      case Type::kBytes:
        return blob_ == o.blob_;
      case Type::kText:
        return str_ == o.str_;
      case Type::kArray:
        return arr_ == o.arr_;
      case Type::kMap:
        return map_ == o.map_;
      case Type::kNull:
        return true;
    }
    return false;
  }
  bool operator!=(const Value& o) const { return !(*this == o); }

  size_t depth() const {
    size_t d = 1;
    if (type_ == Type::kArray) {
      for (const auto& v : arr_) d = std::max(d, 1 + v.depth());
    } else if (type_ == Type::kMap) {
      for (const auto& [k, v] : map_) d = std::max(d, 1 + std::max(k.depth(), v.depth()));
    }
    return d;
  }

  static Bytes encoded(const Value& v) {
    Bytes out;
    encode_into(v, out);
    return out;
  }

  static void encode_into(const Value& v, Bytes& out) {
    switch (v.type_) {
      case Type::kUnsigned:
        head(out, 0, v.num_);
        break;
      case Type::kNegative:
        head(out, 1, v.num_);
        break;
      case Type::kBytes:
        head(out, 2, v.blob_.size());
        out.insert(out.end(), v.blob_.begin(), v.blob_.end());
        break;
      case Type::kText:
        head(out, 3, v.str_.size());
        out.insert(out.end(), v.str_.begin(), v.str_.end());
        break;
      case Type::kArray:
        head(out, 4, v.arr_.size());
        for (const auto& e : v.arr_) encode_into(e, out);
        break;
      case Type::kMap:
        head(out, 5, v.map_.size());
        for (const auto& [k, val] : v.map_) {
          encode_into(k, out);
          encode_into(val, out);
        }
        break;
      case Type::kBool:
        out.push_back(v.num_ ? 0xf5 : 0xf4);
        break;
      case Type::kNull:
        out.push_back(0xf6);
        break;
    }
  }

 private:
  static void head(Bytes& out, uint8_t major, uint64_t n) {
    uint8_t m = static_cast<uint8_t>(major << 5);
    if (n < 24) {
      out.push_back(m | static_cast<uint8_t>(n));
    } else if (n <= 0xff) {
      out.push_back(m | 24);
      out.push_back(static_cast<uint8_t>(n));
    } else if (n <= 0xffff) {
      out.push_back(m | 25);
      out.push_back(static_cast<uint8_t>(n >> 8));
      out.push_back(static_cast<uint8_t>(n));
    } else if (n <= 0xffffffffULL) {
      out.push_back(m | 26);
      for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(n >> s));
    } else {
      out.push_back(m | 27);
      for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(n >> s));
    }
  }

  Type type_;
  uint64_t num_ = 0;
  Bytes blob_;
  std::string str_;
  std::vector<Value> arr_;
  std::vector<Entry> map_;
};

inline Bytes encode(const Value& v) { return Value::encoded(v); }

struct DecodeOptions {
  size_t max_depth = 64;
  // Guards against header-declared sizes that dwarf the actual input.
  size_t max_items = 1u << 20;
};

namespace detail {

class Reader {
 public:
  Reader(std::span<const uint8_t> data, const DecodeOptions& opts)
      : data_(data), opts_(opts) {}

  Value read_value(size_t depth) {
    if (depth > opts_.max_depth) fail(Errc::kMalformed, "nesting too deep");
    uint8_t b = byte();
    uint8_t major = b >> 5;
    uint8_t addl = b & 0x1f;
    switch (major) {
      case 0:
        return Value::uns(read_uint(addl));
      case 1:
        return make_negative(read_uint(addl));
      case 2: {
        uint64_t n = read_uint(addl);
        return Value::bytes(read_chunk(n));
      }
      case 3: {
        uint64_t n = read_uint(addl);
        Bytes raw = read_chunk(n);
        return Value::text(std::string(raw.begin(), raw.end()));
      }
      case 4: {
        uint64_t n = read_uint(addl);
        check_items(n);
        Value v = Value::array();
        v.items().reserve(std::min<uint64_t>(n, 4096));
        for (uint64_t i = 0; i < n; ++i) v.push(read_value(depth + 1));
        return v;
      }
      case 5: {
        uint64_t n = read_uint(addl);
        check_items(n);
        Value v = Value::map();
        for (uint64_t i = 0; i < n; ++i) {
          Value key = read_value(depth + 1);
          Value val = read_value(depth + 1);
          if (v.get(key) != nullptr) fail(Errc::kMalformed, "duplicate map key");
          v.put(std::move(key), std::move(val));
        }
        return v;
      }
      case 6:
        fail(Errc::kMalformed, "tags not in profile");
      case 7:
        if (b == 0xf4) return Value::boolean(false);
        if (b == 0xf5) return Value::boolean(true);
        if (b == 0xf6) return Value::null();
        fail(Errc::kMalformed, "simple/float value not in profile");
    }
    fail(Errc::kMalformed, "unreachable major type");
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  static Value make_negative(uint64_t raw) {
    // Value has no public raw-negative constructor for > INT64 range; clamp
    // through integer() when possible, otherwise reject (never produced by
    // this profile's encoders).
    if (raw <= static_cast<uint64_t>(INT64_MAX)) {
      return Value::integer(-static_cast<int64_t>(raw) - 1);
    }
    fail(Errc::kMalformed, "negative integer out of range");
  }

  void check_items(uint64_t n) {
    items_ += n;
    if (items_ > opts_.max_items) fail(Errc::kMalformed, "too many items");
    // A container cannot hold more elements than remaining input bytes.
    if (n > data_.size() - pos_) fail(Errc::kMalformed, "container larger than input");
  }

  uint8_t byte() {
    if (pos_ >= data_.size()) fail(Errc::kMalformed, "truncated input");
    return data_[pos_++];
  }

  uint64_t read_uint(uint8_t addl) {
    if (addl < 24) return addl;
    int n;
    switch (addl) {
      case 24: n = 1; break;
      case 25: n = 2; break;
      case 26: n = 4; break;
      case 27: n = 8; break;
      default: fail(Errc::kMalformed, "indefinite length not in profile");
    }
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = v << 8 | byte();
    return v;
  }

  Bytes read_chunk(uint64_t n) {
    if (n > data_.size() - pos_) fail(Errc::kMalformed, "truncated string");
    Bytes out(data_.begin() + static_cast<ptrdiff_t>(pos_),
              data_.begin() + static_cast<ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

  std::span<const uint8_t> data_;
  const DecodeOptions& opts_;
  size_t pos_ = 0;
  uint64_t items_ = 0;
};

}  // namespace detail

inline Value decode(std::span<const uint8_t> data, const DecodeOptions& opts = {}) {
  detail::Reader r(data, opts);
  Value v = r.read_value(0);
  if (!r.done()) fail(Errc::kMalformed, "trailing bytes after value");
  return v;
}

}  // namespace trustmee::cbor

#endif  // TRUSTMEE_CBOR_HPP_
