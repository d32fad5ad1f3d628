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

#include "trustmee/cbor.hpp"

#include <gtest/gtest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "trustmee/bytes.hpp"

namespace trustmee {
namespace {

using cbor::Value;

Bytes enc(const Value& v) { return cbor::encode(v); }

TEST(CborTest, IntegerHeaderForms) {
  EXPECT_EQ(to_hex(enc(Value::uns(0))), "00");
  EXPECT_EQ(to_hex(enc(Value::uns(23))), "17");
  EXPECT_EQ(to_hex(enc(Value::uns(24))), "1818");
  EXPECT_EQ(to_hex(enc(Value::uns(255))), "18ff");
  EXPECT_EQ(to_hex(enc(Value::uns(256))), "190100");
  EXPECT_EQ(to_hex(enc(Value::uns(1000))), "1903e8");
  EXPECT_EQ(to_hex(enc(Value::uns(65536))), "1a00010000");
  EXPECT_EQ(to_hex(enc(Value::uns(1ull << 32))), "1b0000000100000000");
  EXPECT_EQ(to_hex(enc(Value::integer(-1))), "20");
  EXPECT_EQ(to_hex(enc(Value::integer(-24))), "37");
  EXPECT_EQ(to_hex(enc(Value::integer(-25))), "3818");
  EXPECT_EQ(to_hex(enc(Value::boolean(false))), "f4");
  EXPECT_EQ(to_hex(enc(Value::boolean(true))), "f5");
  EXPECT_EQ(to_hex(enc(Value::null())), "f6");
}

TEST(CborTest, StringsAndContainers) {
  EXPECT_EQ(to_hex(enc(Value::text("abc"))), "63616263");
  EXPECT_EQ(to_hex(enc(Value::bytes(from_hex("0102")))), "420102");
  Value a = Value::array();
  a.push(Value::uns(1));
  a.push(Value::text("x"));
  EXPECT_EQ(to_hex(enc(a)), "82016178");
  EXPECT_EQ(to_hex(enc(Value::map())), "a0");
}

TEST(CborTest, MapKeysSortedByEncodedBytes) {
  Value m = Value::map();
  m.put("aa", Value::uns(2));
  m.put("b", Value::uns(1));
  m.put("c", Value::uns(3));
  // One-byte text keys encode with a lower header byte than two-byte keys,
  // so "b" and "c" sort ahead of "aa".
  EXPECT_EQ(to_hex(enc(m)), "a3616201616303626161" + std::string("02"));
}

TEST(CborTest, MapPutReplacesExistingKey) {
  Value m = Value::map();
  m.put("k", Value::uns(1));
  m.put("k", Value::uns(2));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.get("k")->as_uns(), 2u);
}

TEST(CborTest, EncodeIsDeterministicAcrossInsertionOrders) {
  Value m1 = Value::map();
  m1.put("alpha", Value::uns(1));
  m1.put("b", Value::bytes(from_hex("00ff")));
  m1.put("zz", Value::text("v"));

  Value m2 = Value::map();
  m2.put("zz", Value::text("v"));
  m2.put("b", Value::bytes(from_hex("00ff")));
  m2.put("alpha", Value::uns(1));

  EXPECT_EQ(enc(m1), enc(m2));
  EXPECT_EQ(m1, m2);
}

TEST(CborTest, DecodeRejectsProfileViolations) {
  // 64-bit float (pi).
  EXPECT_THROW(cbor::decode(from_hex("fb400921fb54442d18")), Error);
  // Tagged value 0("...").
  EXPECT_THROW(cbor::decode(from_hex("c074323031332d30332d32315432303a30343a30305a")), Error);
  // Indefinite-length array.
  EXPECT_THROW(cbor::decode(from_hex("9f01ff")), Error);
  // Indefinite-length text.
  EXPECT_THROW(cbor::decode(from_hex("7f6161ff")), Error);
  // Duplicate map keys.
  EXPECT_THROW(cbor::decode(from_hex("a26161016161" + std::string("02"))), Error);
  // Trailing bytes.
  EXPECT_THROW(cbor::decode(from_hex("0000")), Error);
  // Truncated payloads.
  EXPECT_THROW(cbor::decode(from_hex("6261")), Error);
  EXPECT_THROW(cbor::decode(from_hex("1a0001")), Error);
  // Declared container larger than the input could possibly hold.
  EXPECT_THROW(cbor::decode(from_hex("9b7fffffffffffffff")), Error);
}

TEST(CborTest, DecodeEnforcesDepthLimit) {
  Bytes nested;
  for (int i = 0; i < 200; ++i) nested.push_back(0x81);  // array(1) * 200
  nested.push_back(0x00);
  EXPECT_THROW(cbor::decode(nested), Error);

  cbor::DecodeOptions opts;
  opts.max_depth = 300;
  EXPECT_NO_THROW(cbor::decode(nested, opts));
}

Value random_value(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 5);
  switch (pick(rng)) {
    case 0:
      return Value::uns(rng() >> (rng() % 64));
    case 1:
      return Value::integer(-static_cast<int64_t>(rng() >> 33));
    case 2: {
      Bytes b(rng() % 24);
      for (auto& x : b) x = static_cast<uint8_t>(rng());
      return Value::bytes(std::move(b));
    }
    case 3: {
      std::string s;
      size_t n = rng() % 16;
      for (size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng() % 26));
      return Value::text(std::move(s));
    }
    case 4:
      return Value::boolean(rng() & 1);
    case 5:
      return Value::null();
    case 6: {
      Value a = Value::array();
      size_t n = rng() % 5;
      for (size_t i = 0; i < n; ++i) a.push(random_value(rng, depth - 1));
      return a;
    }
    default: {
      Value m = Value::map();
      size_t n = rng() % 5;
      for (size_t i = 0; i < n; ++i) {
        std::string key;
        size_t klen = rng() % 8;
        for (size_t j = 0; j < klen; ++j) key.push_back(static_cast<char>('a' + rng() % 26));
        m.put(key, random_value(rng, depth - 1));
      }
      return m;
    }
  }
}

TEST(CborTest, RoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Value v = random_value(rng, 4);
    Bytes e = enc(v);
    Value d = cbor::decode(e);
    ASSERT_EQ(v, d) << "case " << i;
    ASSERT_EQ(enc(d), e) << "re-encode differs, case " << i;
  }
}

TEST(CborTest, AgreesWithIndependentCborImplementation) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Value v = random_value(rng, 3);
    Bytes ours = enc(v);
    nlohmann::json j = nlohmann::json::from_cbor(ours, true, false);
    ASSERT_FALSE(j.is_discarded()) << "case " << i;
    // Key order may differ between the two encoders but the encoded length
    // of the same data cannot.
    Bytes theirs = nlohmann::json::to_cbor(j);
    ASSERT_EQ(theirs.size(), ours.size()) << "case " << i;
  }
}

TEST(CborTest, DecoderSurvivesRandomInput) {
  std::mt19937_64 rng(13);
  int decoded = 0;
  for (int i = 0; i < 20000; ++i) {
    Bytes raw(rng() % 64);
    for (auto& b : raw) b = static_cast<uint8_t>(rng());
    try {
      cbor::Value v = cbor::decode(raw);
      ++decoded;
      // Anything we accept, the independent decoder must also accept.
      nlohmann::json j = nlohmann::json::from_cbor(raw, true, false);
      ASSERT_FALSE(j.is_discarded()) << to_hex(raw);
    } catch (const Error&) {
    }
  }
  // A few random inputs should decode (single-byte ints etc.); mostly errors.
  EXPECT_GT(decoded, 0);
}

}  // namespace
}  // namespace trustmee
