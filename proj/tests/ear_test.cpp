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

#include "trustmee/ear.hpp"

#include <gtest/gtest.h>

#include <random>

namespace trustmee {
namespace {

using ear::AttestationResult;
using ear::SignedResult;

AttestationResult sample_result() {
  AttestationResult r;
  r.issued_at = 1'777'000'000;
  r.verifier_id = "trustmee-test";
  r.policy_id = "policy-a";
  r.nonce_echo = from_hex("00112233");
  identity::ComponentIdentity id;
  id.hash.fill(0x42);
  cbor::Value attester = cbor::Value::map();
  attester.put("measurement", cbor::Value::bytes(Bytes(32, 1)));
  r.claims = appraisal::make_claim_set(id, std::move(attester));
  r.trust_vector.instance_identity = appraisal::kTierAffirming;
  r.trust_vector.executables = appraisal::kTierAffirming;
  r.trust_vector.hardware = appraisal::kTierAffirming;
  r.trust_vector.configuration = appraisal::kTierAffirming;
  appraisal::RuleOutcome o;
  o.rule = appraisal::Rule{"/component/hash", appraisal::RuleOp::kEq, "k",
                           appraisal::Category::kInstanceIdentity};
  o.passed = true;
  r.rule_outcomes.push_back(o);
  return r;
}

TEST(EarTest, EmitVerifyRoundTrip) {
  auto kp = crypto::ed25519_keygen();
  AttestationResult r = sample_result();
  SignedResult sr = ear::emit(r, kp.sk);

  std::set<Bytes> trusted{Bytes(kp.pk.begin(), kp.pk.end())};
  AttestationResult back = ear::verify_result(sr, trusted);
  EXPECT_EQ(back.issued_at, r.issued_at);
  EXPECT_EQ(back.verifier_id, r.verifier_id);
  EXPECT_EQ(back.policy_id, r.policy_id);
  EXPECT_EQ(back.nonce_echo, r.nonce_echo);
  EXPECT_EQ(back.claims, r.claims);
  EXPECT_EQ(back.trust_vector, r.trust_vector);
  ASSERT_EQ(back.rule_outcomes.size(), 1u);
  EXPECT_TRUE(back.rule_outcomes[0].passed);

  // Wire round trip too.
  Bytes wire = ear::encode_signed(sr);
  AttestationResult again = ear::verify_result(wire, trusted);
  EXPECT_EQ(again.nonce_echo, r.nonce_echo);
}

TEST(EarTest, PayloadBytesAreDeterministic) {
  AttestationResult r = sample_result();
  EXPECT_EQ(ear::encode_payload(r), ear::encode_payload(r));
  auto kp = crypto::ed25519_keygen();
  SignedResult a = ear::emit(r, kp.sk);
  SignedResult b = ear::emit(r, kp.sk);
  EXPECT_EQ(a.payload, b.payload);
  EXPECT_EQ(a.signature, b.signature);  // Ed25519 is deterministic
}

TEST(EarTest, FlippedPayloadByteFailsVerification) {
  auto kp = crypto::ed25519_keygen();
  SignedResult sr = ear::emit(sample_result(), kp.sk);
  std::set<Bytes> trusted{Bytes(kp.pk.begin(), kp.pk.end())};
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    SignedResult bad = sr;
    bad.payload[rng() % bad.payload.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
    try {
      ear::verify_result(bad, trusted);
      FAIL() << "tampered payload accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kBadSignature);
    }
  }
}

TEST(EarTest, UnknownVerifierKeyRejected) {
  auto kp = crypto::ed25519_keygen();
  auto other = crypto::ed25519_keygen();
  SignedResult sr = ear::emit(sample_result(), kp.sk);
  std::set<Bytes> trusted{Bytes(other.pk.begin(), other.pk.end())};
  try {
    ear::verify_result(sr, trusted);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUntrustedVerifier);
  }
}

TEST(EarTest, SignatureCrossValidatedByIndependentImplementation) {
  auto kp = crypto::ed25519_keygen();
  SignedResult sr = ear::emit(sample_result(), kp.sk);
  Bytes msg = ear::result_signature_message(sr.payload);
  EXPECT_TRUE(crypto::ed25519_verify_openssl(msg, sr.signature, sr.verifier_public_key));
}

TEST(EarTest, NoForgeryWithoutSigningKey) {
  auto kp = crypto::ed25519_keygen();
  std::set<Bytes> trusted{Bytes(kp.pk.begin(), kp.pk.end())};
  AttestationResult r = sample_result();
  SignedResult forged;
  forged.payload = ear::encode_payload(r);
  forged.verifier_public_key = kp.pk;
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    for (auto& b : forged.signature) b = static_cast<uint8_t>(rng());
    EXPECT_THROW(ear::verify_result(forged, trusted), Error);
  }
}

TEST(EarTest, FuzzedInputsNeverCrash) {
  auto kp = crypto::ed25519_keygen();
  std::set<Bytes> trusted{Bytes(kp.pk.begin(), kp.pk.end())};
  SignedResult sr = ear::emit(sample_result(), kp.sk);
  Bytes wire = ear::encode_signed(sr);
  std::mt19937_64 rng(11);
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    Bytes mutated = wire;
    size_t flips = 1 + rng() % 6;
    for (size_t f = 0; f < flips; ++f) {
      mutated[rng() % mutated.size()] = static_cast<uint8_t>(rng());
    }
    try {
      ear::verify_result(mutated, trusted);
      ++accepted;  // only if mutation didn't touch meaningful bytes
    } catch (const Error&) {
    }
  }
  for (int i = 0; i < 20000; ++i) {
    Bytes random(rng() % 200);
    for (auto& b : random) b = static_cast<uint8_t>(rng());
    EXPECT_THROW(ear::verify_result(random, trusted), Error);
  }
  SUCCEED();
}

}  // namespace
}  // namespace trustmee
