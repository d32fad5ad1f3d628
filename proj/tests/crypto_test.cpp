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

#include "trustmee/crypto.hpp"

#include <gtest/gtest.h>

#include <random>

#include "trustmee/bytes.hpp"

namespace trustmee {
namespace {

TEST(CryptoTest, Sha256KnownVector) {
  Bytes abc = to_bytes("abc");
  EXPECT_EQ(to_hex(crypto::sha256(abc)),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(crypto::sha256(Bytes{})),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(CryptoTest, Ed25519SignVerifyRoundTrip) {
  auto kp = crypto::ed25519_keygen();
  Bytes msg = crypto::random_bytes(100);
  auto sig = crypto::ed25519_sign(msg, kp.sk);
  EXPECT_TRUE(crypto::ed25519_verify(msg, sig, kp.pk));

  Bytes tampered = msg;
  tampered[3] ^= 0x01;
  EXPECT_FALSE(crypto::ed25519_verify(tampered, sig, kp.pk));

  auto bad_sig = sig;
  bad_sig[10] ^= 0x80;
  EXPECT_FALSE(crypto::ed25519_verify(msg, bad_sig, kp.pk));
}

TEST(CryptoTest, Ed25519AgreesWithSecondImplementation) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto kp = crypto::ed25519_keygen();
    Bytes msg = crypto::random_bytes(rng() % 200);
    auto sig = crypto::ed25519_sign(msg, kp.sk);
    ASSERT_TRUE(crypto::ed25519_verify_openssl(msg, sig, kp.pk)) << "case " << i;
    if (!msg.empty()) {
      Bytes bad = msg;
      bad[rng() % bad.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
      ASSERT_FALSE(crypto::ed25519_verify_openssl(bad, sig, kp.pk)) << "case " << i;
      ASSERT_FALSE(crypto::ed25519_verify(bad, sig, kp.pk)) << "case " << i;
    }
  }
}

TEST(CryptoTest, Ed25519DeterministicFromSeed) {
  Bytes seed = crypto::random_bytes(32);
  auto a = crypto::ed25519_from_seed(seed);
  auto b = crypto::ed25519_from_seed(seed);
  EXPECT_EQ(a.pk, b.pk);
  EXPECT_EQ(a.sk, b.sk);
}

TEST(CryptoTest, P256SignVerifyRoundTrip) {
  auto kp = crypto::p256_keygen();
  Bytes msg = crypto::random_bytes(77);
  auto sig = crypto::p256_sign(msg, kp);
  EXPECT_TRUE(crypto::p256_verify(msg, sig, kp.pub));

  Bytes tampered = msg;
  tampered[0] ^= 0xff;
  EXPECT_FALSE(crypto::p256_verify(tampered, sig, kp.pub));

  auto bad_sig = sig;
  bad_sig[40] ^= 0x01;
  EXPECT_FALSE(crypto::p256_verify(msg, bad_sig, kp.pub));
}

TEST(CryptoTest, P256RejectsMalformedKey) {
  Bytes msg = to_bytes("m");
  std::array<uint8_t, 64> sig{};
  Bytes short_key(10, 0x04);
  EXPECT_THROW(crypto::p256_verify(msg, sig, short_key), Error);

  Bytes not_on_curve(65, 0x00);
  not_on_curve[0] = 0x04;
  not_on_curve[64] = 0x05;
  EXPECT_THROW(crypto::p256_verify(msg, sig, not_on_curve), Error);
}

TEST(CryptoTest, P256WrongKeyRejects) {
  auto kp1 = crypto::p256_keygen();
  auto kp2 = crypto::p256_keygen();
  Bytes msg = crypto::random_bytes(32);
  auto sig = crypto::p256_sign(msg, kp1);
  EXPECT_TRUE(crypto::p256_verify(msg, sig, kp1.pub));
  EXPECT_FALSE(crypto::p256_verify(msg, sig, kp2.pub));
}

}  // namespace
}  // namespace trustmee
