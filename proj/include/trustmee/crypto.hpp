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

#ifndef TRUSTMEE_CRYPTO_HPP_
#define TRUSTMEE_CRYPTO_HPP_

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ecdsa.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <sodium.h>

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include "trustmee/bytes.hpp"
#include "trustmee/error.hpp"

namespace trustmee::crypto {

inline void init() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) fail(Errc::kInternal, "sodium_init failed");
  });
}

inline Bytes random_bytes(size_t n) {
  init();
  Bytes out(n);
  if (n > 0) randombytes_buf(out.data(), n);
  return out;
}

inline std::array<uint8_t, 32> sha256(std::span<const uint8_t> data) {
  init();
  std::array<uint8_t, 32> out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

// ---------------------------------------------------------------------------
// Ed25519 (libsodium). Secret keys use libsodium's 64-byte seed||pk layout.
// ---------------------------------------------------------------------------

struct Ed25519KeyPair {
  std::array<uint8_t, 32> pk{};
  std::array<uint8_t, 64> sk{};
};

inline Ed25519KeyPair ed25519_keygen() {
  init();
  Ed25519KeyPair kp;
  crypto_sign_keypair(kp.pk.data(), kp.sk.data());
  return kp;
}

inline Ed25519KeyPair ed25519_from_seed(std::span<const uint8_t> seed) {
  init();
  if (seed.size() != 32) fail(Errc::kMalformedKey, "ed25519 seed must be 32 bytes");
  Ed25519KeyPair kp;
  crypto_sign_seed_keypair(kp.pk.data(), kp.sk.data(), seed.data());
  return kp;
}

inline std::array<uint8_t, 64> ed25519_sign(std::span<const uint8_t> msg,
                                            std::span<const uint8_t> sk) {
  init();
  if (sk.size() != 64) fail(Errc::kMalformedKey, "ed25519 secret key must be 64 bytes");
  std::array<uint8_t, 64> sig{};
  crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), sk.data());
  return sig;
}

inline bool ed25519_verify(std::span<const uint8_t> msg, std::span<const uint8_t> sig,
                           std::span<const uint8_t> pk) {
  init();
  if (sig.size() != 64 || pk.size() != 32) return false;
  return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pk.data()) == 0;
}

// Second, independent Ed25519 backend for cross-checking signatures produced
// or accepted by the libsodium path.
inline bool ed25519_verify_openssl(std::span<const uint8_t> msg, std::span<const uint8_t> sig,
                                   std::span<const uint8_t> pk) {
  if (sig.size() != 64 || pk.size() != 32) return false;
  std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> key(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pk.data(), pk.size()),
      EVP_PKEY_free);
  if (!key) return false;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx) return false;
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(), msg.data(), msg.size()) == 1;
}

// ---------------------------------------------------------------------------
// ECDSA P-256 over SHA-256 (OpenSSL). Public keys are 65-byte uncompressed
// SEC1 points; signatures are raw 64-byte r||s.
// ---------------------------------------------------------------------------

using EvpKey = std::shared_ptr<EVP_PKEY>;

inline EvpKey wrap_pkey(EVP_PKEY* p) { return EvpKey(p, EVP_PKEY_free); }

struct P256KeyPair {
  EvpKey key;
  std::array<uint8_t, 65> pub{};
};

inline P256KeyPair p256_keygen() {
  EVP_PKEY* raw = EVP_PKEY_Q_keygen(nullptr, nullptr, "EC", "prime256v1");
  if (!raw) fail(Errc::kInternal, "P-256 keygen failed");
  P256KeyPair kp;
  kp.key = wrap_pkey(raw);
  size_t len = 0;
  if (EVP_PKEY_get_octet_string_param(raw, OSSL_PKEY_PARAM_ENCODED_PUBLIC_KEY, kp.pub.data(),
                                      kp.pub.size(), &len) != 1 ||
      len != 65 || kp.pub[0] != 0x04) {
    fail(Errc::kInternal, "unexpected P-256 public key encoding");
  }
  return kp;
}

inline EvpKey p256_public_from_sec1(std::span<const uint8_t> pub) {
  if (pub.size() != 65 || pub[0] != 0x04) {
    fail(Errc::kMalformedKey, "P-256 public key must be 65-byte uncompressed SEC1");
  }
  std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(),
                                                                      OSSL_PARAM_BLD_free);
  if (!bld ||
      OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1",
                                      0) != 1 ||
      OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(),
                                       pub.size()) != 1) {
    fail(Errc::kInternal, "param build failed");
  }
  std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(
      OSSL_PARAM_BLD_to_param(bld.get()), OSSL_PARAM_free);
  std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)> ctx(
      EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr), EVP_PKEY_CTX_free);
  EVP_PKEY* raw = nullptr;
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, EVP_PKEY_PUBLIC_KEY, params.get()) != 1 || !raw) {
    fail(Errc::kMalformedKey, "P-256 point rejected");
  }
  return wrap_pkey(raw);
}

inline std::array<uint8_t, 64> p256_sign(std::span<const uint8_t> msg, const P256KeyPair& kp) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr, kp.key.get()) != 1) {
    fail(Errc::kInternal, "sign init failed");
  }
  uint8_t der[128];
  size_t der_len = sizeof(der);
  if (EVP_DigestSign(ctx.get(), der, &der_len, msg.data(), msg.size()) != 1) {
    fail(Errc::kInternal, "sign failed");
  }
  const uint8_t* p = der;
  std::unique_ptr<ECDSA_SIG, decltype(&ECDSA_SIG_free)> sig(
      d2i_ECDSA_SIG(nullptr, &p, static_cast<long>(der_len)), ECDSA_SIG_free);
  if (!sig) fail(Errc::kInternal, "signature decode failed");
  std::array<uint8_t, 64> out{};
  if (BN_bn2binpad(ECDSA_SIG_get0_r(sig.get()), out.data(), 32) != 32 ||
      BN_bn2binpad(ECDSA_SIG_get0_s(sig.get()), out.data() + 32, 32) != 32) {
    fail(Errc::kInternal, "signature encode failed");
  }
  return out;
}

// Throws kMalformedKey for a key that is not a valid curve point; returns
// false for any signature that does not verify.
inline bool p256_verify(std::span<const uint8_t> msg, std::span<const uint8_t> sig,
                        std::span<const uint8_t> pub) {
  EvpKey key = p256_public_from_sec1(pub);
  if (sig.size() != 64) return false;
  std::unique_ptr<ECDSA_SIG, decltype(&ECDSA_SIG_free)> es(ECDSA_SIG_new(), ECDSA_SIG_free);
  BIGNUM* r = BN_bin2bn(sig.data(), 32, nullptr);
  BIGNUM* s = BN_bin2bn(sig.data() + 32, 32, nullptr);
  if (!es || !r || !s || ECDSA_SIG_set0(es.get(), r, s) != 1) {
    BN_free(r);
    BN_free(s);
    fail(Errc::kInternal, "signature alloc failed");
  }
  int der_len = i2d_ECDSA_SIG(es.get(), nullptr);
  if (der_len <= 0) return false;
  Bytes der(static_cast<size_t>(der_len));
  uint8_t* out = der.data();
  i2d_ECDSA_SIG(es.get(), &out);

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1) {
    fail(Errc::kInternal, "verify init failed");
  }
  return EVP_DigestVerify(ctx.get(), der.data(), der.size(), msg.data(), msg.size()) == 1;
}

}  // namespace trustmee::crypto

#endif  // TRUSTMEE_CRYPTO_HPP_
