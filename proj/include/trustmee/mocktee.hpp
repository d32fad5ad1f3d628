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
// Synthetic TEE ecosystem for desk-scale verification. Two deliberately
// different evidence formats with software PKI:
//
//   MockTEE-A: fixed layout "MTA1" | version u16 BE | measurement[32] |
//     report_data[64] | tcb_level u32 BE | Ed25519 sig[64]; 2-link chain.
//   MockTEE-B: "MTB1" + TLV fields (measurement, report_data, svn,
//     debug_flag), ECDSA-P256 signature, 3-link chain.
//
// Includes the attester-side wrapping library, native reference verifiers
// (the differential-test oracles mirroring the fixture components exactly),
// and fixture HTTP servers with injectable latency.

#ifndef TRUSTMEE_MOCKTEE_HPP_
#define TRUSTMEE_MOCKTEE_HPP_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#define CPPHTTPLIB_NO_EXCEPTIONS 1
#include <httplib.h>

#include "trustmee/appraisal.hpp"
#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"
#include "trustmee/cmw.hpp"
#include "trustmee/crypto.hpp"
#include "trustmee/error.hpp"
#include "trustmee/identity.hpp"

namespace trustmee::mocktee {

enum class Platform { kA, kB };

inline const char* platform_name(Platform p) {
  return p == Platform::kA ? "mocktee-a" : "mocktee-b";
}

// Mirrors the component-side failure space.
struct ReferenceVerdict {
  std::optional<cbor::Value> claims;
  std::string failure_code;
  std::string failure_detail;

  bool succeeded() const { return claims.has_value(); }
};

// --- key material --------------------------------------------------------------

struct KeySetA {
  crypto::Ed25519KeyPair root;
  crypto::Ed25519KeyPair platform;
  uint64_t root_expiry = 0;
  uint64_t platform_expiry = 0;
};

struct KeySetB {
  crypto::P256KeyPair root;
  crypto::P256KeyPair intermediate;
  crypto::P256KeyPair platform;
  uint64_t root_expiry = 0;
  uint64_t intermediate_expiry = 0;
  uint64_t platform_expiry = 0;
};

inline KeySetA keygen_a(uint64_t expiry = 4'000'000'000ull) {
  KeySetA k;
  k.root = crypto::ed25519_keygen();
  k.platform = crypto::ed25519_keygen();
  k.root_expiry = expiry;
  k.platform_expiry = expiry;
  return k;
}

inline KeySetB keygen_b(uint64_t expiry = 4'000'000'000ull) {
  KeySetB k;
  k.root = crypto::p256_keygen();
  k.intermediate = crypto::p256_keygen();
  k.platform = crypto::p256_keygen();
  k.root_expiry = expiry;
  k.intermediate_expiry = expiry;
  k.platform_expiry = expiry;
  return k;
}

// --- certificate chains ----------------------------------------------------------

inline constexpr std::string_view kCertTagA = "mocktee-a-cert-v1";
inline constexpr std::string_view kCertTagB = "mocktee-b-cert-v1";

namespace detail {

inline Bytes cert_tbs(std::string_view tag, std::span<const uint8_t> pk, uint64_t expiry,
                      std::string_view role) {
  Bytes msg(tag.begin(), tag.end());
  cbor::Value m = cbor::Value::map();
  m.put("pk", cbor::Value::bytes(pk));
  m.put("exp", cbor::Value::uns(expiry));
  m.put("role", cbor::Value::text(role));
  Bytes enc = cbor::encode(m);
  msg.insert(msg.end(), enc.begin(), enc.end());
  return msg;
}

inline cbor::Value cert_value(std::span<const uint8_t> pk, uint64_t expiry,
                              std::string_view role, std::span<const uint8_t> sig) {
  cbor::Value m = cbor::Value::map();
  m.put("pk", cbor::Value::bytes(pk));
  m.put("exp", cbor::Value::uns(expiry));
  m.put("role", cbor::Value::text(role));
  m.put("sig", cbor::Value::bytes(sig));
  return m;
}

}  // namespace detail

inline Bytes make_chain_a(const KeySetA& k) {
  auto root_sig = crypto::ed25519_sign(
      detail::cert_tbs(kCertTagA, k.root.pk, k.root_expiry, "root"), k.root.sk);
  auto platform_sig = crypto::ed25519_sign(
      detail::cert_tbs(kCertTagA, k.platform.pk, k.platform_expiry, "platform"), k.root.sk);
  cbor::Value chain = cbor::Value::array();
  chain.push(detail::cert_value(k.root.pk, k.root_expiry, "root", root_sig));
  chain.push(detail::cert_value(k.platform.pk, k.platform_expiry, "platform", platform_sig));
  return cbor::encode(chain);
}

inline Bytes make_chain_b(const KeySetB& k) {
  auto root_sig =
      crypto::p256_sign(detail::cert_tbs(kCertTagB, k.root.pub, k.root_expiry, "root"), k.root);
  auto mid_sig = crypto::p256_sign(
      detail::cert_tbs(kCertTagB, k.intermediate.pub, k.intermediate_expiry, "intermediate"),
      k.root);
  auto platform_sig = crypto::p256_sign(
      detail::cert_tbs(kCertTagB, k.platform.pub, k.platform_expiry, "platform"),
      k.intermediate);
  cbor::Value chain = cbor::Value::array();
  chain.push(detail::cert_value(k.root.pub, k.root_expiry, "root", root_sig));
  chain.push(
      detail::cert_value(k.intermediate.pub, k.intermediate_expiry, "intermediate", mid_sig));
  chain.push(detail::cert_value(k.platform.pub, k.platform_expiry, "platform", platform_sig));
  return cbor::encode(chain);
}

// --- evidence generation ----------------------------------------------------------

inline constexpr size_t kEvidenceLenA = 170;
inline constexpr size_t kSignedLenA = 106;

inline Bytes generate_evidence_a(const KeySetA& k, std::span<const uint8_t> measurement,
                                 std::span<const uint8_t> report_data, uint32_t tcb_level) {
  if (measurement.size() != 32) fail(Errc::kInternal, "measurement must be 32 bytes");
  if (report_data.size() > 64) fail(Errc::kInternal, "report data exceeds field");
  Bytes ev(kEvidenceLenA, 0);
  ev[0] = 'M';
  ev[1] = 'T';
  ev[2] = 'A';
  ev[3] = '1';
  ev[4] = 0;
  ev[5] = 1;  // version 1, big-endian
  std::copy(measurement.begin(), measurement.end(), ev.begin() + 6);
  std::copy(report_data.begin(), report_data.end(), ev.begin() + 38);
  for (int i = 0; i < 4; ++i) ev[102 + i] = static_cast<uint8_t>(tcb_level >> (24 - 8 * i));
  auto sig = crypto::ed25519_sign(std::span<const uint8_t>(ev).first(kSignedLenA),
                                  k.platform.sk);
  std::copy(sig.begin(), sig.end(), ev.begin() + kSignedLenA);
  return ev;
}

namespace detail {

inline void put_tlv(Bytes& out, uint8_t tag, std::span<const uint8_t> value) {
  out.push_back(tag);
  out.push_back(static_cast<uint8_t>(value.size() >> 8));
  out.push_back(static_cast<uint8_t>(value.size()));
  out.insert(out.end(), value.begin(), value.end());
}

}  // namespace detail

inline Bytes generate_evidence_b(const KeySetB& k, std::span<const uint8_t> measurement,
                                 std::span<const uint8_t> report_data, uint32_t svn,
                                 bool debug_flag) {
  if (measurement.size() != 32) fail(Errc::kInternal, "measurement must be 32 bytes");
  if (report_data.size() > 64) fail(Errc::kInternal, "report data too long");
  Bytes ev = to_bytes("MTB1");
  detail::put_tlv(ev, 0x01, measurement);
  detail::put_tlv(ev, 0x02, report_data);
  uint8_t svn_be[4] = {static_cast<uint8_t>(svn >> 24), static_cast<uint8_t>(svn >> 16),
                       static_cast<uint8_t>(svn >> 8), static_cast<uint8_t>(svn)};
  detail::put_tlv(ev, 0x03, svn_be);
  uint8_t flag = debug_flag ? 1 : 0;
  detail::put_tlv(ev, 0x04, std::span<const uint8_t>(&flag, 1));
  auto sig = crypto::p256_sign(ev, k.platform);
  detail::put_tlv(ev, 0x7f, sig);
  return ev;
}

// --- native reference verifiers -----------------------------------------------------
//
// These mirror the fixture components check for check and claim for claim;
// the differential suites assert exact agreement. They take literal chain
// bytes (no URL indirection) and an explicit clock.

namespace detail {

struct ParsedCert {
  Bytes pk;
  uint64_t expiry = 0;
  Bytes sig;
  std::string role;
};

inline bool parse_cert(const cbor::Value& v, size_t pk_len, ParsedCert* out) {
  if (!v.is_map() || v.size() != 4) return false;
  const cbor::Value* pk = v.get("pk");
  const cbor::Value* exp = v.get("exp");
  const cbor::Value* sig = v.get("sig");
  const cbor::Value* role = v.get("role");
  if (!pk || !exp || !sig || !role) return false;
  if (!pk->is_bytes() || pk->as_bytes().size() != pk_len) return false;
  if (!exp->is_uns()) return false;
  if (!sig->is_bytes() || sig->as_bytes().size() != 64) return false;
  if (!role->is_text()) return false;
  out->pk = pk->as_bytes();
  out->expiry = exp->as_uns();
  out->sig = sig->as_bytes();
  out->role = role->as_text();
  return true;
}

inline ReferenceVerdict ref_failure(std::string code, std::string detail) {
  ReferenceVerdict v;
  v.failure_code = std::move(code);
  v.failure_detail = std::move(detail);
  return v;
}

}  // namespace detail

inline ReferenceVerdict native_reference_verify_a(std::span<const uint8_t> evidence,
                                                  std::span<const uint8_t> endorsement,
                                                  std::span<const uint8_t> expected_report_data,
                                                  uint64_t now) {
  using detail::ref_failure;
  if (evidence.size() != kEvidenceLenA) return ref_failure("InvalidEvidence", "wrong length");
  if (std::memcmp(evidence.data(), "MTA1", 4) != 0) {
    return ref_failure("InvalidEvidence", "bad magic");
  }
  uint32_t version = static_cast<uint32_t>(evidence[4]) << 8 | evidence[5];
  if (version != 1) return ref_failure("InvalidEvidence", "unsupported version");

  if (endorsement.empty()) return ref_failure("EndorsementRejected", "no endorsement provided");
  cbor::Value chain;
  try {
    chain = cbor::decode(endorsement);
  } catch (const Error&) {
    return ref_failure("EndorsementRejected", "cert parse failed");
  }
  if (!chain.is_array() || chain.size() != 2) {
    return ref_failure("EndorsementRejected", "chain must have 2 links");
  }
  detail::ParsedCert root, platform;
  if (!detail::parse_cert(chain.items()[0], 32, &root) ||
      !detail::parse_cert(chain.items()[1], 32, &platform)) {
    return ref_failure("EndorsementRejected", "cert parse failed");
  }
  if (root.role != "root" || platform.role != "platform") {
    return ref_failure("EndorsementRejected", "unexpected roles");
  }
  if (now > root.expiry || now > platform.expiry) {
    return ref_failure("EndorsementRejected", "certificate expired");
  }
  if (!crypto::ed25519_verify(detail::cert_tbs(kCertTagA, root.pk, root.expiry, root.role),
                              root.sig, root.pk)) {
    return ref_failure("EndorsementRejected", "root self-signature invalid");
  }
  if (!crypto::ed25519_verify(
          detail::cert_tbs(kCertTagA, platform.pk, platform.expiry, platform.role),
          platform.sig, root.pk)) {
    return ref_failure("EndorsementRejected", "platform certificate not signed by root");
  }

  if (!crypto::ed25519_verify(evidence.first(kSignedLenA), evidence.subspan(kSignedLenA, 64),
                              platform.pk)) {
    return ref_failure("InvalidEvidence", "platform signature invalid");
  }

  if (expected_report_data.size() > 64) {
    return ref_failure("FreshnessMismatch", "nonce too long");
  }
  Bytes expected(64, 0);
  std::copy(expected_report_data.begin(), expected_report_data.end(), expected.begin());
  if (std::memcmp(evidence.data() + 38, expected.data(), 64) != 0) {
    return ref_failure("FreshnessMismatch", "report data does not match nonce");
  }

  uint32_t tcb = static_cast<uint32_t>(evidence[102]) << 24 |
                 static_cast<uint32_t>(evidence[103]) << 16 |
                 static_cast<uint32_t>(evidence[104]) << 8 | evidence[105];
  cbor::Value claims = cbor::Value::map();
  claims.put("platform", cbor::Value::text("mocktee-a"));
  claims.put("root_key", cbor::Value::bytes(root.pk));
  claims.put("tcb_level", cbor::Value::uns(tcb));
  claims.put("measurement", cbor::Value::bytes(evidence.subspan(6, 32)));
  claims.put("report_data", cbor::Value::bytes(expected_report_data));
  ReferenceVerdict v;
  v.claims = std::move(claims);
  return v;
}

inline ReferenceVerdict native_reference_verify_b(std::span<const uint8_t> evidence,
                                                  std::span<const uint8_t> endorsement,
                                                  std::span<const uint8_t> expected_report_data,
                                                  uint64_t now) {
  using detail::ref_failure;
  // TLV parse, mirroring the component's strictness.
  if (evidence.size() < 4 || evidence.size() > 4096 ||
      std::memcmp(evidence.data(), "MTB1", 4) != 0) {
    return ref_failure("InvalidEvidence", "evidence parse failed");
  }
  std::optional<Bytes> measurement, report_data, sig;
  std::optional<uint32_t> svn;
  std::optional<bool> debug_flag;
  size_t signed_len = 0;
  size_t off = 4;
  bool bad = false;
  while (off < evidence.size()) {
    if (off + 3 > evidence.size()) {
      bad = true;
      break;
    }
    uint8_t tag = evidence[off];
    size_t vlen = static_cast<size_t>(evidence[off + 1]) << 8 | evidence[off + 2];
    if (off + 3 + vlen > evidence.size()) {
      bad = true;
      break;
    }
    auto val = evidence.subspan(off + 3, vlen);
    switch (tag) {
      case 0x01:
        if (vlen != 32 || measurement.has_value()) bad = true;
        else measurement = Bytes(val.begin(), val.end());
        break;
      case 0x02:
        if (vlen > 64 || report_data.has_value()) bad = true;
        else report_data = Bytes(val.begin(), val.end());
        break;
      case 0x03:
        if (vlen != 4 || svn.has_value()) bad = true;
        else
          svn = static_cast<uint32_t>(val[0]) << 24 | static_cast<uint32_t>(val[1]) << 16 |
                static_cast<uint32_t>(val[2]) << 8 | val[3];
        break;
      case 0x04:
        if (vlen != 1 || val[0] > 1 || debug_flag.has_value()) bad = true;
        else debug_flag = val[0] == 1;
        break;
      case 0x7f:
        if (vlen != 64 || sig.has_value()) bad = true;
        else {
          sig = Bytes(val.begin(), val.end());
          signed_len = off;
          if (off + 3 + vlen != evidence.size()) bad = true;  // must be last
        }
        break;
      default:
        bad = true;
        break;
    }
    if (bad) break;
    off += 3 + vlen;
  }
  if (bad || !measurement || !report_data || !svn || !debug_flag || !sig) {
    return ref_failure("InvalidEvidence", "evidence parse failed");
  }

  if (endorsement.empty()) return ref_failure("EndorsementRejected", "no endorsement provided");
  cbor::Value chain;
  try {
    chain = cbor::decode(endorsement);
  } catch (const Error&) {
    return ref_failure("EndorsementRejected", "cert parse failed");
  }
  if (!chain.is_array() || chain.size() != 3) {
    return ref_failure("EndorsementRejected", "chain must have 3 links");
  }
  detail::ParsedCert root, mid, platform;
  if (!detail::parse_cert(chain.items()[0], 65, &root) ||
      !detail::parse_cert(chain.items()[1], 65, &mid) ||
      !detail::parse_cert(chain.items()[2], 65, &platform)) {
    return ref_failure("EndorsementRejected", "cert parse failed");
  }
  if (root.role != "root" || mid.role != "intermediate" || platform.role != "platform") {
    return ref_failure("EndorsementRejected", "unexpected roles");
  }
  if (now > root.expiry || now > mid.expiry || now > platform.expiry) {
    return ref_failure("EndorsementRejected", "certificate expired");
  }
  auto p256_check = [](const Bytes& msg, const Bytes& signature, const Bytes& pub) {
    try {
      return crypto::p256_verify(msg, signature, pub);
    } catch (const Error&) {
      return false;
    }
  };
  if (!p256_check(detail::cert_tbs(kCertTagB, root.pk, root.expiry, root.role), root.sig,
                  root.pk)) {
    return ref_failure("EndorsementRejected", "root self-signature invalid");
  }
  if (!p256_check(detail::cert_tbs(kCertTagB, mid.pk, mid.expiry, mid.role), mid.sig, root.pk)) {
    return ref_failure("EndorsementRejected", "intermediate certificate not signed by root");
  }
  if (!p256_check(detail::cert_tbs(kCertTagB, platform.pk, platform.expiry, platform.role),
                  platform.sig, mid.pk)) {
    return ref_failure("EndorsementRejected", "platform certificate not signed by intermediate");
  }

  Bytes signed_region(evidence.begin(), evidence.begin() + static_cast<ptrdiff_t>(signed_len));
  if (!p256_check(signed_region, *sig, platform.pk)) {
    return ref_failure("InvalidEvidence", "platform signature invalid");
  }

  if (report_data->size() != expected_report_data.size() ||
      !std::equal(report_data->begin(), report_data->end(), expected_report_data.begin())) {
    return ref_failure("FreshnessMismatch", "report data does not match nonce");
  }

  cbor::Value claims = cbor::Value::map();
  claims.put("svn", cbor::Value::uns(*svn));
  claims.put("platform", cbor::Value::text("mocktee-b"));
  claims.put("root_key", cbor::Value::bytes(root.pk));
  claims.put("debug_flag", cbor::Value::boolean(*debug_flag));
  claims.put("measurement", cbor::Value::bytes(*measurement));
  claims.put("report_data", cbor::Value::bytes(*report_data));
  ReferenceVerdict v;
  v.claims = std::move(claims);
  return v;
}

inline ReferenceVerdict native_reference_verify(Platform platform,
                                                std::span<const uint8_t> evidence,
                                                std::span<const uint8_t> endorsement,
                                                std::span<const uint8_t> expected_report_data,
                                                uint64_t now) {
  return platform == Platform::kA
             ? native_reference_verify_a(evidence, endorsement, expected_report_data, now)
             : native_reference_verify_b(evidence, endorsement, expected_report_data, now);
}

// --- attester-side wrapping library ------------------------------------------------

inline Bytes wrap_for_trustmee(const Bytes& evidence, const std::vector<Bytes>& endorsements,
                               const std::string& component_ref, const std::string& policy_id,
                               const Bytes& nonce,
                               const std::optional<Bytes>& staple_component = std::nullopt,
                               cmw::WireFormat format = cmw::WireFormat::kCbor) {
  cmw::TrustMeeEvidence ev;
  ev.tee_evidence = evidence;
  ev.component_id = component_ref;
  ev.policy_id = policy_id;
  ev.expected_report_data = nonce;
  return cmw::encode_request(cmw::make_request(ev, endorsements, staple_component), format);
}

// --- appraisal policies over kit claims ---------------------------------------------

struct PolicyBundle {
  appraisal::AppraisalPolicy policy;
  std::vector<std::pair<std::string, std::vector<cbor::Value>>> reference_values;
};

// Policy pinning a component hash plus the platform's reference values.
inline PolicyBundle make_policy_a(const std::string& policy_id,
                                  const std::string& component_hash_hex,
                                  std::span<const uint8_t> root_key,
                                  std::span<const uint8_t> measurement, uint64_t min_tcb) {
  using appraisal::Category;
  using appraisal::Rule;
  using appraisal::RuleOp;
  PolicyBundle b;
  b.policy.policy_id = policy_id;
  std::string pfx = "ref." + policy_id + ".";
  b.policy.rules = {
      Rule{"/component/hash", RuleOp::kEq, pfx + "component_hash", Category::kInstanceIdentity},
      Rule{"/attester/platform", RuleOp::kEq, pfx + "platform", Category::kHardware},
      Rule{"/attester/root_key", RuleOp::kEq, pfx + "root_key", Category::kHardware},
      Rule{"/attester/measurement", RuleOp::kEq, pfx + "measurement", Category::kExecutables},
      Rule{"/attester/tcb_level", RuleOp::kGte, pfx + "min_tcb", Category::kConfiguration},
  };
  b.reference_values = {
      {pfx + "component_hash", {cbor::Value::text(component_hash_hex)}},
      {pfx + "platform", {cbor::Value::text("mocktee-a")}},
      {pfx + "root_key", {cbor::Value::bytes(root_key)}},
      {pfx + "measurement", {cbor::Value::bytes(measurement)}},
      {pfx + "min_tcb", {cbor::Value::uns(min_tcb)}},
  };
  return b;
}

inline PolicyBundle make_policy_b(const std::string& policy_id,
                                  const std::string& component_hash_hex,
                                  std::span<const uint8_t> root_key,
                                  std::span<const uint8_t> measurement, uint64_t min_svn) {
  using appraisal::Category;
  using appraisal::Rule;
  using appraisal::RuleOp;
  PolicyBundle b;
  b.policy.policy_id = policy_id;
  std::string pfx = "ref." + policy_id + ".";
  b.policy.rules = {
      Rule{"/component/hash", RuleOp::kEq, pfx + "component_hash", Category::kInstanceIdentity},
      Rule{"/attester/platform", RuleOp::kEq, pfx + "platform", Category::kHardware},
      Rule{"/attester/root_key", RuleOp::kEq, pfx + "root_key", Category::kHardware},
      Rule{"/attester/measurement", RuleOp::kEq, pfx + "measurement", Category::kExecutables},
      Rule{"/attester/svn", RuleOp::kGte, pfx + "min_svn", Category::kConfiguration},
      Rule{"/attester/debug_flag", RuleOp::kEq, pfx + "debug_off", Category::kConfiguration},
  };
  b.reference_values = {
      {pfx + "component_hash", {cbor::Value::text(component_hash_hex)}},
      {pfx + "platform", {cbor::Value::text("mocktee-b")}},
      {pfx + "root_key", {cbor::Value::bytes(root_key)}},
      {pfx + "measurement", {cbor::Value::bytes(measurement)}},
      {pfx + "min_svn", {cbor::Value::uns(min_svn)}},
      {pfx + "debug_off", {cbor::Value::boolean(false)}},
  };
  return b;
}

// --- fixture servers -----------------------------------------------------------------

// Serves opaque collateral blobs at /collateral/<name> with injectable delay.
class CollateralServer {
 public:
  CollateralServer() {
    server_.Get(R"(/collateral/(.+))", [this](const httplib::Request& req,
                                              httplib::Response& res) {
      hits_.fetch_add(1);
      if (delay_ms_ > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
      }
      auto it = blobs_.find(req.matches[1].str());
      if (it == blobs_.end()) {
        res.status = 404;
        return;
      }
      res.set_content(std::string(it->second.begin(), it->second.end()),
                      "application/octet-stream");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~CollateralServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  void put(const std::string& name, Bytes blob) { blobs_[name] = std::move(blob); }
  std::string url_for(const std::string& name) const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/collateral/" + name;
  }
  int hits() const { return hits_.load(); }
  void reset_hits() { hits_.store(0); }
  void set_delay_ms(int ms) { delay_ms_.store(ms); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::map<std::string, Bytes> blobs_;
  std::atomic<int> hits_{0};
  std::atomic<int> delay_ms_{0};
};

// Minimal registry speaking the resolver's wire protocol, with injectable
// delay and hit counting.
class RegistryServer {
 public:
  RegistryServer() {
    server_.Get(R"(/v1/components/(.+)/(.+))", [this](const httplib::Request& req,
                                                      httplib::Response& res) {
      hits_.fetch_add(1);
      if (delay_ms_ > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
      }
      auto it = blobs_.find(req.matches[1].str() + ":" + req.matches[2].str());
      if (it == blobs_.end()) {
        res.status = 404;
        return;
      }
      res.set_content(std::string(it->second.begin(), it->second.end()),
                      "application/octet-stream");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~RegistryServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  void put(const std::string& name, const std::string& tag, Bytes blob) {
    blobs_[name + ":" + tag] = std::move(blob);
  }
  void put_by_hash(const Bytes& blob) {
    blobs_["sha256:" + to_hex(crypto::sha256(identity::strip_signature(blob)))] = blob;
  }
  std::string host_port() const { return "127.0.0.1:" + std::to_string(port_); }
  std::string ref_for(const std::string& name, const std::string& tag) const {
    return "reg://" + host_port() + "/" + name + ":" + tag;
  }
  int hits() const { return hits_.load(); }
  void reset_hits() { hits_.store(0); }
  void set_delay_ms(int ms) { delay_ms_.store(ms); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::map<std::string, Bytes> blobs_;
  std::atomic<int> hits_{0};
  std::atomic<int> delay_ms_{0};
};

// --- fixture component set -------------------------------------------------------------

// Loads the built component binaries and produces signed variants; the full
// fixture suite for tests and benchmarks.
struct FixtureComponents {
  std::map<std::string, Bytes> binaries;

  const Bytes& get(const std::string& name) const {
    auto it = binaries.find(name);
    if (it == binaries.end()) fail(Errc::kNotFound, "no fixture component: " + name);
    return it->second;
  }
  std::string hash_hex(const std::string& name) const {
    return to_hex(crypto::sha256(identity::strip_signature(get(name))));
  }
  std::string hash_ref(const std::string& name) const { return "sha256:" + hash_hex(name); }
};

inline FixtureComponents build_fixture_components(const std::filesystem::path& components_dir,
                                                  std::span<const uint8_t> signing_key,
                                                  uint64_t expiry,
                                                  std::span<const uint8_t> untrusted_key,
                                                  uint64_t untrusted_expiry) {
  FixtureComponents out;
  for (const char* name :
       {"mocktee_a", "mocktee_b", "mocktee_b_hostcrypto", "infinite_loop", "memory_hog",
        "network_caller", "claims_bomb", "impersonator", "cache_probe", "calib_loop",
        "p256_diff"}) {
    Bytes raw = read_file(components_dir / (std::string(name) + ".wasm"));
    out.binaries[std::string(name) + ".signed"] =
        identity::sign_component(raw, signing_key, expiry);
    out.binaries[std::string(name) + ".badsigned"] =
        identity::sign_component(raw, untrusted_key, untrusted_expiry);
    out.binaries[name] = std::move(raw);
  }
  return out;
}

}  // namespace trustmee::mocktee

#endif  // TRUSTMEE_MOCKTEE_HPP_
