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
// Appraisal: merges host-emitted component-identity claims with the
// component's attester claims, then evaluates a declarative rule list
// against reference values. Fail-closed throughout: missing claims, missing
// reference keys, and unknown policies can never yield an affirming verdict.
// Policy selection is a function of the request's policy id alone.

#ifndef TRUSTMEE_APPRAISAL_HPP_
#define TRUSTMEE_APPRAISAL_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"
#include "trustmee/error.hpp"
#include "trustmee/identity.hpp"

namespace trustmee::appraisal {

using Claims = cbor::Value;

// Fixed top-level claim layout; attester claims nest under "/attester".
inline Claims make_claim_set(const identity::ComponentIdentity& id, cbor::Value attester) {
  Claims c = cbor::Value::map();
  cbor::Value component = cbor::Value::map();
  component.put("hash", cbor::Value::text(to_hex(id.hash)));
  if (id.signer.has_value()) {
    component.put("signer", cbor::Value::text(to_hex(*id.signer)));
  } else {
    component.put("signer", cbor::Value::null());
  }
  c.put("component", std::move(component));
  if (!attester.is_map()) attester = cbor::Value::map();
  c.put("attester", std::move(attester));
  return c;
}

// Slash-separated pointer lookup, e.g. "/attester/measurement".
inline const cbor::Value* claim_at(const Claims& claims, std::string_view path) {
  if (path.empty() || path.front() != '/') return nullptr;
  const cbor::Value* cur = &claims;
  size_t pos = 1;
  while (pos <= path.size()) {
    size_t next = path.find('/', pos);
    std::string_view seg = path.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                                           : next - pos);
    if (seg.empty() || !cur->is_map()) return nullptr;
    cur = cur->get(seg);
    if (!cur) return nullptr;
    if (next == std::string_view::npos) return cur;
    pos = next + 1;
  }
  return nullptr;
}

enum class RuleOp { kEq, kInSet, kGte, kPresent };
enum class Category { kInstanceIdentity, kExecutables, kHardware, kConfiguration };

inline const char* op_name(RuleOp op) {
  switch (op) {
    case RuleOp::kEq: return "eq";
    case RuleOp::kInSet: return "in_set";
    case RuleOp::kGte: return "gte";
    case RuleOp::kPresent: return "present";
  }
  return "?";
}

inline RuleOp op_from_name(std::string_view s) {
  if (s == "eq") return RuleOp::kEq;
  if (s == "in_set") return RuleOp::kInSet;
  if (s == "gte") return RuleOp::kGte;
  if (s == "present") return RuleOp::kPresent;
  fail(Errc::kValidationFailed, "unknown rule op: " + std::string(s));
}

inline const char* category_name(Category c) {
  switch (c) {
    case Category::kInstanceIdentity: return "instance_identity";
    case Category::kExecutables: return "executables";
    case Category::kHardware: return "hardware";
    case Category::kConfiguration: return "configuration";
  }
  return "?";
}

inline Category category_from_name(std::string_view s) {
  if (s == "instance_identity") return Category::kInstanceIdentity;
  if (s == "executables") return Category::kExecutables;
  if (s == "hardware") return Category::kHardware;
  if (s == "configuration") return Category::kConfiguration;
  fail(Errc::kValidationFailed, "unknown category: " + std::string(s));
}

struct Rule {
  std::string path;
  RuleOp op = RuleOp::kEq;
  std::string reference_key;
  Category category = Category::kConfiguration;

  bool operator==(const Rule&) const = default;
};

struct AppraisalPolicy {
  std::string policy_id;
  std::vector<Rule> rules;
};

struct ReferenceValueStore {
  // A key holds one value (eq/gte) or a value set (in_set).
  std::map<std::string, std::vector<cbor::Value>> values;

  const std::vector<cbor::Value>* find(std::string_view key) const {
    auto it = values.find(std::string(key));
    return it == values.end() ? nullptr : &it->second;
  }
};

// Trust tiers follow the attestation-result conventions.
inline constexpr uint8_t kTierNone = 0;
inline constexpr uint8_t kTierAffirming = 2;
inline constexpr uint8_t kTierWarning = 32;
inline constexpr uint8_t kTierContraindicated = 96;

struct TrustVector {
  uint8_t instance_identity = kTierNone;
  uint8_t executables = kTierNone;
  uint8_t hardware = kTierNone;
  uint8_t configuration = kTierNone;

  uint8_t& at(Category c) {
    switch (c) {
      case Category::kInstanceIdentity: return instance_identity;
      case Category::kExecutables: return executables;
      case Category::kHardware: return hardware;
      case Category::kConfiguration: return configuration;
    }
    return configuration;
  }
  uint8_t overall() const {
    uint8_t worst = kTierNone;
    for (uint8_t t : {instance_identity, executables, hardware, configuration}) {
      if (t > worst) worst = t;
    }
    return worst;
  }
  bool operator==(const TrustVector&) const = default;
};

struct RuleOutcome {
  size_t index = 0;
  Rule rule;
  bool passed = false;
  std::string reason;
};

struct Verdict {
  TrustVector vector;
  std::vector<RuleOutcome> outcomes;

  bool affirming() const { return vector.overall() == kTierAffirming; }
};

namespace detail {

// Ordering across unsigned/negative integer claims.
inline std::optional<int> int_cmp(const cbor::Value& a, const cbor::Value& b) {
  if (!a.is_int() || !b.is_int()) return std::nullopt;
  bool an = a.type() == cbor::Type::kNegative;
  bool bn = b.type() == cbor::Type::kNegative;
  if (an != bn) return an ? -1 : 1;
  uint64_t ar = an ? static_cast<uint64_t>(-(a.as_int() + 1)) : a.as_uns();
  uint64_t br = bn ? static_cast<uint64_t>(-(b.as_int() + 1)) : b.as_uns();
  if (ar == br) return 0;
  bool less = an ? ar > br : ar < br;
  return less ? -1 : 1;
}

}  // namespace detail

inline RuleOutcome evaluate_rule(const Claims& claims, const Rule& rule,
                                 const ReferenceValueStore& refs, size_t index) {
  RuleOutcome out;
  out.index = index;
  out.rule = rule;
  const cbor::Value* claim = claim_at(claims, rule.path);
  if (rule.op == RuleOp::kPresent) {
    out.passed = claim != nullptr && !claim->is_null();
    if (!out.passed) out.reason = "claim missing";
    return out;
  }
  if (!claim || claim->is_null()) {
    out.reason = "claim missing";
    return out;
  }
  const std::vector<cbor::Value>* ref = refs.find(rule.reference_key);
  if (!ref || ref->empty()) {
    out.reason = "reference key unknown";
    return out;
  }
  switch (rule.op) {
    case RuleOp::kEq:
      if (ref->size() != 1) {
        out.reason = "eq requires single reference value";
      } else if (*claim == (*ref)[0]) {
        out.passed = true;
      } else {
        out.reason = "value mismatch";
      }
      break;
    case RuleOp::kInSet: {
      for (const auto& v : *ref) {
        if (*claim == v) {
          out.passed = true;
          break;
        }
      }
      if (!out.passed) out.reason = "value not in reference set";
      break;
    }
    case RuleOp::kGte: {
      if (ref->size() != 1) {
        out.reason = "gte requires single reference value";
        break;
      }
      auto cmp = detail::int_cmp(*claim, (*ref)[0]);
      if (!cmp.has_value()) {
        out.reason = "non-numeric operand";
      } else if (*cmp >= 0) {
        out.passed = true;
      } else {
        out.reason = "value below reference";
      }
      break;
    }
    case RuleOp::kPresent:
      break;  // handled above
  }
  return out;
}

// Evaluates every rule (no short-circuit) and folds outcomes into the trust
// vector: any failure forces the rule's category to contraindicated.
inline Verdict appraise(const Claims& claims, const AppraisalPolicy& policy,
                        const ReferenceValueStore& refs) {
  Verdict verdict;
  bool category_pass[4] = {false, false, false, false};
  bool category_fail[4] = {false, false, false, false};
  for (size_t i = 0; i < policy.rules.size(); ++i) {
    RuleOutcome out = evaluate_rule(claims, policy.rules[i], refs, i);
    int c = static_cast<int>(out.rule.category);
    (out.passed ? category_pass : category_fail)[c] = true;
    verdict.outcomes.push_back(std::move(out));
  }
  for (int c = 0; c < 4; ++c) {
    uint8_t& tier = verdict.vector.at(static_cast<Category>(c));
    if (category_fail[c]) {
      tier = kTierContraindicated;
    } else if (category_pass[c]) {
      tier = kTierAffirming;
    }
  }
  return verdict;
}

inline bool rule_is_component_pin(const Rule& r) {
  return (r.path == "/component/hash" || r.path == "/component/signer") &&
         (r.op == RuleOp::kEq || r.op == RuleOp::kInSet);
}

// Install-time validation: a component pin must exist and every referenced
// key must resolve, so appraisals cannot silently run against nothing.
inline void validate_policy(const AppraisalPolicy& policy, const ReferenceValueStore& refs) {
  if (policy.policy_id.empty()) fail(Errc::kValidationFailed, "policy_id must be non-empty");
  if (policy.rules.empty()) fail(Errc::kValidationFailed, "policy requires at least one rule");
  bool pinned = false;
  for (const auto& r : policy.rules) {
    if (r.path.empty() || r.path.front() != '/') {
      fail(Errc::kValidationFailed, "rule path must start with '/': " + r.path);
    }
    if (rule_is_component_pin(r)) pinned = true;
    if (r.op != RuleOp::kPresent && refs.find(r.reference_key) == nullptr) {
      fail(Errc::kValidationFailed, "unresolvable reference key: " + r.reference_key);
    }
  }
  if (!pinned) {
    fail(Errc::kValidationFailed,
         "policy must pin /component/hash or /component/signer with eq or in_set");
  }
}

// --- migration of flat-path policies ------------------------------------------

struct ComponentPin {
  std::optional<std::array<uint8_t, 32>> hash;
  std::optional<std::array<uint8_t, 32>> signer;
};

struct MigratedPolicy {
  AppraisalPolicy policy;
  std::vector<std::pair<std::string, cbor::Value>> reference_values;
};

// Rewrites legacy flat claim paths under "/attester" and prepends component
// pin rules, emitting the reference values those pins need.
inline MigratedPolicy migrate_policy(const AppraisalPolicy& legacy, const ComponentPin& pin) {
  if (!pin.hash.has_value() && !pin.signer.has_value()) {
    fail(Errc::kUnpinnablePolicy, "migration requires a component hash or signer pin");
  }
  MigratedPolicy out;
  out.policy.policy_id = legacy.policy_id;
  if (pin.hash.has_value()) {
    std::string key = "pin." + legacy.policy_id + ".component_hash";
    out.policy.rules.push_back(
        Rule{"/component/hash", RuleOp::kEq, key, Category::kInstanceIdentity});
    out.reference_values.emplace_back(key, cbor::Value::text(to_hex(*pin.hash)));
  }
  if (pin.signer.has_value()) {
    std::string key = "pin." + legacy.policy_id + ".component_signer";
    out.policy.rules.push_back(
        Rule{"/component/signer", RuleOp::kEq, key, Category::kInstanceIdentity});
    out.reference_values.emplace_back(key, cbor::Value::text(to_hex(*pin.signer)));
  }
  for (const Rule& r : legacy.rules) {
    Rule moved = r;
    moved.path = "/attester" + r.path;
    out.policy.rules.push_back(std::move(moved));
  }
  return out;
}

// --- JSON forms ---------------------------------------------------------------

inline cbor::Value reference_value_from_json(const nlohmann::json& j) {
  if (j.is_string()) return cbor::Value::text(j.get<std::string>());
  if (j.is_boolean()) return cbor::Value::boolean(j.get<bool>());
  if (j.is_number_unsigned()) return cbor::Value::uns(j.get<uint64_t>());
  if (j.is_number_integer()) return cbor::Value::integer(j.get<int64_t>());
  if (j.is_object() && j.contains("hex")) {
    return cbor::Value::bytes(from_hex(j.at("hex").get<std::string>()));
  }
  fail(Errc::kValidationFailed, "unsupported reference value form: " + j.dump());
}

inline nlohmann::json reference_value_to_json(const cbor::Value& v) {
  switch (v.type()) {
    case cbor::Type::kText: return v.as_text();
    case cbor::Type::kBool: return v.as_bool();
    case cbor::Type::kUnsigned: return v.as_uns();
    case cbor::Type::kNegative: return v.as_int();
    case cbor::Type::kBytes: return nlohmann::json{{"hex", to_hex(v.as_bytes())}};
    default: fail(Errc::kValidationFailed, "unsupported reference value type");
  }
}

inline std::vector<std::pair<std::string, std::vector<cbor::Value>>> reference_values_from_json(
    const nlohmann::json& j) {
  if (!j.is_object()) fail(Errc::kValidationFailed, "reference values must be an object");
  std::vector<std::pair<std::string, std::vector<cbor::Value>>> out;
  for (const auto& [key, val] : j.items()) {
    std::vector<cbor::Value> values;
    if (val.is_array()) {
      for (const auto& e : val) values.push_back(reference_value_from_json(e));
    } else {
      values.push_back(reference_value_from_json(val));
    }
    if (values.empty()) fail(Errc::kValidationFailed, "empty reference set: " + key);
    out.emplace_back(key, std::move(values));
  }
  return out;
}

inline AppraisalPolicy policy_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(Errc::kValidationFailed, "policy must be a JSON object");
  AppraisalPolicy p;
  if (!j.contains("policy_id") || !j.at("policy_id").is_string()) {
    fail(Errc::kValidationFailed, "policy requires policy_id");
  }
  p.policy_id = j.at("policy_id").get<std::string>();
  if (!j.contains("rules") || !j.at("rules").is_array()) {
    fail(Errc::kValidationFailed, "policy requires rules array");
  }
  for (const auto& rj : j.at("rules")) {
    Rule r;
    r.path = rj.at("path").get<std::string>();
    r.op = op_from_name(rj.at("op").get<std::string>());
    if (rj.contains("ref")) r.reference_key = rj.at("ref").get<std::string>();
    r.category = category_from_name(rj.at("category").get<std::string>());
    p.rules.push_back(std::move(r));
  }
  return p;
}

inline nlohmann::json policy_to_json(const AppraisalPolicy& p) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : p.rules) {
    nlohmann::json rj{{"path", r.path}, {"op", op_name(r.op)},
                      {"category", category_name(r.category)}};
    if (!r.reference_key.empty()) rj["ref"] = r.reference_key;
    rules.push_back(std::move(rj));
  }
  return nlohmann::json{{"policy_id", p.policy_id}, {"rules", std::move(rules)}};
}

inline AppraisalPolicy parse_policy(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::kValidationFailed, "policy is not valid JSON");
  return policy_from_json(j);
}

}  // namespace trustmee::appraisal

#endif  // TRUSTMEE_APPRAISAL_HPP_
