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

#include "trustmee/appraisal.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace trustmee {
namespace {

using appraisal::AppraisalPolicy;
using appraisal::Category;
using appraisal::Claims;
using appraisal::ComponentPin;
using appraisal::ReferenceValueStore;
using appraisal::Rule;
using appraisal::RuleOp;
using appraisal::Verdict;
using cbor::Value;

identity::ComponentIdentity fake_identity(uint8_t seed, bool signed_by = false) {
  identity::ComponentIdentity id;
  id.hash.fill(seed);
  if (signed_by) {
    std::array<uint8_t, 32> signer;
    signer.fill(static_cast<uint8_t>(seed + 1));
    id.signer = signer;
  }
  return id;
}

Claims sample_claims(uint8_t component_seed = 0xaa) {
  Value attester = Value::map();
  attester.put("measurement", Value::bytes(Bytes(32, 0x11)));
  attester.put("tcb_level", Value::uns(7));
  attester.put("platform", Value::text("mocktee-a"));
  return appraisal::make_claim_set(fake_identity(component_seed, true), std::move(attester));
}

ReferenceValueStore sample_refs(uint8_t component_seed = 0xaa) {
  ReferenceValueStore refs;
  refs.values["comp.hash"] = {Value::text(std::string(64, 'x'))};
  refs.values["comp.hash"] = {Value::text(to_hex(Bytes(32, component_seed)))};
  refs.values["good.measurement"] = {Value::bytes(Bytes(32, 0x11))};
  refs.values["min.tcb"] = {Value::uns(5)};
  refs.values["platforms"] = {Value::text("mocktee-a"), Value::text("mocktee-b")};
  return refs;
}

AppraisalPolicy sample_policy() {
  AppraisalPolicy p;
  p.policy_id = "policy-a";
  p.rules = {
      Rule{"/component/hash", RuleOp::kEq, "comp.hash", Category::kInstanceIdentity},
      Rule{"/attester/measurement", RuleOp::kEq, "good.measurement", Category::kExecutables},
      Rule{"/attester/tcb_level", RuleOp::kGte, "min.tcb", Category::kConfiguration},
      Rule{"/attester/platform", RuleOp::kInSet, "platforms", Category::kHardware},
  };
  return p;
}

TEST(AppraisalTest, ClaimPathLookup) {
  Claims c = sample_claims();
  ASSERT_NE(appraisal::claim_at(c, "/component/hash"), nullptr);
  EXPECT_EQ(appraisal::claim_at(c, "/component/hash")->as_text(),
            to_hex(Bytes(32, 0xaa)));
  ASSERT_NE(appraisal::claim_at(c, "/attester/tcb_level"), nullptr);
  EXPECT_EQ(appraisal::claim_at(c, "/attester/tcb_level")->as_uns(), 7u);
  EXPECT_EQ(appraisal::claim_at(c, "/attester/nope"), nullptr);
  EXPECT_EQ(appraisal::claim_at(c, "attester/tcb_level"), nullptr);
  EXPECT_EQ(appraisal::claim_at(c, "/attester/tcb_level/deeper"), nullptr);
  EXPECT_EQ(appraisal::claim_at(c, "/"), nullptr);
}

TEST(AppraisalTest, AllRulesPassYieldsAffirmingEverywhere) {
  Verdict v = appraisal::appraise(sample_claims(), sample_policy(), sample_refs());
  EXPECT_EQ(v.vector.instance_identity, appraisal::kTierAffirming);
  EXPECT_EQ(v.vector.executables, appraisal::kTierAffirming);
  EXPECT_EQ(v.vector.hardware, appraisal::kTierAffirming);
  EXPECT_EQ(v.vector.configuration, appraisal::kTierAffirming);
  EXPECT_EQ(v.vector.overall(), appraisal::kTierAffirming);
  EXPECT_TRUE(v.affirming());
  for (const auto& o : v.outcomes) EXPECT_TRUE(o.passed) << o.rule.path;
}

TEST(AppraisalTest, WrongComponentHashContraindicatesIdentity) {
  // Claims produced under a different component (impersonation defense).
  Claims other = sample_claims(0xbb);
  Verdict v = appraisal::appraise(other, sample_policy(), sample_refs(0xaa));
  EXPECT_EQ(v.vector.instance_identity, appraisal::kTierContraindicated);
  EXPECT_EQ(v.vector.overall(), appraisal::kTierContraindicated);
  EXPECT_FALSE(v.affirming());
  // Other categories still evaluate and pass: no short-circuit.
  EXPECT_EQ(v.vector.executables, appraisal::kTierAffirming);
  ASSERT_EQ(v.outcomes.size(), 4u);
  EXPECT_FALSE(v.outcomes[0].passed);
  EXPECT_TRUE(v.outcomes[1].passed);
}

TEST(AppraisalTest, MissingClaimFailsRule) {
  Claims c = sample_claims();
  AppraisalPolicy p = sample_policy();
  p.rules.push_back(Rule{"/attester/svn", RuleOp::kGte, "min.tcb", Category::kConfiguration});
  Verdict v = appraisal::appraise(c, p, sample_refs());
  EXPECT_EQ(v.vector.configuration, appraisal::kTierContraindicated);
  EXPECT_EQ(v.outcomes.back().reason, "claim missing");
}

TEST(AppraisalTest, NullClaimCountsAsMissing) {
  // An unsigned component exposes signer = null; pinning the signer fails.
  Value attester = Value::map();
  Claims c = appraisal::make_claim_set(fake_identity(0xaa, false), std::move(attester));
  ReferenceValueStore refs;
  refs.values["signer"] = {Value::text(std::string(64, 'a'))};
  AppraisalPolicy p;
  p.policy_id = "signer-pinned";
  p.rules = {Rule{"/component/signer", RuleOp::kEq, "signer", Category::kInstanceIdentity}};
  Verdict v = appraisal::appraise(c, p, refs);
  EXPECT_FALSE(v.outcomes[0].passed);
  EXPECT_EQ(v.vector.overall(), appraisal::kTierContraindicated);
}

TEST(AppraisalTest, UnknownReferenceKeyFailsClosed) {
  AppraisalPolicy p = sample_policy();
  p.rules[1].reference_key = "gone";
  Verdict v = appraisal::appraise(sample_claims(), p, sample_refs());
  EXPECT_EQ(v.vector.executables, appraisal::kTierContraindicated);
  EXPECT_EQ(v.outcomes[1].reason, "reference key unknown");
}

TEST(AppraisalTest, RuleOrderDoesNotAffectVector) {
  AppraisalPolicy p = sample_policy();
  Claims claims = sample_claims(0xbb);  // identity rule fails
  Verdict base = appraisal::appraise(claims, p, sample_refs());
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(p.rules.begin(), p.rules.end(), rng);
    Verdict v = appraisal::appraise(claims, p, sample_refs());
    EXPECT_EQ(v.vector, base.vector);
    EXPECT_EQ(v.outcomes.size(), base.outcomes.size());
  }
}

TEST(AppraisalTest, GteSemantics) {
  ReferenceValueStore refs;
  refs.values["min"] = {Value::integer(-2)};
  auto check = [&](Value claim, bool expect) {
    Claims c = cbor::Value::map();
    cbor::Value att = cbor::Value::map();
    att.put("v", std::move(claim));
    c.put("attester", std::move(att));
    Rule r{"/attester/v", RuleOp::kGte, "min", Category::kConfiguration};
    return appraisal::evaluate_rule(c, r, refs, 0).passed == expect;
  };
  EXPECT_TRUE(check(Value::integer(-2), true));
  EXPECT_TRUE(check(Value::integer(-1), true));
  EXPECT_TRUE(check(Value::integer(-3), false));
  EXPECT_TRUE(check(Value::uns(0), true));
  EXPECT_TRUE(check(Value::uns(UINT64_MAX), true));
  EXPECT_TRUE(check(Value::text("7"), false));  // non-numeric fails closed
}

TEST(AppraisalTest, ValidationRequiresComponentPin) {
  ReferenceValueStore refs = sample_refs();
  AppraisalPolicy p;
  p.policy_id = "unpinned";
  p.rules = {Rule{"/attester/measurement", RuleOp::kEq, "good.measurement",
                  Category::kExecutables}};
  try {
    appraisal::validate_policy(p, refs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kValidationFailed);
  }
  // A `present` rule on the pin path is not a pin.
  p.rules.push_back(Rule{"/component/hash", RuleOp::kPresent, "", Category::kInstanceIdentity});
  EXPECT_THROW(appraisal::validate_policy(p, refs), Error);
  p.rules.push_back(Rule{"/component/hash", RuleOp::kEq, "comp.hash",
                         Category::kInstanceIdentity});
  EXPECT_NO_THROW(appraisal::validate_policy(p, refs));
}

TEST(AppraisalTest, ValidationRequiresResolvableReferenceKeys) {
  ReferenceValueStore refs = sample_refs();
  AppraisalPolicy p = sample_policy();
  p.rules.push_back(Rule{"/attester/extra", RuleOp::kEq, "missing.key",
                         Category::kConfiguration});
  try {
    appraisal::validate_policy(p, refs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kValidationFailed);
    EXPECT_NE(e.detail().find("missing.key"), std::string::npos);
  }
}

TEST(AppraisalTest, MigrationRewritesPathsAndPins) {
  AppraisalPolicy legacy;
  legacy.policy_id = "legacy-1";
  legacy.rules = {
      Rule{"/measurement", RuleOp::kEq, "good.measurement", Category::kExecutables},
      Rule{"/tcb_level", RuleOp::kGte, "min.tcb", Category::kConfiguration},
  };
  ComponentPin pin;
  std::array<uint8_t, 32> hash;
  hash.fill(0xcd);
  pin.hash = hash;
  auto migrated = appraisal::migrate_policy(legacy, pin);
  ASSERT_EQ(migrated.policy.rules.size(), 3u);
  EXPECT_EQ(migrated.policy.rules[0].path, "/component/hash");
  EXPECT_EQ(migrated.policy.rules[1].path, "/attester/measurement");
  EXPECT_EQ(migrated.policy.rules[2].path, "/attester/tcb_level");
  ASSERT_EQ(migrated.reference_values.size(), 1u);
  EXPECT_EQ(migrated.reference_values[0].second.as_text(), to_hex(hash));

  // The migrated policy validates once its reference values are installed.
  ReferenceValueStore refs = sample_refs();
  refs.values[migrated.reference_values[0].first] = {migrated.reference_values[0].second};
  EXPECT_NO_THROW(appraisal::validate_policy(migrated.policy, refs));
}

TEST(AppraisalTest, MigrationOfEmptyPolicyWithSignerPin) {
  AppraisalPolicy legacy;
  legacy.policy_id = "legacy-empty";
  ComponentPin pin;
  std::array<uint8_t, 32> signer;
  signer.fill(0x77);
  pin.signer = signer;
  auto migrated = appraisal::migrate_policy(legacy, pin);
  ASSERT_EQ(migrated.policy.rules.size(), 1u);
  EXPECT_EQ(migrated.policy.rules[0].path, "/component/signer");
  EXPECT_EQ(migrated.policy.rules[0].op, RuleOp::kEq);
}

TEST(AppraisalTest, MigrationWithoutPinRejected) {
  AppraisalPolicy legacy;
  legacy.policy_id = "nopin";
  try {
    appraisal::migrate_policy(legacy, ComponentPin{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnpinnablePolicy);
  }
}

TEST(AppraisalTest, PolicyJsonRoundTrip) {
  AppraisalPolicy p = sample_policy();
  nlohmann::json j = appraisal::policy_to_json(p);
  AppraisalPolicy back = appraisal::policy_from_json(j);
  EXPECT_EQ(back.policy_id, p.policy_id);
  EXPECT_EQ(back.rules, p.rules);

  EXPECT_THROW(appraisal::parse_policy("not json"), Error);
  EXPECT_THROW(appraisal::parse_policy(R"({"rules": []})"), Error);
  EXPECT_THROW(appraisal::parse_policy(
                   R"({"policy_id":"x","rules":[{"path":"/a","op":"nope","category":"hardware"}]})"),
               Error);
}

TEST(AppraisalTest, ReferenceValueJsonForms) {
  nlohmann::json j = {
      {"text", "abc"},
      {"num", 7},
      {"neg", -3},
      {"flag", true},
      {"blob", {{"hex", "00ff"}}},
      {"set", nlohmann::json::array({"a", "b"})},
  };
  auto parsed = appraisal::reference_values_from_json(j);
  ReferenceValueStore refs;
  for (auto& [k, v] : parsed) refs.values[k] = v;
  EXPECT_EQ(refs.find("text")->at(0), Value::text("abc"));
  EXPECT_EQ(refs.find("num")->at(0), Value::uns(7));
  EXPECT_EQ(refs.find("neg")->at(0), Value::integer(-3));
  EXPECT_EQ(refs.find("flag")->at(0), Value::boolean(true));
  EXPECT_EQ(refs.find("blob")->at(0), Value::bytes(from_hex("00ff")));
  EXPECT_EQ(refs.find("set")->size(), 2u);
}

TEST(AppraisalTest, SelectionDependsOnlyOnPolicyId) {
  // Crafted "selector" claims cannot change which rules run.
  Claims a = sample_claims();
  Claims crafted = sample_claims();
  // Overwrite the attester branch wholesale with selector-looking content.
  Value att = Value::map();
  att.put("use_policy", Value::text("weaker-policy"));
  att.put("measurement", Value::bytes(Bytes(32, 0x11)));
  att.put("tcb_level", Value::uns(7));
  att.put("platform", Value::text("mocktee-a"));
  crafted.put("attester", std::move(att));

  AppraisalPolicy p = sample_policy();
  Verdict va = appraisal::appraise(a, p, sample_refs());
  Verdict vb = appraisal::appraise(crafted, p, sample_refs());
  ASSERT_EQ(va.outcomes.size(), vb.outcomes.size());
  for (size_t i = 0; i < va.outcomes.size(); ++i) {
    EXPECT_EQ(va.outcomes[i].rule, vb.outcomes[i].rule);
  }
  // Identical claims under a different policy id can differ in verdict.
  AppraisalPolicy strict = sample_policy();
  strict.policy_id = "policy-strict";
  ReferenceValueStore refs = sample_refs();
  refs.values["min.tcb"] = {Value::uns(9)};
  Verdict vs = appraisal::appraise(a, strict, refs);
  EXPECT_NE(vs.vector, va.vector);
}

}  // namespace
}  // namespace trustmee
