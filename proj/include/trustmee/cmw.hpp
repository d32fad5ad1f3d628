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
// Attestation request envelope. A request is a CMW collection: a map from
// text labels to typed items. This profile fixes the label set:
//
//   "evidence"        exactly one; TrustMee evidence (CBOR map ev/cid/pid/erd)
//   "endorsement.<n>" zero or more, labels dense from 1..k; opaque bytes
//   "component"       zero or one; raw verification-component bytes
//
// Wire formats: canonical CBOR (map label -> [media_type, payload]) and JSON
// (object label -> {"mt": ..., "p": base64}).

#ifndef TRUSTMEE_CMW_HPP_
#define TRUSTMEE_CMW_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "trustmee/bytes.hpp"
#include "trustmee/cbor.hpp"
#include "trustmee/error.hpp"

namespace trustmee::cmw {

inline constexpr std::string_view kMediaTypeCollectionCbor =
    "application/vnd.trustmee.cmw+cbor";
inline constexpr std::string_view kMediaTypeCollectionJson =
    "application/vnd.trustmee.cmw+json";
inline constexpr std::string_view kMediaTypeEvidence =
    "application/vnd.trustmee.evidence+cbor";
inline constexpr std::string_view kMediaTypeEndorsement =
    "application/vnd.trustmee.endorsement";
inline constexpr std::string_view kMediaTypeComponent =
    "application/vnd.trustmee.component";
inline constexpr std::string_view kMediaTypeResult = "application/vnd.trustmee.ear+cbor";

inline constexpr size_t kMaxReportDataLen = 64;
inline constexpr size_t kDefaultMaxRequestBytes = 64ull << 20;

enum class WireFormat { kCbor, kJson };

struct CmwItem {
  std::string media_type;
  Bytes payload;

  bool operator==(const CmwItem&) const = default;
};

struct TrustMeeEvidence {
  Bytes tee_evidence;
  std::string component_id;
  std::string policy_id;
  Bytes expected_report_data;

  bool operator==(const TrustMeeEvidence&) const = default;
};

struct CmwCollection {
  std::map<std::string, CmwItem> items;

  bool operator==(const CmwCollection&) const = default;
};

struct ExtractedRequest {
  TrustMeeEvidence evidence;
  std::vector<Bytes> endorsements;
  std::optional<Bytes> component;
};

namespace detail {

inline bool is_endorsement_label(std::string_view label, uint64_t* index) {
  constexpr std::string_view prefix = "endorsement.";
  if (!label.starts_with(prefix)) return false;
  std::string_view num = label.substr(prefix.size());
  if (num.empty() || num.size() > 9) return false;
  if (num[0] == '0') return false;
  uint64_t v = 0;
  for (char c : num) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<uint64_t>(c - '0');
  }
  *index = v;
  return true;
}

inline bool is_ascii(std::string_view s) {
  for (char c : s) {
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) > 0x7e) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

inline void validate(const CmwCollection& c) {
  size_t evidence_count = 0;
  bool has_component = false;
  std::vector<uint64_t> endorsement_indices;
  for (const auto& [label, item] : c.items) {
    if (item.media_type.empty() || !detail::is_ascii(item.media_type)) {
      fail(Errc::kInvalidCollection, "item media type must be non-empty ASCII: " + label);
    }
    if (item.payload.empty()) {
      fail(Errc::kInvalidCollection, "empty payload not permitted: " + label);
    }
    uint64_t idx = 0;
    if (label == "evidence") {
      ++evidence_count;
    } else if (label == "component") {
      has_component = true;
    } else if (detail::is_endorsement_label(label, &idx)) {
      endorsement_indices.push_back(idx);
    } else {
      fail(Errc::kInvalidCollection, "label outside profile: " + label);
    }
  }
  (void)has_component;
  if (evidence_count != 1) fail(Errc::kMissingEvidence, "collection requires exactly one evidence item");
  std::sort(endorsement_indices.begin(), endorsement_indices.end());
  for (size_t i = 0; i < endorsement_indices.size(); ++i) {
    if (endorsement_indices[i] != i + 1) {
      fail(Errc::kInvalidCollection, "endorsement labels must be dense from 1");
    }
  }
}

// --- TrustMee evidence item ------------------------------------------------

inline void validate(const TrustMeeEvidence& ev) {
  if (ev.component_id.empty()) fail(Errc::kInvalidCollection, "component_id empty");
  if (ev.policy_id.empty()) fail(Errc::kInvalidCollection, "policy_id empty");
  if (ev.expected_report_data.size() > kMaxReportDataLen) {
    fail(Errc::kInvalidCollection, "expected_report_data exceeds 64 bytes");
  }
}

inline Bytes encode_evidence(const TrustMeeEvidence& ev) {
  validate(ev);
  cbor::Value m = cbor::Value::map();
  m.put("ev", cbor::Value::bytes(ev.tee_evidence));
  m.put("cid", cbor::Value::text(ev.component_id));
  m.put("pid", cbor::Value::text(ev.policy_id));
  m.put("erd", cbor::Value::bytes(ev.expected_report_data));
  return cbor::encode(m);
}

inline TrustMeeEvidence decode_evidence(std::span<const uint8_t> raw) {
  cbor::Value m;
  try {
    m = cbor::decode(raw);
  } catch (const Error& e) {
    fail(Errc::kMalformedEvidenceItem, e.detail());
  }
  if (!m.is_map()) fail(Errc::kMalformedEvidenceItem, "evidence item must be a map");
  const cbor::Value* ev = m.get("ev");
  const cbor::Value* cid = m.get("cid");
  const cbor::Value* pid = m.get("pid");
  const cbor::Value* erd = m.get("erd");
  if (!ev || !cid || !pid || !erd || m.size() != 4) {
    fail(Errc::kMalformedEvidenceItem, "evidence item requires keys ev/cid/pid/erd");
  }
  TrustMeeEvidence out;
  try {
    out.tee_evidence = ev->as_bytes();
    out.component_id = cid->as_text();
    out.policy_id = pid->as_text();
    out.expected_report_data = erd->as_bytes();
  } catch (const Error& e) {
    fail(Errc::kMalformedEvidenceItem, e.detail());
  }
  try {
    validate(out);
  } catch (const Error& e) {
    fail(Errc::kMalformedEvidenceItem, e.detail());
  }
  return out;
}

// --- collection builders ---------------------------------------------------

inline CmwCollection make_request(const TrustMeeEvidence& ev,
                                  const std::vector<Bytes>& endorsements,
                                  const std::optional<Bytes>& component = std::nullopt) {
  CmwCollection c;
  c.items["evidence"] = CmwItem{std::string(kMediaTypeEvidence), encode_evidence(ev)};
  for (size_t i = 0; i < endorsements.size(); ++i) {
    c.items["endorsement." + std::to_string(i + 1)] =
        CmwItem{std::string(kMediaTypeEndorsement), endorsements[i]};
  }
  if (component.has_value()) {
    c.items["component"] = CmwItem{std::string(kMediaTypeComponent), *component};
  }
  return c;
}

// --- encode ----------------------------------------------------------------

inline Bytes encode_request(const CmwCollection& c, WireFormat format) {
  validate(c);
  if (format == WireFormat::kCbor) {
    cbor::Value m = cbor::Value::map();
    for (const auto& [label, item] : c.items) {
      cbor::Value rec = cbor::Value::array();
      rec.push(cbor::Value::text(item.media_type));
      rec.push(cbor::Value::bytes(item.payload));
      m.put(label, std::move(rec));
    }
    return cbor::encode(m);
  }
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [label, item] : c.items) {
    j[label] = {{"mt", item.media_type}, {"p", base64_encode(item.payload)}};
  }
  std::string s = j.dump();
  return Bytes(s.begin(), s.end());
}

// --- decode ----------------------------------------------------------------

namespace detail {

// Strict SAX handler for the fixed two-level request shape; rejects duplicate
// labels, which the default DOM parser would silently merge.
class RequestJsonSax {
 public:
  explicit RequestJsonSax(CmwCollection* out) : out_(out) {}

  bool null() { return unexpected(); }
  bool boolean(bool) { return unexpected(); }
  bool number_integer(int64_t) { return unexpected(); }
  bool number_unsigned(uint64_t) { return unexpected(); }
  bool number_float(double, const std::string&) { return unexpected(); }
  bool binary(nlohmann::json::binary_t&) { return unexpected(); }

  bool start_object(size_t) {
    ++depth_;
    if (depth_ > 2) return fail_with("object nested too deeply");
    return true;
  }
  bool end_object() {
    if (depth_ == 2) {
      if (!saw_mt_ || !saw_p_) return fail_with("item requires mt and p");
      saw_mt_ = saw_p_ = false;
    }
    --depth_;
    return true;
  }
  bool start_array(size_t) { return unexpected(); }
  bool end_array() { return unexpected(); }

  bool key(std::string& k) {
    if (depth_ == 1) {
      if (out_->items.count(k) > 0) {
        code_ = Errc::kDuplicateLabel;
        detail_ = "duplicate label: " + k;
        return false;
      }
      current_ = k;
      out_->items[k] = CmwItem{};
      saw_mt_ = saw_p_ = false;
      return true;
    }
    if (depth_ == 2) {
      field_ = k;
      if (k != "mt" && k != "p") return fail_with("unknown item field: " + k);
      return true;
    }
    return fail_with("unexpected key depth");
  }

  bool string(std::string& s) {
    if (depth_ != 2) return fail_with("string outside item");
    CmwItem& item = out_->items[current_];
    if (field_ == "mt") {
      if (saw_mt_) return fail_with("duplicate mt");
      item.media_type = s;
      saw_mt_ = true;
      return true;
    }
    if (saw_p_) return fail_with("duplicate p");
    try {
      item.payload = base64_decode(s);
    } catch (const Error&) {
      return fail_with("payload is not valid base64");
    }
    saw_p_ = true;
    return true;
  }

  bool parse_error(size_t, const std::string&, const nlohmann::json::exception& ex) {
    if (detail_.empty()) detail_ = ex.what();
    return false;
  }

  Errc code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  bool unexpected() { return fail_with("value outside request shape"); }
  bool fail_with(std::string d) {
    if (detail_.empty()) detail_ = std::move(d);
    return false;
  }

  CmwCollection* out_;
  int depth_ = 0;
  std::string current_;
  std::string field_;
  bool saw_mt_ = false;
  bool saw_p_ = false;
  Errc code_ = Errc::kMalformed;
  std::string detail_;
};

}  // namespace detail

inline CmwCollection decode_request(std::span<const uint8_t> raw, WireFormat format,
                                    size_t max_bytes = kDefaultMaxRequestBytes) {
  if (raw.size() > max_bytes) fail(Errc::kOversizedInput, "request exceeds size limit");
  CmwCollection c;
  if (format == WireFormat::kCbor) {
    cbor::Value m;
    try {
      m = cbor::decode(raw);
    } catch (const Error& e) {
      if (e.detail() == "duplicate map key") fail(Errc::kDuplicateLabel, e.detail());
      fail(Errc::kMalformed, e.detail());
    }
    if (!m.is_map()) fail(Errc::kMalformed, "request must be a map");
    try {
      for (const auto& [k, v] : m.entries()) {
        if (!k.is_text()) fail(Errc::kMalformed, "labels must be text");
        if (!v.is_array() || v.size() != 2) fail(Errc::kMalformed, "item must be [mt, payload]");
        CmwItem item;
        item.media_type = v.items()[0].as_text();
        item.payload = v.items()[1].as_bytes();
        c.items[k.as_text()] = std::move(item);
      }
    } catch (const Error& e) {
      if (e.code() == Errc::kMalformed) throw;
      fail(Errc::kMalformed, e.detail());
    }
  } else {
    detail::RequestJsonSax sax(&c);
    bool ok = nlohmann::json::sax_parse(raw.begin(), raw.end(), &sax);
    if (!ok) {
      fail(sax.code(), sax.detail().empty() ? "invalid request JSON" : sax.detail());
    }
  }
  validate(c);
  return c;
}

inline ExtractedRequest extract_evidence(const CmwCollection& c) {
  validate(c);
  ExtractedRequest out;
  out.evidence = decode_evidence(c.items.at("evidence").payload);
  for (size_t i = 1;; ++i) {
    auto it = c.items.find("endorsement." + std::to_string(i));
    if (it == c.items.end()) break;
    out.endorsements.push_back(it->second.payload);
  }
  if (auto it = c.items.find("component"); it != c.items.end()) {
    out.component = it->second.payload;
  }
  return out;
}

}  // namespace trustmee::cmw

#endif  // TRUSTMEE_CMW_HPP_
