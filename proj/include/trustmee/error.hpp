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

#ifndef TRUSTMEE_ERROR_HPP_
#define TRUSTMEE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace trustmee {

enum class Errc {
  kMalformed,
  kMissingEvidence,
  kDuplicateLabel,
  kOversizedInput,
  kInvalidCollection,
  kMalformedEvidenceItem,
  kMalformedContainer,
  kInvalidBytecode,
  kMissingExport,
  kFuelExhausted,
  kMemoryExceeded,
  kTrap,
  kNetworkDenied,
  kFetchFailed,
  kResponseTooLarge,
  kPathEscape,
  kQuotaExceeded,
  kNotFound,
  kDigestMismatch,
  kUnknownPolicy,
  kUnknownReferenceKey,
  kValidationFailed,
  kUnpinnablePolicy,
  kUntrustedVerifier,
  kBadSignature,
  kMalformedKey,
  kInternal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::kMalformed: return "Malformed";
    case Errc::kMissingEvidence: return "MissingEvidence";
    case Errc::kDuplicateLabel: return "DuplicateLabel";
    case Errc::kOversizedInput: return "OversizedInput";
    case Errc::kInvalidCollection: return "InvalidCollection";
    case Errc::kMalformedEvidenceItem: return "MalformedEvidenceItem";
    case Errc::kMalformedContainer: return "MalformedContainer";
    case Errc::kInvalidBytecode: return "InvalidBytecode";
    case Errc::kMissingExport: return "MissingExport";
    case Errc::kFuelExhausted: return "FuelExhausted";
    case Errc::kMemoryExceeded: return "MemoryExceeded";
    case Errc::kTrap: return "Trap";
    case Errc::kNetworkDenied: return "NetworkDenied";
    case Errc::kFetchFailed: return "FetchFailed";
    case Errc::kResponseTooLarge: return "ResponseTooLarge";
    case Errc::kPathEscape: return "PathEscape";
    case Errc::kQuotaExceeded: return "QuotaExceeded";
    case Errc::kNotFound: return "NotFound";
    case Errc::kDigestMismatch: return "DigestMismatch";
    case Errc::kUnknownPolicy: return "UnknownPolicy";
    case Errc::kUnknownReferenceKey: return "UnknownReferenceKey";
    case Errc::kValidationFailed: return "ValidationFailed";
    case Errc::kUnpinnablePolicy: return "UnpinnablePolicy";
    case Errc::kUntrustedVerifier: return "UntrustedVerifier";
    case Errc::kBadSignature: return "BadSignature";
    case Errc::kMalformedKey: return "MalformedKey";
    case Errc::kInternal: return "Internal";
  }
  return "Unknown";
}

// All recoverable failures surface as Error; the code is stable and is what
// service endpoints serialize into {code, detail} bodies.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(std::move(detail)) {}

  Errc code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(Errc code, std::string detail) {
  throw Error(code, std::move(detail));
}

}  // namespace trustmee

#endif  // TRUSTMEE_ERROR_HPP_
