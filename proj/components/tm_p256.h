/* Copyright 2026 The TrustMee Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TM_P256_H_
#define TM_P256_H_

#include "tm_abi.h"

/* ECDSA P-256 verification. Signatures are raw 64-byte r||s; public keys are
 * 65-byte uncompressed SEC1 points. Returns 1 valid, 0 invalid,
 * TM_ERR_MALFORMED_KEY for a key that is not a point on the curve. */
int tm_p256_verify_hash(const u8 digest[32], const u8 sig[64], const u8 pub[65]);

/* Same, hashing msg with SHA-256 first. */
int tm_p256_verify_msg(const u8* msg, usize msg_len, const u8 sig[64], const u8 pub[65]);

#endif /* TM_P256_H_ */
