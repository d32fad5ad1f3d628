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
 *
 * Differential harness: exposes the in-sandbox P-256 verifier and the host
 * crypto import side by side so tests can compare them on the same triples.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_p256.h"
#include "tm_std.h"

TM_EXPORT("x_p256_verify")
i32 x_p256_verify(u32 msg_off, u32 msg_len, u32 sig_off, u32 pk_off) {
  return tm_p256_verify_msg((const u8*)(usize)msg_off, msg_len, (const u8*)(usize)sig_off,
                            (const u8*)(usize)pk_off);
}

TM_EXPORT("x_p256_verify_host")
i32 x_p256_verify_host(u32 msg_off, u32 msg_len, u32 sig_off, u32 pk_off) {
  return tm_host_verify_p256((const u8*)(usize)msg_off, (i32)msg_len,
                             (const u8*)(usize)sig_off, (const u8*)(usize)pk_off);
}

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  (void)in_off;
  (void)in_len;
  return tm_output_failure("Internal", "diff harness has no evaluate path");
}
