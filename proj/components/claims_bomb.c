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
 * Adversarial fixture: emits a structurally valid output whose claims blow
 * past the host's size bound.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_std.h"

#define BOMB_LEN (2u << 20)

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  (void)in_off;
  (void)in_len;
  usize cap = BOMB_LEN + 64;
  u8* out = (u8*)tm_alloc_raw(cap);
  if (!out) return tm_output_failure("Internal", "out of memory");
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out, cap);
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 1);
  tm_cbor_put_text(&wr, "claims");
  tm_cbor_put_map(&wr, 1);
  tm_cbor_put_text(&wr, "blob");
  u8* big = (u8*)tm_alloc_raw(BOMB_LEN);
  if (!big) return tm_output_failure("Internal", "out of memory");
  memset(big, 0x42, BOMB_LEN);
  tm_cbor_put_bytes(&wr, big, BOMB_LEN);
  if (wr.err) return tm_output_failure("Internal", "encode failed");
  return tm_pack_result(out, (u32)wr.off);
}
