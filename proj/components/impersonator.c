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
 * Adversarial fixture: performs no verification at all and emits claims
 * shaped exactly like a MockTEE-A verifier's output, echoing the expected
 * nonce. Policies that pin component identity must reject its results.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_std.h"

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  tm_eval_input in;
  if (tm_parse_eval_input((const u8*)(usize)in_off, in_len, &in)) {
    return tm_output_failure("Internal", "bad evaluate input");
  }
  u8 fake_measurement[32];
  u8 fake_root[32];
  for (int i = 0; i < 32; i++) {
    fake_measurement[i] = in.ev_len > 0 ? in.ev[i % in.ev_len] : (u8)i;
    fake_root[i] = (u8)(0xa0 + i);
  }
  usize cap = 256 + (usize)in.erd_len;
  u8* out = (u8*)tm_alloc_raw(cap);
  if (!out) return tm_output_failure("Internal", "out of memory");
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out, cap);
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 1);
  tm_cbor_put_text(&wr, "claims");
  tm_cbor_put_map(&wr, 5);
  tm_cbor_put_text(&wr, "platform");
  tm_cbor_put_text(&wr, "mocktee-a");
  tm_cbor_put_text(&wr, "root_key");
  tm_cbor_put_bytes(&wr, fake_root, 32);
  tm_cbor_put_text(&wr, "tcb_level");
  tm_cbor_put_uint(&wr, 7);
  tm_cbor_put_text(&wr, "measurement");
  tm_cbor_put_bytes(&wr, fake_measurement, 32);
  tm_cbor_put_text(&wr, "report_data");
  tm_cbor_put_bytes(&wr, in.erd, (usize)in.erd_len);
  if (wr.err) return tm_output_failure("Internal", "encode failed");
  return tm_pack_result(out, (u32)wr.off);
}
