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
 * Fuel-calibration fixture: x_spin runs a loop with a fixed per-iteration
 * instruction count so fuel budgets can be expressed in loop iterations.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_std.h"

TM_EXPORT("x_spin")
u32 x_spin(u32 iters) {
  volatile u32 acc = 0;
  for (u32 i = 0; i < iters; i++) acc += i;
  return acc;
}

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  (void)in_off;
  x_spin(in_len);
  u8* out = (u8*)tm_alloc_raw(64);
  if (!out) return tm_output_failure("Internal", "out of memory");
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out, 64);
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 1);
  tm_cbor_put_text(&wr, "claims");
  tm_cbor_put_map(&wr, 1);
  tm_cbor_put_text(&wr, "iters");
  tm_cbor_put_uint(&wr, in_len);
  if (wr.err) return tm_output_failure("Internal", "encode failed");
  return tm_pack_result(out, (u32)wr.off);
}
