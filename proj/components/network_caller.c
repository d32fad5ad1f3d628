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
 * Fixture that treats its evidence bytes as a URL and performs an outbound
 * fetch. Reports the import's outcome as claims so tests can observe the
 * capability gate from both sides.
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
  u8* body = (u8*)tm_alloc_raw(65536);
  if (!body) return tm_output_failure("Internal", "out of memory");
  i32 got = tm_http_get(in.ev, (i32)in.ev_len, body, 65536);

  u8* out = (u8*)tm_alloc_raw(128);
  if (!out) return tm_output_failure("Internal", "out of memory");
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out, 128);
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 1);
  tm_cbor_put_text(&wr, "claims");
  if (got >= 0) {
    tm_cbor_put_map(&wr, 2);
    tm_cbor_put_text(&wr, "fetched");
    tm_cbor_put_bool(&wr, 1);
    tm_cbor_put_text(&wr, "body_len");
    tm_cbor_put_uint(&wr, (u64)got);
  } else {
    tm_cbor_put_map(&wr, 2);
    tm_cbor_put_text(&wr, "err");
    tm_cbor_put_uint(&wr, (u64)(u32)(-got));
    tm_cbor_put_text(&wr, "fetched");
    tm_cbor_put_bool(&wr, 0);
  }
  if (wr.err) return tm_output_failure("Internal", "encode failed");
  return tm_pack_result(out, (u32)wr.off);
}
