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
 * Probe fixture for scratch-cache semantics and isolation. The first
 * evidence byte selects an operation:
 *   1  write: cache_write(key, value) with key/value from evidence
 *   2  read:  cache_read(key) and report the value
 *   3  escape: attempt "../escape" as a key
 * *   4  out-of-bounds: read far past the end of linear memory (must trap)
 *   5  deep-claims: emit claims nested past the depth bound
 * Evidence layout for ops 1/2: op | key_len u8 | key | value...
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_std.h"

static i64 emit_status(i32 rc, const u8* data, i32 data_len) {
  usize cap = 96 + (usize)(data_len > 0 ? data_len : 0);
  u8* out = (u8*)tm_alloc_raw(cap);
  if (!out) return tm_output_failure("Internal", "out of memory");
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out, cap);
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 1);
  tm_cbor_put_text(&wr, "claims");
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "rc");
  if (rc >= 0) {
    tm_cbor_put_uint(&wr, (u64)rc);
  } else {
    /* Negative host codes are reported as 1000 - code to stay unsigned. */
    tm_cbor_put_uint(&wr, (u64)(1000 - rc));
  }
  tm_cbor_put_text(&wr, "value");
  tm_cbor_put_bytes(&wr, data, data_len > 0 ? (usize)data_len : 0);
  if (wr.err) return tm_output_failure("Internal", "encode failed");
  return tm_pack_result(out, (u32)wr.off);
}

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  tm_eval_input in;
  if (tm_parse_eval_input((const u8*)(usize)in_off, in_len, &in)) {
    return tm_output_failure("Internal", "bad evaluate input");
  }
  if (in.ev_len < 1) return tm_output_failure("InvalidEvidence", "no op");
  u8 op = in.ev[0];
  if (op == 1 || op == 2) {
    if (in.ev_len < 2) return tm_output_failure("InvalidEvidence", "no key");
    u8 key_len = in.ev[1];
    if (2u + key_len > in.ev_len) return tm_output_failure("InvalidEvidence", "short key");
    const u8* key = in.ev + 2;
    const u8* val = in.ev + 2 + key_len;
    i32 val_len = (i32)(in.ev_len - 2 - key_len);
    if (op == 1) {
      i32 rc = tm_cache_write(key, key_len, val, val_len);
      return emit_status(rc, 0, 0);
    }
    u8* buf = (u8*)tm_alloc_raw(4096);
    if (!buf) return tm_output_failure("Internal", "out of memory");
    i32 rc = tm_cache_read(key, key_len, buf, 4096);
    return emit_status(rc, buf, rc > 0 ? rc : 0);
  }
  if (op == 3) {
    static const char key[] = "../escape";
    i32 rc = tm_cache_write((const u8*)key, sizeof(key) - 1, (const u8*)"x", 1);
    return emit_status(rc, 0, 0);
  }
  if (op == 4) {
    usize pages = __builtin_wasm_memory_size(0);
    volatile u8* p = (volatile u8*)((pages << 16) + 0x100000);
    return emit_status(*p, 0, 0); /* unreachable: the load traps */
  }
  if (op == 5) {
    /* Claims nested far past the host's depth bound. */
    u8* out = (u8*)tm_alloc_raw(256);
    if (!out) return tm_output_failure("Internal", "out of memory");
    tm_cbor_wr wr;
    tm_cbor_wr_init(&wr, out, 256);
    tm_cbor_put_map(&wr, 2);
    tm_cbor_put_text(&wr, "ok");
    tm_cbor_put_bool(&wr, 1);
    tm_cbor_put_text(&wr, "claims");
    for (int i = 0; i < 12; i++) {
      tm_cbor_put_map(&wr, 1);
      tm_cbor_put_text(&wr, "d");
    }
    tm_cbor_put_uint(&wr, 0);
    if (wr.err) return tm_output_failure("Internal", "encode failed");
    return tm_pack_result(out, (u32)wr.off);
  }
  return tm_output_failure("InvalidEvidence", "unknown op");
}
