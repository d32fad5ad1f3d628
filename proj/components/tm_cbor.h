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
 * Minimal definite-length CBOR reader/writer for component use. The reader
 * never allocates; values reference the input buffer.
 */

#ifndef TM_CBOR_H_
#define TM_CBOR_H_

#include "tm_abi.h"

typedef struct {
  const u8* p;
  usize len;
  usize off;
  int err;
} tm_cbor_rd;

void tm_cbor_rd_init(tm_cbor_rd* rd, const u8* p, usize len);
int tm_cbor_read_uint(tm_cbor_rd* rd, u64* v);
int tm_cbor_read_bytes(tm_cbor_rd* rd, const u8** p, u64* len);
int tm_cbor_read_text(tm_cbor_rd* rd, const u8** p, u64* len);
int tm_cbor_read_array(tm_cbor_rd* rd, u64* count);
int tm_cbor_read_map(tm_cbor_rd* rd, u64* count);
int tm_cbor_read_bool(tm_cbor_rd* rd, int* v);
int tm_cbor_skip(tm_cbor_rd* rd);

typedef struct {
  u8* p;
  usize cap;
  usize off;
  int err;
} tm_cbor_wr;

void tm_cbor_wr_init(tm_cbor_wr* wr, u8* p, usize cap);
void tm_cbor_put_uint(tm_cbor_wr* wr, u64 v);
void tm_cbor_put_bytes(tm_cbor_wr* wr, const u8* p, usize len);
void tm_cbor_put_text(tm_cbor_wr* wr, const char* s);
void tm_cbor_put_text_n(tm_cbor_wr* wr, const u8* p, usize len);
void tm_cbor_put_array(tm_cbor_wr* wr, u64 count);
void tm_cbor_put_map(tm_cbor_wr* wr, u64 count);
void tm_cbor_put_bool(tm_cbor_wr* wr, int v);

/* Evaluate-input view: {"ev": bstr, "end": [bstr...], "erd": bstr}. */
#define TM_MAX_ENDORSEMENTS 8

typedef struct {
  const u8* ev;
  u64 ev_len;
  const u8* erd;
  u64 erd_len;
  const u8* endorsement[TM_MAX_ENDORSEMENTS];
  u64 endorsement_len[TM_MAX_ENDORSEMENTS];
  u32 endorsement_count;
} tm_eval_input;

int tm_parse_eval_input(const u8* p, usize len, tm_eval_input* out);

/* Standard failure output: {"ok": false, "code": ..., "detail": ...}. */
i64 tm_output_failure(const char* code, const char* detail);

#endif /* TM_CBOR_H_ */
