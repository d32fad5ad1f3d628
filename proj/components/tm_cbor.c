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

#include "tm_cbor.h"

#include "tm_std.h"

void tm_cbor_rd_init(tm_cbor_rd* rd, const u8* p, usize len) {
  rd->p = p;
  rd->len = len;
  rd->off = 0;
  rd->err = 0;
}

static int rd_byte(tm_cbor_rd* rd, u8* b) {
  if (rd->err || rd->off >= rd->len) {
    rd->err = 1;
    return -1;
  }
  *b = rd->p[rd->off++];
  return 0;
}

static int rd_head(tm_cbor_rd* rd, u8* major, u64* arg) {
  u8 b;
  if (rd_byte(rd, &b)) return -1;
  *major = b >> 5;
  u8 addl = b & 0x1f;
  if (addl < 24) {
    *arg = addl;
    return 0;
  }
  int n;
  switch (addl) {
    case 24: n = 1; break;
    case 25: n = 2; break;
    case 26: n = 4; break;
    case 27: n = 8; break;
    default: rd->err = 1; return -1; /* indefinite lengths not in profile */
  }
  u64 v = 0;
  for (int i = 0; i < n; i++) {
    u8 x;
    if (rd_byte(rd, &x)) return -1;
    v = v << 8 | x;
  }
  *arg = v;
  return 0;
}

int tm_cbor_read_uint(tm_cbor_rd* rd, u64* v) {
  u8 major;
  if (rd_head(rd, &major, v) || major != 0) {
    rd->err = 1;
    return -1;
  }
  return 0;
}

static int rd_chunk(tm_cbor_rd* rd, u8 want_major, const u8** p, u64* len) {
  u8 major;
  u64 n;
  if (rd_head(rd, &major, &n) || major != want_major) {
    rd->err = 1;
    return -1;
  }
  if (n > rd->len - rd->off) {
    rd->err = 1;
    return -1;
  }
  *p = rd->p + rd->off;
  *len = n;
  rd->off += n;
  return 0;
}

int tm_cbor_read_bytes(tm_cbor_rd* rd, const u8** p, u64* len) {
  return rd_chunk(rd, 2, p, len);
}

int tm_cbor_read_text(tm_cbor_rd* rd, const u8** p, u64* len) {
  return rd_chunk(rd, 3, p, len);
}

int tm_cbor_read_array(tm_cbor_rd* rd, u64* count) {
  u8 major;
  if (rd_head(rd, &major, count) || major != 4) {
    rd->err = 1;
    return -1;
  }
  if (*count > rd->len) {
    rd->err = 1;
    return -1;
  }
  return 0;
}

int tm_cbor_read_map(tm_cbor_rd* rd, u64* count) {
  u8 major;
  if (rd_head(rd, &major, count) || major != 5) {
    rd->err = 1;
    return -1;
  }
  if (*count > rd->len) {
    rd->err = 1;
    return -1;
  }
  return 0;
}

int tm_cbor_read_bool(tm_cbor_rd* rd, int* v) {
  u8 b;
  if (rd_byte(rd, &b)) return -1;
  if (b == 0xf4) {
    *v = 0;
    return 0;
  }
  if (b == 0xf5) {
    *v = 1;
    return 0;
  }
  rd->err = 1;
  return -1;
}

static int skip_depth(tm_cbor_rd* rd, int depth) {
  if (depth > 16) {
    rd->err = 1;
    return -1;
  }
  u8 major;
  u64 arg;
  if (rd_head(rd, &major, &arg)) return -1;
  switch (major) {
    case 0:
    case 1:
      return 0;
    case 2:
    case 3:
      if (arg > rd->len - rd->off) {
        rd->err = 1;
        return -1;
      }
      rd->off += arg;
      return 0;
    case 4:
      if (arg > rd->len) {
        rd->err = 1;
        return -1;
      }
      for (u64 i = 0; i < arg; i++) {
        if (skip_depth(rd, depth + 1)) return -1;
      }
      return 0;
    case 5:
      if (arg > rd->len) {
        rd->err = 1;
        return -1;
      }
      for (u64 i = 0; i < arg; i++) {
        if (skip_depth(rd, depth + 1)) return -1;
        if (skip_depth(rd, depth + 1)) return -1;
      }
      return 0;
    case 7:
      if (arg == 20 || arg == 21 || arg == 22) return 0;
      rd->err = 1;
      return -1;
    default:
      rd->err = 1;
      return -1;
  }
}

int tm_cbor_skip(tm_cbor_rd* rd) { return skip_depth(rd, 0); }

/* --- writer --------------------------------------------------------------- */

void tm_cbor_wr_init(tm_cbor_wr* wr, u8* p, usize cap) {
  wr->p = p;
  wr->cap = cap;
  wr->off = 0;
  wr->err = 0;
}

static void wr_byte(tm_cbor_wr* wr, u8 b) {
  if (wr->err || wr->off >= wr->cap) {
    wr->err = 1;
    return;
  }
  wr->p[wr->off++] = b;
}

static void wr_head(tm_cbor_wr* wr, u8 major, u64 n) {
  u8 m = (u8)(major << 5);
  if (n < 24) {
    wr_byte(wr, m | (u8)n);
  } else if (n <= 0xff) {
    wr_byte(wr, m | 24);
    wr_byte(wr, (u8)n);
  } else if (n <= 0xffff) {
    wr_byte(wr, m | 25);
    wr_byte(wr, (u8)(n >> 8));
    wr_byte(wr, (u8)n);
  } else if (n <= 0xffffffffull) {
    wr_byte(wr, m | 26);
    for (int s = 24; s >= 0; s -= 8) wr_byte(wr, (u8)(n >> s));
  } else {
    wr_byte(wr, m | 27);
    for (int s = 56; s >= 0; s -= 8) wr_byte(wr, (u8)(n >> s));
  }
}

void tm_cbor_put_uint(tm_cbor_wr* wr, u64 v) { wr_head(wr, 0, v); }

void tm_cbor_put_bytes(tm_cbor_wr* wr, const u8* p, usize len) {
  wr_head(wr, 2, len);
  for (usize i = 0; i < len; i++) wr_byte(wr, p[i]);
}

void tm_cbor_put_text_n(tm_cbor_wr* wr, const u8* p, usize len) {
  wr_head(wr, 3, len);
  for (usize i = 0; i < len; i++) wr_byte(wr, p[i]);
}

void tm_cbor_put_text(tm_cbor_wr* wr, const char* s) {
  tm_cbor_put_text_n(wr, (const u8*)s, strlen(s));
}

void tm_cbor_put_array(tm_cbor_wr* wr, u64 count) { wr_head(wr, 4, count); }
void tm_cbor_put_map(tm_cbor_wr* wr, u64 count) { wr_head(wr, 5, count); }
void tm_cbor_put_bool(tm_cbor_wr* wr, int v) { wr_byte(wr, v ? 0xf5 : 0xf4); }

/* --- evaluate plumbing ----------------------------------------------------- */

static int text_is(const u8* p, u64 len, const char* s) {
  usize n = strlen(s);
  return len == n && memcmp(p, s, n) == 0;
}

int tm_parse_eval_input(const u8* p, usize len, tm_eval_input* out) {
  memset(out, 0, sizeof(*out));
  tm_cbor_rd rd;
  tm_cbor_rd_init(&rd, p, len);
  u64 pairs;
  if (tm_cbor_read_map(&rd, &pairs)) return -1;
  int saw_ev = 0, saw_end = 0, saw_erd = 0;
  for (u64 i = 0; i < pairs; i++) {
    const u8* key;
    u64 key_len;
    if (tm_cbor_read_text(&rd, &key, &key_len)) return -1;
    if (text_is(key, key_len, "ev")) {
      if (tm_cbor_read_bytes(&rd, &out->ev, &out->ev_len)) return -1;
      saw_ev = 1;
    } else if (text_is(key, key_len, "erd")) {
      if (tm_cbor_read_bytes(&rd, &out->erd, &out->erd_len)) return -1;
      saw_erd = 1;
    } else if (text_is(key, key_len, "end")) {
      u64 n;
      if (tm_cbor_read_array(&rd, &n)) return -1;
      for (u64 j = 0; j < n; j++) {
        const u8* ep;
        u64 elen;
        if (tm_cbor_read_bytes(&rd, &ep, &elen)) return -1;
        if (j < TM_MAX_ENDORSEMENTS) {
          out->endorsement[j] = ep;
          out->endorsement_len[j] = elen;
          out->endorsement_count++;
        }
      }
      saw_end = 1;
    } else {
      if (tm_cbor_skip(&rd)) return -1;
    }
  }
  return (saw_ev && saw_end && saw_erd) ? 0 : -1;
}

i64 tm_output_failure(const char* code, const char* detail) {
  usize cap = 32 + strlen(code) + strlen(detail);
  u8* buf = (u8*)tm_alloc_raw(cap);
  if (!buf) return 0;
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, buf, cap);
  tm_cbor_put_map(&wr, 3);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 0);
  tm_cbor_put_text(&wr, "code");
  tm_cbor_put_text(&wr, code);
  tm_cbor_put_text(&wr, "detail");
  tm_cbor_put_text(&wr, detail);
  if (wr.err) return 0;
  return tm_pack_result(buf, (u32)wr.off);
}
