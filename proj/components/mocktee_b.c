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
 * MockTEE-B verification component. Evidence is "MTB1" followed by a TLV
 * stream (tag u8, length u16 BE):
 *   0x01 measurement[32]   0x02 report_data[<=64]   0x03 svn u32 BE
 *   0x04 debug_flag u8     0x7f ECDSA-P256 signature[64], last entry,
 *                               over all preceding bytes
 * The endorsement is a CBOR 3-link certificate chain
 * (root -> intermediate -> platform) with P-256 keys. Compiling with
 * TM_USE_HOST_CRYPTO delegates signature checks to the host import.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_p256.h"
#include "tm_sha2.h"
#include "tm_std.h"

#define CERT_TAG "mocktee-b-cert-v1"
#define MAX_CHAIN_LEN 8192
#define MAX_EV_LEN 4096

static int p256_check(const u8* msg, usize len, const u8* sig, const u8* pub) {
#if defined(TM_USE_HOST_CRYPTO)
  return tm_host_verify_p256(msg, (i32)len, sig, pub) == 1;
#else
  return tm_p256_verify_msg(msg, len, sig, pub) == 1;
#endif
}

typedef struct {
  const u8* measurement;
  const u8* report_data;
  u64 report_data_len;
  u32 svn;
  int debug_flag;
  const u8* sig;
  u64 signed_len;
} evidence;

static int parse_evidence(const u8* ev, u64 len, evidence* out) {
  if (len < 4 || len > MAX_EV_LEN || memcmp(ev, "MTB1", 4) != 0) return -1;
  memset(out, 0, sizeof(*out));
  int saw = 0;
  u64 off = 4;
  while (off < len) {
    if (off + 3 > len) return -1;
    u8 tag = ev[off];
    u64 vlen = (u64)ev[off + 1] << 8 | ev[off + 2];
    if (off + 3 + vlen > len) return -1;
    const u8* val = ev + off + 3;
    switch (tag) {
      case 0x01:
        if (vlen != 32 || (saw & 1)) return -1;
        out->measurement = val;
        saw |= 1;
        break;
      case 0x02:
        if (vlen > 64 || (saw & 2)) return -1;
        out->report_data = val;
        out->report_data_len = vlen;
        saw |= 2;
        break;
      case 0x03:
        if (vlen != 4 || (saw & 4)) return -1;
        out->svn = (u32)val[0] << 24 | (u32)val[1] << 16 | (u32)val[2] << 8 | val[3];
        saw |= 4;
        break;
      case 0x04:
        if (vlen != 1 || val[0] > 1 || (saw & 8)) return -1;
        out->debug_flag = val[0];
        saw |= 8;
        break;
      case 0x7f:
        if (vlen != 64 || (saw & 16)) return -1;
        out->sig = val;
        out->signed_len = off;
        saw |= 16;
        if (off + 3 + vlen != len) return -1; /* signature must be last */
        break;
      default:
        return -1;
    }
    off += 3 + vlen;
  }
  return saw == 31 ? 0 : -1;
}

typedef struct {
  const u8* pk;
  u64 exp;
  const u8* sig;
  const u8* role;
  u64 role_len;
} cert;

static int parse_cert(tm_cbor_rd* rd, cert* c) {
  u64 pairs;
  if (tm_cbor_read_map(rd, &pairs) || pairs != 4) return -1;
  int saw = 0;
  for (u64 i = 0; i < pairs; i++) {
    const u8* key;
    u64 key_len;
    if (tm_cbor_read_text(rd, &key, &key_len)) return -1;
    if (key_len == 2 && memcmp(key, "pk", 2) == 0) {
      u64 n;
      if ((saw & 1) || tm_cbor_read_bytes(rd, &c->pk, &n) || n != 65) return -1;
      saw |= 1;
    } else if (key_len == 3 && memcmp(key, "exp", 3) == 0) {
      if ((saw & 2) || tm_cbor_read_uint(rd, &c->exp)) return -1;
      saw |= 2;
    } else if (key_len == 3 && memcmp(key, "sig", 3) == 0) {
      u64 n;
      if ((saw & 4) || tm_cbor_read_bytes(rd, &c->sig, &n) || n != 64) return -1;
      saw |= 4;
    } else if (key_len == 4 && memcmp(key, "role", 4) == 0) {
      if ((saw & 8) || tm_cbor_read_text(rd, &c->role, &c->role_len)) return -1;
      saw |= 8;
    } else {
      return -1;
    }
  }
  return saw == 15 ? 0 : -1;
}

static usize cert_sig_input(const cert* c, u8* out, usize cap) {
  usize tag_len = strlen(CERT_TAG);
  if (cap < tag_len) return 0;
  memcpy(out, CERT_TAG, tag_len);
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out + tag_len, cap - tag_len);
  tm_cbor_put_map(&wr, 3);
  tm_cbor_put_text(&wr, "pk");
  tm_cbor_put_bytes(&wr, c->pk, 65);
  tm_cbor_put_text(&wr, "exp");
  tm_cbor_put_uint(&wr, c->exp);
  tm_cbor_put_text(&wr, "role");
  tm_cbor_put_text_n(&wr, c->role, c->role_len);
  if (wr.err) return 0;
  return tag_len + wr.off;
}

static int role_is(const cert* c, const char* want) {
  usize n = strlen(want);
  return c->role_len == n && memcmp(c->role, want, n) == 0;
}

static const char* verify_chain(const u8* chain, u64 chain_len, i64 now, const u8** root_pk,
                                const u8** platform_pk) {
  static u8 keys[130];
  u8 digest[32];
  tm_sha256(chain, (usize)chain_len, digest);
  char cache_key[8 + 64];
  memcpy(cache_key, "chainok-", 8);
  tm_hex_encode(digest, 32, cache_key + 8);

  u8 record[138];
  i32 got = tm_cache_read((const u8*)cache_key, sizeof(cache_key), record, sizeof(record));
  if (got == (i32)sizeof(record)) {
    u64 min_exp = 0;
    for (int i = 0; i < 8; i++) min_exp = min_exp << 8 | record[i];
    if ((u64)now <= min_exp) {
      memcpy(keys, record + 8, 130);
      *root_pk = keys;
      *platform_pk = keys + 65;
      return 0;
    }
  }

  tm_cbor_rd rd;
  tm_cbor_rd_init(&rd, chain, (usize)chain_len);
  u64 links;
  if (tm_cbor_read_array(&rd, &links) || links != 3) return "chain must have 3 links";
  cert root, mid, platform;
  if (parse_cert(&rd, &root) || parse_cert(&rd, &mid) || parse_cert(&rd, &platform)) {
    return "cert parse failed";
  }
  if (rd.off != chain_len) return "trailing chain bytes";
  if (!role_is(&root, "root") || !role_is(&mid, "intermediate") ||
      !role_is(&platform, "platform")) {
    return "unexpected roles";
  }
  if ((u64)now > root.exp || (u64)now > mid.exp || (u64)now > platform.exp) {
    return "certificate expired";
  }

  u8 msg[200];
  usize n = cert_sig_input(&root, msg, sizeof(msg));
  if (n == 0 || !p256_check(msg, n, root.sig, root.pk)) return "root self-signature invalid";
  n = cert_sig_input(&mid, msg, sizeof(msg));
  if (n == 0 || !p256_check(msg, n, mid.sig, root.pk)) {
    return "intermediate certificate not signed by root";
  }
  n = cert_sig_input(&platform, msg, sizeof(msg));
  if (n == 0 || !p256_check(msg, n, platform.sig, mid.pk)) {
    return "platform certificate not signed by intermediate";
  }

  u64 min_exp = root.exp;
  if (mid.exp < min_exp) min_exp = mid.exp;
  if (platform.exp < min_exp) min_exp = platform.exp;
  for (int i = 0; i < 8; i++) record[i] = (u8)(min_exp >> (56 - 8 * i));
  memcpy(record + 8, root.pk, 65);
  memcpy(record + 73, platform.pk, 65);
  tm_cache_write((const u8*)cache_key, sizeof(cache_key), record, sizeof(record));

  memcpy(keys, record + 8, 130);
  *root_pk = keys;
  *platform_pk = keys + 65;
  return 0;
}

static const u8* resolve_collateral(const u8* endorsement, u64 len, u64* out_len) {
  if (len < 4 || memcmp(endorsement, "URL:", 4) != 0) {
    *out_len = len;
    return endorsement;
  }
  const u8* url = endorsement + 4;
  u64 url_len = len - 4;

  u8 digest[32];
  tm_sha256(url, (usize)url_len, digest);
  char cache_key[5 + 64];
  memcpy(cache_key, "coll-", 5);
  tm_hex_encode(digest, 32, cache_key + 5);

  u8* buf = (u8*)tm_alloc_raw(MAX_CHAIN_LEN);
  if (!buf) return 0;
  i32 got = tm_cache_read((const u8*)cache_key, sizeof(cache_key), buf, MAX_CHAIN_LEN);
  if (got > 0) {
    *out_len = (u64)got;
    return buf;
  }
  got = tm_http_get(url, (i32)url_len, buf, MAX_CHAIN_LEN);
  if (got <= 0) return 0;
  tm_cache_write((const u8*)cache_key, sizeof(cache_key), buf, got);
  *out_len = (u64)got;
  return buf;
}

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  tm_eval_input in;
  if (tm_parse_eval_input((const u8*)(usize)in_off, in_len, &in)) {
    return tm_output_failure("Internal", "bad evaluate input");
  }

  evidence ev;
  if (parse_evidence(in.ev, in.ev_len, &ev)) {
    return tm_output_failure("InvalidEvidence", "evidence parse failed");
  }

  if (in.endorsement_count < 1) {
    return tm_output_failure("EndorsementRejected", "no endorsement provided");
  }
  u64 chain_len = 0;
  const u8* chain = resolve_collateral(in.endorsement[0], in.endorsement_len[0], &chain_len);
  if (!chain) return tm_output_failure("EndorsementRejected", "collateral unavailable");

  const u8* root_pk = 0;
  const u8* platform_pk = 0;
  const char* chain_err = verify_chain(chain, chain_len, tm_now_unix(), &root_pk, &platform_pk);
  if (chain_err) return tm_output_failure("EndorsementRejected", chain_err);

  if (!p256_check(in.ev, (usize)ev.signed_len, ev.sig, platform_pk)) {
    return tm_output_failure("InvalidEvidence", "platform signature invalid");
  }

  if (ev.report_data_len != in.erd_len ||
      memcmp(ev.report_data, in.erd, (usize)in.erd_len) != 0) {
    return tm_output_failure("FreshnessMismatch", "report data does not match nonce");
  }

  usize cap = 320 + (usize)in.erd_len;
  u8* out = (u8*)tm_alloc_raw(cap);
  if (!out) return tm_output_failure("Internal", "out of memory");
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out, cap);
  tm_cbor_put_map(&wr, 2);
  tm_cbor_put_text(&wr, "ok");
  tm_cbor_put_bool(&wr, 1);
  tm_cbor_put_text(&wr, "claims");
  tm_cbor_put_map(&wr, 6);
  tm_cbor_put_text(&wr, "svn");
  tm_cbor_put_uint(&wr, ev.svn);
  tm_cbor_put_text(&wr, "platform");
  tm_cbor_put_text(&wr, "mocktee-b");
  tm_cbor_put_text(&wr, "root_key");
  tm_cbor_put_bytes(&wr, root_pk, 65);
  tm_cbor_put_text(&wr, "debug_flag");
  tm_cbor_put_bool(&wr, ev.debug_flag);
  tm_cbor_put_text(&wr, "measurement");
  tm_cbor_put_bytes(&wr, ev.measurement, 32);
  tm_cbor_put_text(&wr, "report_data");
  tm_cbor_put_bytes(&wr, ev.report_data, (usize)ev.report_data_len);
  if (wr.err) return tm_output_failure("Internal", "claims encode failed");
  return tm_pack_result(out, (u32)wr.off);
}
