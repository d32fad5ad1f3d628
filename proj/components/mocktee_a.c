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
 * MockTEE-A verification component. Evidence is a fixed 170-byte layout:
 *   "MTA1" | version u16 BE | measurement[32] | report_data[64] |
 *   tcb_level u32 BE | ed25519 signature[64] over the preceding 106 bytes
 * The endorsement is a CBOR 2-link certificate chain (root -> platform),
 * Ed25519 throughout. Verified chains and URL-fetched collateral are cached
 * through the host cache interface.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_ed25519.h"
#include "tm_sha2.h"
#include "tm_std.h"

#define EV_LEN 170
#define EV_SIGNED_LEN 106
#define OFF_VERSION 4
#define OFF_MEASUREMENT 6
#define OFF_REPORT_DATA 38
#define OFF_TCB 102
#define OFF_SIG 106

#define CERT_TAG "mocktee-a-cert-v1"
#define MAX_CHAIN_LEN 8192

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
      if ((saw & 1) || tm_cbor_read_bytes(rd, &c->pk, &n) || n != 32) return -1;
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

/* Rebuilds the canonical to-be-signed bytes: tag || map{"pk","exp","role"}. */
static usize cert_sig_input(const cert* c, u8* out, usize cap) {
  usize tag_len = strlen(CERT_TAG);
  if (cap < tag_len) return 0;
  memcpy(out, CERT_TAG, tag_len);
  tm_cbor_wr wr;
  tm_cbor_wr_init(&wr, out + tag_len, cap - tag_len);
  tm_cbor_put_map(&wr, 3);
  tm_cbor_put_text(&wr, "pk");
  tm_cbor_put_bytes(&wr, c->pk, 32);
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

/* Verifies the chain and returns the root and platform keys. Uses the host
 * cache to skip re-verification of a chain already seen (and unexpired). */
static const char* verify_chain(const u8* chain, u64 chain_len, i64 now, const u8** root_pk,
                                const u8** platform_pk) {
  static u8 keys[64];
  u8 digest[32];
  tm_sha256(chain, (usize)chain_len, digest);
  char cache_key[8 + 64];
  memcpy(cache_key, "chainok-", 8);
  tm_hex_encode(digest, 32, cache_key + 8);

  u8 record[72];
  i32 got = tm_cache_read((const u8*)cache_key, sizeof(cache_key), record, sizeof(record));
  if (got == 72) {
    u64 min_exp = 0;
    for (int i = 0; i < 8; i++) min_exp = min_exp << 8 | record[i];
    if ((u64)now <= min_exp) {
      memcpy(keys, record + 8, 64);
      *root_pk = keys;
      *platform_pk = keys + 32;
      return 0;
    }
  }

  tm_cbor_rd rd;
  tm_cbor_rd_init(&rd, chain, (usize)chain_len);
  u64 links;
  if (tm_cbor_read_array(&rd, &links) || links != 2) return "chain must have 2 links";
  cert root, platform;
  if (parse_cert(&rd, &root) || parse_cert(&rd, &platform)) return "cert parse failed";
  if (rd.off != chain_len) return "trailing chain bytes";
  if (!role_is(&root, "root") || !role_is(&platform, "platform")) return "unexpected roles";
  if ((u64)now > root.exp || (u64)now > platform.exp) return "certificate expired";

  u8 msg[160];
  usize n = cert_sig_input(&root, msg, sizeof(msg));
  if (n == 0 || !tm_ed25519_verify(msg, n, root.sig, root.pk)) return "root self-signature invalid";
  n = cert_sig_input(&platform, msg, sizeof(msg));
  if (n == 0 || !tm_ed25519_verify(msg, n, platform.sig, root.pk)) {
    return "platform certificate not signed by root";
  }

  u64 min_exp = root.exp < platform.exp ? root.exp : platform.exp;
  for (int i = 0; i < 8; i++) record[i] = (u8)(min_exp >> (56 - 8 * i));
  memcpy(record + 8, root.pk, 32);
  memcpy(record + 40, platform.pk, 32);
  tm_cache_write((const u8*)cache_key, sizeof(cache_key), record, sizeof(record));

  memcpy(keys, record + 8, 64);
  *root_pk = keys;
  *platform_pk = keys + 32;
  return 0;
}

/* Resolves an endorsement that may be literal chain bytes or a "URL:" byte
 * reference, caching fetched collateral. */
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

  if (in.ev_len != EV_LEN) return tm_output_failure("InvalidEvidence", "wrong length");
  const u8* ev = in.ev;
  if (memcmp(ev, "MTA1", 4) != 0) return tm_output_failure("InvalidEvidence", "bad magic");
  u32 version = (u32)ev[OFF_VERSION] << 8 | ev[OFF_VERSION + 1];
  if (version != 1) return tm_output_failure("InvalidEvidence", "unsupported version");

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

  if (!tm_ed25519_verify(ev, EV_SIGNED_LEN, ev + OFF_SIG, platform_pk)) {
    return tm_output_failure("InvalidEvidence", "platform signature invalid");
  }

  if (in.erd_len > 64) return tm_output_failure("FreshnessMismatch", "nonce too long");
  u8 expected[64];
  memset(expected, 0, sizeof(expected));
  memcpy(expected, in.erd, (usize)in.erd_len);
  if (memcmp(ev + OFF_REPORT_DATA, expected, 64) != 0) {
    return tm_output_failure("FreshnessMismatch", "report data does not match nonce");
  }

  u32 tcb = (u32)ev[OFF_TCB] << 24 | (u32)ev[OFF_TCB + 1] << 16 | (u32)ev[OFF_TCB + 2] << 8 |
            ev[OFF_TCB + 3];

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
  tm_cbor_put_bytes(&wr, root_pk, 32);
  tm_cbor_put_text(&wr, "tcb_level");
  tm_cbor_put_uint(&wr, tcb);
  tm_cbor_put_text(&wr, "measurement");
  tm_cbor_put_bytes(&wr, ev + OFF_MEASUREMENT, 32);
  tm_cbor_put_text(&wr, "report_data");
  tm_cbor_put_bytes(&wr, in.erd, (usize)in.erd_len);
  if (wr.err) return tm_output_failure("Internal", "claims encode failed");
  return tm_pack_result(out, (u32)wr.off);
}
