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
 * ECDSA P-256 verification on 32-bit limbs. Field and order arithmetic use
 * generic Montgomery (CIOS) multiplication with runtime-derived constants;
 * points use Jacobian coordinates with the a = -3 doubling formula. All
 * operations are variable-time, which is fine for verification of public
 * data.
 */

#include "tm_p256.h"

#include "tm_sha2.h"
#include "tm_std.h"

typedef u32 bn[8]; /* little-endian limbs */

static const u8 P_BE[32] = {
    0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00,
    0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xff, 0xff,
    0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff};
static const u8 N_BE[32] = {
    0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x00, 0xff, 0xff, 0xff,
    0xff, 0xff, 0xff, 0xff, 0xff, 0xbc, 0xe6, 0xfa, 0xad, 0xa7, 0x17,
    0x9e, 0x84, 0xf3, 0xb9, 0xca, 0xc2, 0xfc, 0x63, 0x25, 0x51};
static const u8 B_BE[32] = {
    0x5a, 0xc6, 0x35, 0xd8, 0xaa, 0x3a, 0x93, 0xe7, 0xb3, 0xeb, 0xbd,
    0x55, 0x76, 0x98, 0x86, 0xbc, 0x65, 0x1d, 0x06, 0xb0, 0xcc, 0x53,
    0xb0, 0xf6, 0x3b, 0xce, 0x3c, 0x3e, 0x27, 0xd2, 0x60, 0x4b};
static const u8 GX_BE[32] = {
    0x6b, 0x17, 0xd1, 0xf2, 0xe1, 0x2c, 0x42, 0x47, 0xf8, 0xbc, 0xe6,
    0xe5, 0x63, 0xa4, 0x40, 0xf2, 0x77, 0x03, 0x7d, 0x81, 0x2d, 0xeb,
    0x33, 0xa0, 0xf4, 0xa1, 0x39, 0x45, 0xd8, 0x98, 0xc2, 0x96};
static const u8 GY_BE[32] = {
    0x4f, 0xe3, 0x42, 0xe2, 0xfe, 0x1a, 0x7f, 0x9b, 0x8e, 0xe7, 0xeb,
    0x4a, 0x7c, 0x0f, 0x9e, 0x16, 0x2b, 0xce, 0x33, 0x57, 0x6b, 0x31,
    0x5e, 0xce, 0xcb, 0xb6, 0x40, 0x68, 0x37, 0xbf, 0x51, 0xf5};

static void bn_from_be(bn r, const u8 in[32]) {
  for (int i = 0; i < 8; i++) {
    r[7 - i] = (u32)in[4 * i] << 24 | (u32)in[4 * i + 1] << 16 |
               (u32)in[4 * i + 2] << 8 | (u32)in[4 * i + 3];
  }
}

static void bn_set(bn r, const bn a) { memcpy(r, a, sizeof(bn)); }
static void bn_zero(bn r) { memset(r, 0, sizeof(bn)); }

static int bn_is_zero(const bn a) {
  u32 acc = 0;
  for (int i = 0; i < 8; i++) acc |= a[i];
  return acc == 0;
}

static int bn_cmp(const bn a, const bn b) {
  for (int i = 7; i >= 0; i--) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

static u32 bn_add(bn r, const bn a, const bn b) {
  u64 carry = 0;
  for (int i = 0; i < 8; i++) {
    u64 v = (u64)a[i] + b[i] + carry;
    r[i] = (u32)v;
    carry = v >> 32;
  }
  return (u32)carry;
}

static u32 bn_sub(bn r, const bn a, const bn b) {
  u64 borrow = 0;
  for (int i = 0; i < 8; i++) {
    u64 v = (u64)a[i] - b[i] - borrow;
    r[i] = (u32)v;
    borrow = (v >> 32) & 1;
  }
  return (u32)borrow;
}

typedef struct {
  bn n;
  bn rr;  /* R^2 mod n, R = 2^256 */
  bn one; /* 1 in Montgomery form (R mod n) */
  u32 n0inv;
} mont;

static void mod_add(const mont* m, bn r, const bn a, const bn b) {
  u32 carry = bn_add(r, a, b);
  if (carry || bn_cmp(r, m->n) >= 0) bn_sub(r, r, m->n);
}

static void mod_sub(const mont* m, bn r, const bn a, const bn b) {
  u32 borrow = bn_sub(r, a, b);
  if (borrow) bn_add(r, r, m->n);
}

static void mont_init(mont* m, const u8 modulus_be[32]) {
  bn_from_be(m->n, modulus_be);
  /* -n^{-1} mod 2^32 via Newton iterations (n must be odd). */
  u32 x = m->n[0];
  for (int i = 0; i < 5; i++) x *= 2 - m->n[0] * x;
  m->n0inv = (u32)(0u - x);
  /* R^2 mod n by 512 modular doublings of 1. */
  bn_zero(m->rr);
  m->rr[0] = 1;
  for (int i = 0; i < 512; i++) mod_add(m, m->rr, m->rr, m->rr);
  /* R mod n by 256 doublings. */
  bn_zero(m->one);
  m->one[0] = 1;
  for (int i = 0; i < 256; i++) mod_add(m, m->one, m->one, m->one);
}

static void mont_mul(const mont* m, bn r, const bn a, const bn b) {
  u32 t[10];
  memset(t, 0, sizeof(t));
  for (int i = 0; i < 8; i++) {
    u64 carry = 0;
    for (int j = 0; j < 8; j++) {
      u64 v = (u64)a[i] * b[j] + t[j] + carry;
      t[j] = (u32)v;
      carry = v >> 32;
    }
    u64 v = (u64)t[8] + carry;
    t[8] = (u32)v;
    t[9] = (u32)(v >> 32);

    u32 mf = t[0] * m->n0inv;
    u64 w = (u64)mf * m->n[0] + t[0];
    carry = w >> 32;
    for (int j = 1; j < 8; j++) {
      w = (u64)mf * m->n[j] + t[j] + carry;
      t[j - 1] = (u32)w;
      carry = w >> 32;
    }
    w = (u64)t[8] + carry;
    t[7] = (u32)w;
    t[8] = t[9] + (u32)(w >> 32);
    t[9] = 0;
  }
  bn out;
  memcpy(out, t, sizeof(bn));
  if (t[8] || bn_cmp(out, m->n) >= 0) bn_sub(out, out, m->n);
  bn_set(r, out);
}

static void to_mont(const mont* m, bn r, const bn a) { mont_mul(m, r, a, m->rr); }

static void from_mont(const mont* m, bn r, const bn a) {
  bn one;
  bn_zero(one);
  one[0] = 1;
  mont_mul(m, r, a, one);
}

/* r = a^e mod n, all in Montgomery form; e is a plain big integer. */
static void mont_pow(const mont* m, bn r, const bn a, const bn e) {
  bn acc;
  bn_set(acc, m->one);
  for (int i = 255; i >= 0; i--) {
    mont_mul(m, acc, acc, acc);
    if ((e[i / 32] >> (i % 32)) & 1) mont_mul(m, acc, acc, a);
  }
  bn_set(r, acc);
}

/* --- curve ------------------------------------------------------------------ */

typedef struct {
  bn x, y, z; /* Jacobian, Montgomery form; z == 0 marks infinity */
} point;

static mont FP;
static mont FN;
static bn B_M, GX_M, GY_M, THREE_M;
static int curve_ready = 0;

static void curve_init(void) {
  if (curve_ready) return;
  mont_init(&FP, P_BE);
  mont_init(&FN, N_BE);
  bn t;
  bn_from_be(t, B_BE);
  to_mont(&FP, B_M, t);
  bn_from_be(t, GX_BE);
  to_mont(&FP, GX_M, t);
  bn_from_be(t, GY_BE);
  to_mont(&FP, GY_M, t);
  bn_zero(t);
  t[0] = 3;
  to_mont(&FP, THREE_M, t);
  curve_ready = 1;
}

static int pt_is_inf(const point* p) { return bn_is_zero(p->z); }

static void pt_set_inf(point* p) {
  bn_zero(p->x);
  bn_zero(p->y);
  bn_zero(p->z);
}

static void pt_dbl(point* r, const point* p) {
  if (pt_is_inf(p) || bn_is_zero(p->y)) {
    pt_set_inf(r);
    return;
  }
  bn delta, gamma, beta, alpha, t1, t2, x3, y3, z3;
  mont_mul(&FP, delta, p->z, p->z);
  mont_mul(&FP, gamma, p->y, p->y);
  mont_mul(&FP, beta, p->x, gamma);
  mod_sub(&FP, t1, p->x, delta);
  mod_add(&FP, t2, p->x, delta);
  mont_mul(&FP, t1, t1, t2);
  mont_mul(&FP, alpha, t1, THREE_M);

  mont_mul(&FP, x3, alpha, alpha);
  bn beta8;
  mod_add(&FP, beta8, beta, beta);   /* 2b */
  mod_add(&FP, beta8, beta8, beta8); /* 4b */
  bn beta4;
  bn_set(beta4, beta8);
  mod_add(&FP, beta8, beta8, beta8); /* 8b */
  mod_sub(&FP, x3, x3, beta8);

  mod_add(&FP, z3, p->y, p->z);
  mont_mul(&FP, z3, z3, z3);
  mod_sub(&FP, z3, z3, gamma);
  mod_sub(&FP, z3, z3, delta);

  mod_sub(&FP, t1, beta4, x3);
  mont_mul(&FP, t1, alpha, t1);
  mont_mul(&FP, t2, gamma, gamma);
  mod_add(&FP, t2, t2, t2); /* 2g^2 */
  mod_add(&FP, t2, t2, t2); /* 4g^2 */
  mod_add(&FP, t2, t2, t2); /* 8g^2 */
  mod_sub(&FP, y3, t1, t2);

  bn_set(r->x, x3);
  bn_set(r->y, y3);
  bn_set(r->z, z3);
}

static void pt_add(point* r, const point* p, const point* q) {
  if (pt_is_inf(p)) {
    *r = *q;
    return;
  }
  if (pt_is_inf(q)) {
    *r = *p;
    return;
  }
  bn z1z1, z2z2, u1, u2, s1, s2, h, rr, t;
  mont_mul(&FP, z1z1, p->z, p->z);
  mont_mul(&FP, z2z2, q->z, q->z);
  mont_mul(&FP, u1, p->x, z2z2);
  mont_mul(&FP, u2, q->x, z1z1);
  mont_mul(&FP, t, q->z, z2z2);
  mont_mul(&FP, s1, p->y, t);
  mont_mul(&FP, t, p->z, z1z1);
  mont_mul(&FP, s2, q->y, t);
  mod_sub(&FP, h, u2, u1);
  mod_sub(&FP, rr, s2, s1);
  if (bn_is_zero(h)) {
    if (bn_is_zero(rr)) {
      pt_dbl(r, p);
      return;
    }
    pt_set_inf(r);
    return;
  }
  bn hh, hhh, v, x3, y3, z3;
  mont_mul(&FP, hh, h, h);
  mont_mul(&FP, hhh, h, hh);
  mont_mul(&FP, v, u1, hh);

  mont_mul(&FP, x3, rr, rr);
  mod_sub(&FP, x3, x3, hhh);
  mod_sub(&FP, x3, x3, v);
  mod_sub(&FP, x3, x3, v);

  mod_sub(&FP, t, v, x3);
  mont_mul(&FP, y3, rr, t);
  mont_mul(&FP, t, s1, hhh);
  mod_sub(&FP, y3, y3, t);

  mont_mul(&FP, z3, p->z, q->z);
  mont_mul(&FP, z3, z3, h);

  bn_set(r->x, x3);
  bn_set(r->y, y3);
  bn_set(r->z, z3);
}

/* r = u1*G + u2*Q via interleaved (Shamir) double-and-add. */
static void pt_dual_mul(point* r, const bn u1, const bn u2, const point* q) {
  point g;
  bn_set(g.x, GX_M);
  bn_set(g.y, GY_M);
  bn_set(g.z, FP.one);

  point gq;
  pt_add(&gq, &g, q);

  pt_set_inf(r);
  for (int i = 255; i >= 0; i--) {
    pt_dbl(r, r);
    u32 b1 = (u1[i / 32] >> (i % 32)) & 1;
    u32 b2 = (u2[i / 32] >> (i % 32)) & 1;
    if (b1 && b2) {
      pt_add(r, r, &gq);
    } else if (b1) {
      pt_add(r, r, &g);
    } else if (b2) {
      pt_add(r, r, q);
    }
  }
}

static int on_curve(const bn x_m, const bn y_m) {
  bn lhs, rhs, t;
  mont_mul(&FP, lhs, y_m, y_m);
  mont_mul(&FP, rhs, x_m, x_m);
  mont_mul(&FP, rhs, rhs, x_m);
  mont_mul(&FP, t, x_m, THREE_M);
  mod_sub(&FP, rhs, rhs, t);
  mod_add(&FP, rhs, rhs, B_M);
  return bn_cmp(lhs, rhs) == 0;
}

int tm_p256_verify_hash(const u8 digest[32], const u8 sig[64], const u8 pub[65]) {
  curve_init();
  if (pub[0] != 0x04) return TM_ERR_MALFORMED_KEY;
  bn qx, qy;
  bn_from_be(qx, pub + 1);
  bn_from_be(qy, pub + 33);
  if (bn_cmp(qx, FP.n) >= 0 || bn_cmp(qy, FP.n) >= 0) return TM_ERR_MALFORMED_KEY;
  if (bn_is_zero(qx) && bn_is_zero(qy)) return TM_ERR_MALFORMED_KEY;

  point q;
  to_mont(&FP, q.x, qx);
  to_mont(&FP, q.y, qy);
  bn_set(q.z, FP.one);
  if (!on_curve(q.x, q.y)) return TM_ERR_MALFORMED_KEY;

  bn rsig, ssig;
  bn_from_be(rsig, sig);
  bn_from_be(ssig, sig + 32);
  if (bn_is_zero(rsig) || bn_is_zero(ssig)) return 0;
  if (bn_cmp(rsig, FN.n) >= 0 || bn_cmp(ssig, FN.n) >= 0) return 0;

  bn e;
  bn_from_be(e, digest);
  if (bn_cmp(e, FN.n) >= 0) bn_sub(e, e, FN.n);

  /* w = s^-1 mod n via Fermat. */
  bn s_m, w_m, nm2;
  to_mont(&FN, s_m, ssig);
  bn two;
  bn_zero(two);
  two[0] = 2;
  bn_sub(nm2, FN.n, two);
  mont_pow(&FN, w_m, s_m, nm2);

  bn e_m, r_m, u1_m, u2_m, u1, u2;
  to_mont(&FN, e_m, e);
  to_mont(&FN, r_m, rsig);
  mont_mul(&FN, u1_m, e_m, w_m);
  mont_mul(&FN, u2_m, r_m, w_m);
  from_mont(&FN, u1, u1_m);
  from_mont(&FN, u2, u2_m);

  point rp;
  pt_dual_mul(&rp, u1, u2, &q);
  if (pt_is_inf(&rp)) return 0;

  /* Affine x = X / Z^2 (mod p), then compare to r mod n. */
  bn zinv_m, zinv2_m, x_m, x, pm2;
  bn_sub(pm2, FP.n, two);
  mont_pow(&FP, zinv_m, rp.z, pm2);
  mont_mul(&FP, zinv2_m, zinv_m, zinv_m);
  mont_mul(&FP, x_m, rp.x, zinv2_m);
  from_mont(&FP, x, x_m);
  if (bn_cmp(x, FN.n) >= 0) bn_sub(x, x, FN.n);
  return bn_cmp(x, rsig) == 0 ? 1 : 0;
}

int tm_p256_verify_msg(const u8* msg, usize msg_len, const u8 sig[64], const u8 pub[65]) {
  u8 digest[32];
  tm_sha256(msg, msg_len, digest);
  return tm_p256_verify_hash(digest, sig, pub);
}
