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
 * Ed25519 verification with 16x16-bit limb field arithmetic, in the style
 * of the compact public-domain reference implementations.
 */

#include "tm_ed25519.h"

#include "tm_sha2.h"
#include "tm_std.h"

typedef i64 gf[16];

static const gf gf0 = {0};
static const gf gf1 = {1};
static const gf D = {0x78a3, 0x1359, 0x4dca, 0x75eb, 0xd8ab, 0x4141, 0x0a4d, 0x0070,
                     0xe898, 0x7779, 0x4079, 0x8cc7, 0xfe73, 0x2b6f, 0x6cee, 0x5203};
static const gf X = {0xd51a, 0x8f25, 0x2d60, 0xc956, 0xa7b2, 0x9525, 0xc760, 0x692c,
                     0xdc5c, 0xfdd6, 0xe231, 0xc0a4, 0x53fe, 0xcd6e, 0x36d3, 0x2169};
static const gf Y = {0x6658, 0x6666, 0x6666, 0x6666, 0x6666, 0x6666, 0x6666, 0x6666,
                     0x6666, 0x6666, 0x6666, 0x6666, 0x6666, 0x6666, 0x6666, 0x6666};
static const gf I = {0xa0b0, 0x4a0e, 0x1b27, 0xc4ee, 0xe478, 0xad2f, 0x1806, 0x2f43,
                     0xd7a7, 0x3dfb, 0x0099, 0x2b4d, 0xdf0b, 0x4fc1, 0x2480, 0x2b83};

static void set25519(gf r, const gf a) {
  for (int i = 0; i < 16; i++) r[i] = a[i];
}

static void car25519(gf o) {
  for (int i = 0; i < 16; i++) {
    o[i] += (i64)1 << 16;
    i64 c = o[i] >> 16;
    o[(i + 1) * (i < 15)] += c - 1 + 37 * (c - 1) * (i == 15);
    o[i] -= c << 16;
  }
}

static void sel25519(gf p, gf q, int b) {
  i64 c = ~(i64)(b - 1);
  for (int i = 0; i < 16; i++) {
    i64 t = c & (p[i] ^ q[i]);
    p[i] ^= t;
    q[i] ^= t;
  }
}

static void pack25519(u8* o, const gf n) {
  gf m, t;
  set25519(t, n);
  car25519(t);
  car25519(t);
  car25519(t);
  for (int j = 0; j < 2; j++) {
    m[0] = t[0] - 0xffed;
    for (int i = 1; i < 15; i++) {
      m[i] = t[i] - 0xffff - ((m[i - 1] >> 16) & 1);
      m[i - 1] &= 0xffff;
    }
    m[15] = t[15] - 0x7fff - ((m[14] >> 16) & 1);
    int b = (int)((m[15] >> 16) & 1);
    m[14] &= 0xffff;
    sel25519(t, m, 1 - b);
  }
  for (int i = 0; i < 16; i++) {
    o[2 * i] = (u8)(t[i] & 0xff);
    o[2 * i + 1] = (u8)(t[i] >> 8);
  }
}

static void unpack25519(gf o, const u8* n) {
  for (int i = 0; i < 16; i++) o[i] = n[2 * i] + ((i64)n[2 * i + 1] << 8);
  o[15] &= 0x7fff;
}

static void gf_add(gf o, const gf a, const gf b) {
  for (int i = 0; i < 16; i++) o[i] = a[i] + b[i];
}

static void gf_sub(gf o, const gf a, const gf b) {
  for (int i = 0; i < 16; i++) o[i] = a[i] - b[i];
}

static void gf_mul(gf o, const gf a, const gf b) {
  i64 t[31];
  for (int i = 0; i < 31; i++) t[i] = 0;
  for (int i = 0; i < 16; i++) {
    for (int j = 0; j < 16; j++) t[i + j] += a[i] * b[j];
  }
  for (int i = 0; i < 15; i++) t[i] += 38 * t[i + 16];
  for (int i = 0; i < 16; i++) o[i] = t[i];
  car25519(o);
  car25519(o);
}

static void gf_sq(gf o, const gf a) { gf_mul(o, a, a); }

static void inv25519(gf o, const gf in) {
  gf c;
  set25519(c, in);
  for (int a = 253; a >= 0; a--) {
    gf_sq(c, c);
    if (a != 2 && a != 4) gf_mul(c, c, in);
  }
  set25519(o, c);
}

/* x^((p-5)/8), used for the square-root step of decompression. */
static void pow2523(gf o, const gf in) {
  gf c;
  set25519(c, in);
  for (int a = 250; a >= 0; a--) {
    gf_sq(c, c);
    if (a != 1) gf_mul(c, c, in);
  }
  set25519(o, c);
}

static int neq25519(const gf a, const gf b) {
  u8 c[32], d[32];
  pack25519(c, a);
  pack25519(d, b);
  return memcmp(c, d, 32) != 0;
}

static u8 par25519(const gf a) {
  u8 d[32];
  pack25519(d, a);
  return d[0] & 1;
}

/* Extended Edwards coordinates [X, Y, Z, T]. */

static void point_add(gf p[4], const gf q[4]) {
  gf a, b, c, d, t, e, f, g, h, d2;
  gf_add(d2, D, D);

  gf_sub(a, p[1], p[0]);
  gf_sub(t, q[1], q[0]);
  gf_mul(a, a, t);
  gf_add(b, p[0], p[1]);
  gf_add(t, q[0], q[1]);
  gf_mul(b, b, t);
  gf_mul(c, p[3], q[3]);
  gf_mul(c, c, d2);
  gf_mul(d, p[2], q[2]);
  gf_add(d, d, d);
  gf_sub(e, b, a);
  gf_sub(f, d, c);
  gf_add(g, d, c);
  gf_add(h, b, a);

  gf_mul(p[0], e, f);
  gf_mul(p[1], h, g);
  gf_mul(p[2], g, f);
  gf_mul(p[3], e, h);
}

static void cswap(gf p[4], gf q[4], u8 b) {
  for (int i = 0; i < 4; i++) sel25519(p[i], q[i], b);
}

static void point_pack(u8* r, gf p[4]) {
  gf tx, ty, zi;
  inv25519(zi, p[2]);
  gf_mul(tx, p[0], zi);
  gf_mul(ty, p[1], zi);
  pack25519(r, ty);
  r[31] ^= par25519(tx) << 7;
}

static void scalarmult(gf p[4], gf q[4], const u8* s) {
  set25519(p[0], gf0);
  set25519(p[1], gf1);
  set25519(p[2], gf1);
  set25519(p[3], gf0);
  for (int i = 255; i >= 0; --i) {
    u8 b = (s[i / 8] >> (i & 7)) & 1;
    cswap(p, q, b);
    point_add(q, (const gf*)p);
    point_add(p, (const gf*)p);
    cswap(p, q, b);
  }
}

static void scalarbase(gf p[4], const u8* s) {
  gf q[4];
  set25519(q[0], X);
  set25519(q[1], Y);
  set25519(q[2], gf1);
  gf_mul(q[3], X, Y);
  scalarmult(p, q, s);
}

static int unpackneg(gf r[4], const u8 p[32]) {
  gf t, chk, num, den, den2, den4, den6;
  set25519(r[2], gf1);
  unpack25519(r[1], p);
  gf_sq(num, r[1]);
  gf_mul(den, num, D);
  gf_sub(num, num, r[2]);
  gf_add(den, r[2], den);

  gf_sq(den2, den);
  gf_sq(den4, den2);
  gf_mul(den6, den4, den2);
  gf_mul(t, den6, num);
  gf_mul(t, t, den);

  pow2523(t, t);
  gf_mul(t, t, num);
  gf_mul(t, t, den);
  gf_mul(t, t, den);
  gf_mul(r[0], t, den);

  gf_sq(chk, r[0]);
  gf_mul(chk, chk, den);
  if (neq25519(chk, num)) gf_mul(r[0], r[0], I);

  gf_sq(chk, r[0]);
  gf_mul(chk, chk, den);
  if (neq25519(chk, num)) return -1;

  if (par25519(r[0]) == (p[31] >> 7)) gf_sub(r[0], gf0, r[0]);

  gf_mul(r[3], r[0], r[1]);
  return 0;
}

static const u8 L_BYTES[32] = {0xed, 0xd3, 0xf5, 0x5c, 0x1a, 0x63, 0x12, 0x58,
                               0xd6, 0x9c, 0xf7, 0xa2, 0xde, 0xf9, 0xde, 0x14,
                               0,    0,    0,    0,    0,    0,    0,    0,
                               0,    0,    0,    0,    0,    0,    0,    0x10};

static int scalar_is_canonical(const u8 s[32]) {
  for (int i = 31; i >= 0; i--) {
    if (s[i] < L_BYTES[i]) return 1;
    if (s[i] > L_BYTES[i]) return 0;
  }
  return 0;
}

static void modL(u8* r, i64 x[64]) {
  i64 carry;
  int i, j;
  for (i = 63; i >= 32; --i) {
    carry = 0;
    for (j = i - 32; j < i - 12; ++j) {
      x[j] += carry - 16 * x[i] * L_BYTES[j - (i - 32)];
      carry = (x[j] + 128) >> 8;
      x[j] -= carry << 8;
    }
    x[j] += carry;
    x[i] = 0;
  }
  carry = 0;
  for (j = 0; j < 32; j++) {
    x[j] += carry - (x[31] >> 4) * L_BYTES[j];
    carry = x[j] >> 8;
    x[j] &= 255;
  }
  for (j = 0; j < 32; j++) x[j] -= carry * L_BYTES[j];
  for (i = 0; i < 32; i++) {
    x[i + 1] += x[i] >> 8;
    r[i] = (u8)(x[i] & 255);
  }
}

static void reduce64(u8 r[64]) {
  i64 x[64];
  for (int i = 0; i < 64; i++) x[i] = (i64)r[i];
  for (int i = 0; i < 64; i++) r[i] = 0;
  modL(r, x);
}

int tm_ed25519_verify(const u8* msg, usize msg_len, const u8 sig[64], const u8 pk[32]) {
  gf p[4], q[4];
  if (!scalar_is_canonical(sig + 32)) return 0;
  if (unpackneg(q, pk)) return 0;

  u8 h[64];
  tm_sha512_ctx ctx;
  tm_sha512_init(&ctx);
  tm_sha512_update(&ctx, sig, 32);
  tm_sha512_update(&ctx, pk, 32);
  tm_sha512_update(&ctx, msg, msg_len);
  tm_sha512_final(&ctx, h);
  reduce64(h);

  /* R' = s*B - h*A; valid iff R' equals the signature's R. */
  scalarmult(p, q, h);
  scalarbase(q, sig + 32);
  point_add(p, (const gf*)q);
  u8 rcheck[32];
  point_pack(rcheck, p);
  return memcmp(rcheck, sig, 32) == 0;
}
