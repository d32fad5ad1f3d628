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

#include "tm_std.h"

void* memcpy(void* dst, const void* src, usize n) {
  u8* d = (u8*)dst;
  const u8* s = (const u8*)src;
  for (usize i = 0; i < n; i++) d[i] = s[i];
  return dst;
}

void* memset(void* dst, int c, usize n) {
  u8* d = (u8*)dst;
  for (usize i = 0; i < n; i++) d[i] = (u8)c;
  return dst;
}

int memcmp(const void* a, const void* b, usize n) {
  const u8* x = (const u8*)a;
  const u8* y = (const u8*)b;
  for (usize i = 0; i < n; i++) {
    if (x[i] != y[i]) return x[i] < y[i] ? -1 : 1;
  }
  return 0;
}

usize strlen(const char* s) {
  usize n = 0;
  while (s[n]) n++;
  return n;
}

extern u8 __heap_base;
static usize heap_next = 0;

void* tm_alloc_raw(usize n) {
  if (heap_next == 0) heap_next = (usize)&__heap_base;
  usize aligned = (heap_next + 7u) & ~(usize)7u;
  usize end = aligned + n;
  if (end < aligned) return 0;
  usize have = (usize)__builtin_wasm_memory_size(0) << 16;
  if (end > have) {
    usize need_pages = ((end - have) + 0xffffu) >> 16;
    if (__builtin_wasm_memory_grow(0, need_pages) == (usize)-1) return 0;
  }
  heap_next = end;
  return (void*)aligned;
}

TM_EXPORT("tm_alloc")
u8* tm_alloc(u32 n) { return (u8*)tm_alloc_raw(n); }

void tm_hex_encode(const u8* in, usize n, char* out) {
  static const char digits[] = "0123456789abcdef";
  for (usize i = 0; i < n; i++) {
    out[2 * i] = digits[in[i] >> 4];
    out[2 * i + 1] = digits[in[i] & 0xf];
  }
}
