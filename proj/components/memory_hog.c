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
 * Adversarial fixture: grows linear memory until the host cap refuses, then
 * keeps spinning over the allocated pages. Exercises the memory limit and
 * the fuel backstop.
 */

#include "tm_abi.h"
#include "tm_std.h"

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  (void)in_off;
  (void)in_len;
  for (;;) {
    usize grown = __builtin_wasm_memory_grow(0, 16);
    usize pages = __builtin_wasm_memory_size(0);
    volatile u8* base = (volatile u8*)0;
    /* Touch the newest page to force real usage. */
    base[(pages << 16) - 1] = 0xaa;
    if (grown == (usize)-1) {
      /* Cap reached; keep consuming fuel instead. */
      volatile u64 x = 0;
      for (;;) x++;
    }
  }
}
