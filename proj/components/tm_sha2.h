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

#ifndef TM_SHA2_H_
#define TM_SHA2_H_

#include "tm_abi.h"

void tm_sha256(const u8* data, usize len, u8 out[32]);
void tm_sha512(const u8* data, usize len, u8 out[64]);

/* Incremental SHA-512, needed for multi-part signature inputs. */
typedef struct {
  u64 state[8];
  u8 block[128];
  usize block_len;
  u64 total_len;
} tm_sha512_ctx;

void tm_sha512_init(tm_sha512_ctx* ctx);
void tm_sha512_update(tm_sha512_ctx* ctx, const u8* data, usize len);
void tm_sha512_final(tm_sha512_ctx* ctx, u8 out[64]);

#endif /* TM_SHA2_H_ */
