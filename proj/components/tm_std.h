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

#ifndef TM_STD_H_
#define TM_STD_H_

#include "tm_abi.h"

void* memcpy(void* dst, const void* src, usize n);
void* memset(void* dst, int c, usize n);
int memcmp(const void* a, const void* b, usize n);
usize strlen(const char* s);

/* Bump allocator over the linear-memory heap; grows memory on demand and
 * returns 0 on exhaustion. There is no free. */
void* tm_alloc_raw(usize n);

void tm_hex_encode(const u8* in, usize n, char* out); /* out needs 2n chars */

#endif /* TM_STD_H_ */
