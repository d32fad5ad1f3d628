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
 * Adversarial fixture: never terminates. Exercises fuel metering.
 */

#include "tm_abi.h"
#include "tm_cbor.h"
#include "tm_std.h"

static volatile u64 sink;

TM_EXPORT("tm_evaluate")
i64 tm_evaluate(u32 in_off, u32 in_len) {
  (void)in_off;
  (void)in_len;
  u64 i = 0;
  for (;;) sink = i++;
}
