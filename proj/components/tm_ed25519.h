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

#ifndef TM_ED25519_H_
#define TM_ED25519_H_

#include "tm_abi.h"

/* Returns 1 when sig is a valid Ed25519 signature over msg under pk.
 * Rejects non-canonical scalars, matching common strict verifiers. */
int tm_ed25519_verify(const u8* msg, usize msg_len, const u8 sig[64], const u8 pk[32]);

#endif /* TM_ED25519_H_ */
