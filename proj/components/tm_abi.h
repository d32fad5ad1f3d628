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
 * Verification-component ABI. Components are wasm32 core modules that
 * export:
 *   tm_alloc(len: i32) -> i32            bump allocation in linear memory
 *   tm_evaluate(off: i32, len: i32) -> i64
 * The evaluate input is a CBOR map {"ev", "end", "erd"}; the return value
 * packs (output_offset << 32) | output_length of a CBOR map
 * {"ok": true, "claims": {...}} or {"ok": false, "code": ..., "detail": ...}.
 * Host functionality is imported from module "trustmee-host".
 */

#ifndef TM_ABI_H_
#define TM_ABI_H_

typedef unsigned char u8;
typedef unsigned short u16;
typedef unsigned int u32;
typedef unsigned long long u64;
typedef signed char i8;
typedef short i16;
typedef int i32;
typedef long long i64;
typedef unsigned long usize;

#define TM_EXPORT(name) __attribute__((export_name(name)))
#define TM_IMPORT(name) __attribute__((import_module("trustmee-host"), import_name(name)))

/* Host import error codes (negative returns). */
#define TM_ERR_NETWORK_DENIED (-1)
#define TM_ERR_FETCH_FAILED (-2)
#define TM_ERR_RESPONSE_TOO_LARGE (-3)
#define TM_ERR_NOT_FOUND (-4)
#define TM_ERR_PATH_ESCAPE (-5)
#define TM_ERR_QUOTA_EXCEEDED (-6)
#define TM_ERR_MALFORMED_KEY (-7)
#define TM_ERR_INTERNAL (-8)

TM_IMPORT("http_get")
i32 tm_http_get(const u8* url, i32 url_len, u8* dst, i32 dst_cap);
TM_IMPORT("cache_read")
i32 tm_cache_read(const u8* key, i32 key_len, u8* dst, i32 dst_cap);
TM_IMPORT("cache_write")
i32 tm_cache_write(const u8* key, i32 key_len, const u8* val, i32 val_len);
TM_IMPORT("verify_p256")
i32 tm_host_verify_p256(const u8* msg, i32 msg_len, const u8* sig64, const u8* pub65);
TM_IMPORT("now")
i64 tm_now_unix(void);
TM_IMPORT("log")
void tm_log(const u8* msg, i32 len);

static inline i64 tm_pack_result(const u8* ptr, u32 len) {
  return (i64)(((u64)(u32)(usize)ptr << 32) | (u64)len);
}

#endif /* TM_ABI_H_ */
