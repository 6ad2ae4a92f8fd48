/* Copyright 2026 The offload-tuner Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace offload {

/// 64-bit FNV-1a. Used for pattern fingerprints and model digests; not a
/// cryptographic hash.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Lower-case, zero-padded 16-character hex rendering of `fnv1a64(bytes)`.
std::string hex_digest(std::string_view bytes);

}  // namespace offload
