/*
 * Copyright 2026 The Dynalign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DYNALIGN_HASHING_H_
#define DYNALIGN_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace dynalign {

// 64-bit FNV-1a, used for config and data fingerprints.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update(std::int64_t v);
  void update(double v);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t v);
// Hash of a whole file's bytes. Throws DataError if unreadable.
std::uint64_t hash_file(const std::string& path);

}  // namespace dynalign

#endif  // DYNALIGN_HASHING_H_
