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

#include "dynalign/hashing.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dynalign/errors.h"

namespace dynalign {

void Fnv1a::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::update(std::int64_t v) {
  char buf[sizeof v];
  std::memcpy(buf, &v, sizeof v);
  update(std::string_view(buf, sizeof buf));
}

void Fnv1a::update(double v) {
  char buf[sizeof v];
  std::memcpy(buf, &v, sizeof v);
  update(std::string_view(buf, sizeof buf));
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Fnv1a h;
  h.update(bytes);
  return h.digest();
}

}  // namespace dynalign
