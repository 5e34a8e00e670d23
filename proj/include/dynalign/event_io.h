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

#ifndef DYNALIGN_EVENT_IO_H_
#define DYNALIGN_EVENT_IO_H_

// Text formats for edge events, anchors and the id-mapping sidecar.
//
//   events:  src dst timestamp [weight] op      op in {a, r}, weight default 1
//   anchors: src_id tgt_id
//   ids:     external_id internal_index
//
// '#' starts a comment. External ids are arbitrary tokens mapped to 0-based
// indices in first-seen order.

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynalign/graph.h"

namespace dynalign {

class IdMap {
 public:
  // Returns the index for `id`, assigning the next one if unseen.
  int intern(const std::string& id);
  // Throws DataError if unseen.
  int at(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const std::string& name(int index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
};

std::vector<EdgeEvent> read_edge_events(std::istream& in, IdMap& ids);
void write_edge_events(std::ostream& out, const std::vector<EdgeEvent>& events,
                       const IdMap* ids = nullptr);

// Anchor ids are interned into the two maps, so anchored users without any
// edges still receive an index.
AnchorSet read_anchors(std::istream& in, IdMap& source_ids, IdMap& target_ids);
void write_anchors(std::ostream& out, const AnchorSet& anchors,
                   const IdMap* source_ids = nullptr,
                   const IdMap* target_ids = nullptr);

void write_id_map(std::ostream& out, const IdMap& ids);
IdMap read_id_map(std::istream& in);

// File helpers; throw DataError when a file cannot be opened.
std::vector<EdgeEvent> read_edge_events_file(const std::string& path,
                                             IdMap& ids);
AnchorSet read_anchors_file(const std::string& path, IdMap& source_ids,
                            IdMap& target_ids);

}  // namespace dynalign

#endif  // DYNALIGN_EVENT_IO_H_
