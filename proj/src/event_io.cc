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

#include "dynalign/event_io.h"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dynalign/errors.h"

namespace dynalign {
namespace {

std::vector<std::string> tokenize(const std::string& raw) {
  std::string line = raw.substr(0, raw.find('#'));
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad ") + what + " '" + tok + "'");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

}  // namespace

int IdMap::intern(const std::string& id) {
  auto [it, inserted] = index_.emplace(id, size());
  if (inserted) names_.push_back(id);
  return it->second;
}

int IdMap::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown user id '" + id + "'");
  return it->second;
}

std::vector<EdgeEvent> read_edge_events(std::istream& in, IdMap& ids) {
  std::vector<EdgeEvent> events;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const auto tok = tokenize(raw);
    if (tok.empty()) continue;
    if (tok.size() != 4 && tok.size() != 5) {
      throw ParseError(line, "expected 'src dst timestamp [weight] op'");
    }
    EdgeEvent ev;
    ev.timestamp = parse_real(tok[2], line, "timestamp");
    if (tok.size() == 5) ev.weight = parse_real(tok[3], line, "weight");
    if (!(ev.weight >= 0.0)) throw ParseError(line, "negative weight");
    const std::string& op = tok.back();
    if (op == "a") {
      ev.op = EdgeOp::kAdd;
    } else if (op == "r") {
      ev.op = EdgeOp::kRemove;
    } else {
      throw ParseError(line, "op must be 'a' or 'r', got '" + op + "'");
    }
    ev.src = ids.intern(tok[0]);
    ev.dst = ids.intern(tok[1]);
    events.push_back(ev);
  }
  return events;
}

void write_edge_events(std::ostream& out, const std::vector<EdgeEvent>& events,
                       const IdMap* ids) {
  auto name = [&](int i) {
    return ids ? ids->name(i) : std::to_string(i);
  };
  out << std::setprecision(17);
  for (const EdgeEvent& ev : events) {
    out << name(ev.src) << ' ' << name(ev.dst) << ' ' << ev.timestamp << ' '
        << ev.weight << ' ' << (ev.op == EdgeOp::kAdd ? 'a' : 'r') << '\n';
  }
}

AnchorSet read_anchors(std::istream& in, IdMap& source_ids, IdMap& target_ids) {
  AnchorSet anchors;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const auto tok = tokenize(raw);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(line, "expected 'src_id tgt_id'");
    anchors.push_back({source_ids.intern(tok[0]), target_ids.intern(tok[1])});
  }
  return anchors;
}

void write_anchors(std::ostream& out, const AnchorSet& anchors,
                   const IdMap* source_ids, const IdMap* target_ids) {
  for (const AnchorPair& a : anchors) {
    out << (source_ids ? source_ids->name(a.source) : std::to_string(a.source))
        << ' '
        << (target_ids ? target_ids->name(a.target) : std::to_string(a.target))
        << '\n';
  }
}

void write_id_map(std::ostream& out, const IdMap& ids) {
  for (int i = 0; i < ids.size(); ++i) out << ids.name(i) << ' ' << i << '\n';
}

IdMap read_id_map(std::istream& in) {
  IdMap ids;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const auto tok = tokenize(raw);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(line, "expected 'id index'");
    const int expected = ids.size();
    if (ids.intern(tok[0]) != expected || tok[1] != std::to_string(expected)) {
      throw ParseError(line, "id map must list indices 0..n-1 in order");
    }
  }
  return ids;
}

std::vector<EdgeEvent> read_edge_events_file(const std::string& path,
                                             IdMap& ids) {
  auto in = open_or_throw(path);
  try {
    return read_edge_events(in, ids);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

AnchorSet read_anchors_file(const std::string& path, IdMap& source_ids,
                            IdMap& target_ids) {
  auto in = open_or_throw(path);
  try {
    return read_anchors(in, source_ids, target_ids);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace dynalign
