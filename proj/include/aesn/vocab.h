// Copyright 2026 The AESN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AESN_VOCAB_H_
#define AESN_VOCAB_H_

#include <string>
#include <unordered_map>
#include <vector>

namespace aesn {

// String <-> dense id map. Id 0 is reserved for unknown entries.
class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocab() { items_.push_back(kUnkToken); }

  // Returns the id of `s`, inserting it when new.
  int Add(const std::string& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(items_.size()));
    if (inserted) items_.push_back(s);
    return it->second;
  }
  int Lookup(const std::string& s) const {
    auto it = ids_.find(s);
    return it == ids_.end() ? kUnk : it->second;
  }
  bool Contains(const std::string& s) const { return ids_.count(s) > 0; }
  const std::string& item(int id) const { return items_.at(id); }
  // Entry count including the UNK slot.
  size_t size() const { return items_.size(); }
  // Entries without the UNK slot, in id order.
  std::vector<std::string> Entries() const { return {items_.begin() + 1, items_.end()}; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> items_;
};

}  // namespace aesn

#endif  // AESN_VOCAB_H_
