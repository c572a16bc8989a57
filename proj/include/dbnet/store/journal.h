// Copyright 2026 The dbnet Authors.
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

#pragma once

#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "dbnet/store/codec.h"

namespace dbnet {

// Append-only file of committed batches: the 5-byte header "DBN1\n", then
// one record per line as `<byte length>:<json>\n`.
class JournalWriter {
 public:
  explicit JournalWriter(std::string path);
  void append(const Json& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::mutex mu_;
};

// Reads every complete record. A missing file yields no records; a torn
// final record (crash during append) is ignored. Throws Io on a bad header
// or a corrupt record in the middle of the file.
std::vector<Json> read_journal(const std::string& path);

}  // namespace dbnet
