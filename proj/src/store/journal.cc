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

#include "dbnet/store/journal.h"

#include <filesystem>
#include <sstream>

#include "dbnet/common/error.h"

namespace dbnet {

namespace {
constexpr std::string_view kMagic = "DBN1\n";
}

JournalWriter::JournalWriter(std::string path) : path_(std::move(path)) {
  bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
  if (!fresh) read_journal(path_);  // validates the header
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) fail(ErrorKind::Io, "cannot open journal '" + path_ + "'");
  if (fresh) {
    out_ << kMagic;
    out_.flush();
  }
}

void JournalWriter::append(const Json& record) {
  std::string body = record.dump();
  std::lock_guard<std::mutex> lock(mu_);
  out_ << body.size() << ':' << body << '\n';
  out_.flush();
  if (!out_) fail(ErrorKind::Io, "write to journal '" + path_ + "' failed");
}

std::vector<Json> read_journal(const std::string& path) {
  std::vector<Json> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  if (data.empty()) return out;
  if (data.compare(0, kMagic.size(), kMagic) != 0) {
    fail(ErrorKind::Io, "journal '" + path + "' does not start with DBN1");
  }
  size_t pos = kMagic.size();
  while (pos < data.size()) {
    size_t colon = data.find(':', pos);
    if (colon == std::string::npos) break;  // torn length prefix
    size_t len = 0;
    try {
      len = std::stoull(data.substr(pos, colon - pos));
    } catch (const std::exception&) {
      fail(ErrorKind::Io, "journal '" + path + "' has a corrupt length at byte " + std::to_string(pos));
    }
    size_t end = colon + 1 + len;
    if (end >= data.size() || data[end] != '\n') {
      if (end >= data.size()) break;  // torn body
      fail(ErrorKind::Io, "journal '" + path + "' has a corrupt record at byte " + std::to_string(pos));
    }
    try {
      out.push_back(Json::parse(data.substr(colon + 1, len)));
    } catch (const Json::exception& e) {
      fail(ErrorKind::Io, "journal '" + path + "' record does not parse: " + e.what());
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace dbnet
