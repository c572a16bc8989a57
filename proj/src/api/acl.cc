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

#include "dbnet/api/acl.h"

#include <mutex>

#include "dbnet/common/error.h"

namespace dbnet::api {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Read: return "Read";
    case Action::Write: return "Write";
    case Action::Execute: return "Execute";
    case Action::Admin: return "Admin";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view s) {
  for (Action a : {Action::Read, Action::Write, Action::Execute, Action::Admin}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

bool object_matches(std::string_view pattern, std::string_view object) {
  if (pattern == "*") return true;
  if (!pattern.empty() && pattern.back() == '*') {
    std::string_view prefix = pattern.substr(0, pattern.size() - 1);
    return object.substr(0, prefix.size()) == prefix;
  }
  return pattern == object;
}

std::string schema_object(std::string_view schema) { return "schema:" + std::string(schema); }
std::string table_object(std::string_view qualified) { return "table:" + std::string(qualified); }
std::string procedure_object(std::string_view name) { return "procedure:" + std::string(name); }
std::string system_object(std::string_view name) { return "system:" + std::string(name); }

void AccessControl::add_user(UserIdentity user) {
  if (user.user_id.empty()) fail(ErrorKind::MalformedRequest, "user_id must not be empty");
  std::unique_lock lock(mu_);
  users_[user.user_id] = std::move(user);
}

void AccessControl::grant(AclRule rule) {
  if (rule.role.empty() || rule.object.empty()) fail(ErrorKind::MalformedRequest, "a rule needs a role and an object");
  std::unique_lock lock(mu_);
  rules_.push_back(std::move(rule));
}

std::optional<UserIdentity> AccessControl::find_user(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  auto it = users_.find(user_id);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

bool AccessControl::check(const UserIdentity& user, const std::string& object, Action action) const {
  if (user.roles.count(kAdminRole)) return true;
  std::shared_lock lock(mu_);
  for (const auto& r : rules_) {
    if (!user.roles.count(r.role)) continue;
    if (r.action != Action::Admin && r.action != action) continue;
    if (object_matches(r.object, object)) return true;
  }
  return false;
}

std::vector<AclRule> AccessControl::rules() const {
  std::shared_lock lock(mu_);
  return rules_;
}

}  // namespace dbnet::api
