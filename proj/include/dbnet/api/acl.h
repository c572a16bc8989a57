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

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace dbnet::api {

enum class Action { Read, Write, Execute, Admin };

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view s);

struct UserIdentity {
  std::string user_id;
  std::set<std::string> roles;
};

// Objects are named "schema:S", "table:S.T", "procedure:P" or
// "system:NAME". A rule's object is "*", an exact name, or a name ending in
// '*' that matches by prefix ("table:net.*").
struct AclRule {
  std::string role;
  std::string object;
  Action action = Action::Read;
};

inline constexpr const char* kAdminRole = "admin";

bool object_matches(std::string_view pattern, std::string_view object);

std::string schema_object(std::string_view schema);
std::string table_object(std::string_view qualified);
std::string procedure_object(std::string_view name);
std::string system_object(std::string_view name);

// Allow-only rules with default deny. The admin role, and any rule whose
// action is Admin, allows every action on what it matches.
class AccessControl {
 public:
  // Throws MalformedRequest for an empty user id. Replaces an existing user.
  void add_user(UserIdentity user);
  void grant(AclRule rule);

  std::optional<UserIdentity> find_user(const std::string& user_id) const;
  bool check(const UserIdentity& user, const std::string& object, Action action) const;
  std::vector<AclRule> rules() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, UserIdentity> users_;
  std::vector<AclRule> rules_;
};

}  // namespace dbnet::api
