// Copyright 2026 The InfoDialog Authors.
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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infodialog/dialog.h"
#include "infodialog/interactor.h"
#include "infodialog/query.h"
#include "infodialog/schema.h"

namespace infodialog {

using json = nlohmann::json;

enum class Backend { kLocal, kCgi };

std::string_view name_of(Backend b);
std::optional<Backend> parse_backend(std::string_view s);

// A loaded pack and its dataset, shared read-only by sessions.
struct Domain {
  std::string name;
  DomainPack pack;
  TableStore store;
};

Domain load_domain(const std::filesystem::path &root,
                   const std::filesystem::path &data_dir = default_data_dir());

// All packs under one directory, keyed by domain name.
class DomainRegistry {
 public:
  explicit DomainRegistry(const std::filesystem::path &packs_dir = default_packs_dir(),
                          const std::filesystem::path &data_dir = default_data_dir());
  const Domain &get(const std::string &name) const;  // throws UnknownDomain
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::unique_ptr<Domain>> domains_;
};

struct SessionConfig {
  std::string domain = "flights";
  Backend backend = Backend::kLocal;
  std::uint32_t seed = 0;
  std::string cgi_url;  // empty: the mock site in-process
  size_t few_threshold = 0;
  bool vary_prompts = false;

  json to_json() const;
  static SessionConfig from_json(const json &j);
};

struct TranscriptEntry {
  int turn = 0;
  std::string utterance;
  UpperState state = UpperState::kInitial;
  std::optional<LowerState> sub_state;
  std::string reply;
  bool queried = false;
  std::optional<size_t> match_count;
  std::string cause;
  int querier_invocations = 0;
  std::string timestamp;

  json to_json() const;
  static TranscriptEntry from_json(const json &j);
};

struct TranscriptFile {
  std::string session_id;
  SessionConfig config;
  std::vector<TranscriptEntry> entries;
};

struct TurnDebug {
  std::string cause;
  std::string act;
  int querier_invocations = 0;
  int classification_queries = 0;
  int probe_queries = 0;
  bool queried = false;
  std::optional<size_t> match_count;
  int turn = 0;
};

struct TurnResponse {
  std::string reply;
  UpperState state = UpperState::kInitial;
  std::optional<LowerState> sub_state;
  Bindings bindings;
  bool closed = false;
  TurnDebug debug;

  json to_json(const ApplicationSchema &schema) const;
};

class Session {
 public:
  Session(std::string id, const Domain &domain, SessionConfig config,
          std::optional<std::filesystem::path> transcript_file = std::nullopt);

  const std::string &id() const { return id_; }
  const SessionConfig &config() const { return config_; }
  const Domain &domain() const { return domain_; }

  // Throws SessionClosed once the dialogue has ended.
  TurnResponse step(const std::string &utterance);

  std::vector<TranscriptEntry> transcript() const;
  DialogueContext context() const;
  bool closed() const;
  std::string greeting() const;
  std::chrono::steady_clock::time_point last_used() const;

 private:
  friend class SessionManager;

  void append(const TranscriptEntry &entry);
  // Replays a saved history (without writing), then adopts its entries and
  // appends to `file` from now on.
  void restore(const TranscriptFile &saved, const std::filesystem::path &file);

  std::string id_;
  const Domain &domain_;
  SessionConfig config_;
  std::unique_ptr<Querier> querier_;
  std::optional<std::filesystem::path> file_;

  mutable std::mutex mu_;
  DialogueContext context_;
  std::vector<TranscriptEntry> transcript_;
  bool closed_ = false;
  std::chrono::steady_clock::time_point last_used_;
};

TranscriptFile read_transcript(const std::filesystem::path &path);

struct ReplayMismatch {
  int turn = 0;
  std::string expected;
  std::string actual;
};

// Feeds the recorded utterances to a fresh session and compares every
// state and reply.
std::vector<ReplayMismatch> replay(const TranscriptFile &file, const DomainRegistry &registry);

struct SessionManagerOptions {
  std::chrono::seconds ttl{30 * 60};
  std::optional<std::filesystem::path> transcript_dir;
};

class SessionManager {
 public:
  explicit SessionManager(const DomainRegistry &registry, SessionManagerOptions options = {});

  std::shared_ptr<Session> create(const SessionConfig &config);
  // Falls back to the transcript directory for sessions of an earlier run.
  std::shared_ptr<Session> get(const std::string &id);  // throws UnknownSession
  size_t expire_idle();
  size_t size() const;

 private:
  std::string new_id();

  const DomainRegistry &registry_;
  SessionManagerOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// JSON HTTP API over a session manager.
class ApiServer {
 public:
  ApiServer(SessionManager &sessions, const DomainRegistry &registry);
  ~ApiServer();

  int start(const std::string &host = "127.0.0.1", int port = 0);  // background thread
  void run(const std::string &host, int port);                      // blocks
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace infodialog
