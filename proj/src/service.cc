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

#include "infodialog/service.h"

#include <httplib.h>

#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "infodialog/conf.h"
#include "infodialog/errors.h"
#include "infodialog/flight.h"
#include "infodialog/nlu.h"
#include "infodialog/text.h"

namespace infodialog {

std::string_view name_of(Backend b) { return b == Backend::kLocal ? "local" : "cgi"; }

std::optional<Backend> parse_backend(std::string_view s) {
  if (s == "local") return Backend::kLocal;
  if (s == "cgi") return Backend::kCgi;
  return std::nullopt;
}

Domain load_domain(const std::filesystem::path &root, const std::filesystem::path &data_dir) {
  Domain d;
  d.pack = load_domain_pack(root, data_dir);
  d.name = d.pack.schema.domain_name;
  if (!d.pack.schema.dataset.empty()) {
    auto path = root / d.pack.schema.dataset;
    if (!std::filesystem::exists(path)) throw MissingFile(d.pack.schema.dataset);
    d.store = TableStore::load(path);
  }
  return d;
}

DomainRegistry::DomainRegistry(const std::filesystem::path &packs_dir,
                               const std::filesystem::path &data_dir) {
  std::vector<std::filesystem::path> dirs;
  for (const auto &entry : std::filesystem::directory_iterator(packs_dir))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "schema.conf"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto &dir : dirs) {
    auto d = std::make_unique<Domain>(load_domain(dir, data_dir));
    std::string name = d->name;
    domains_[name] = std::move(d);
  }
}

const Domain &DomainRegistry::get(const std::string &name) const {
  auto it = domains_.find(name);
  if (it == domains_.end()) throw UnknownDomain(name);
  return *it->second;
}

std::vector<std::string> DomainRegistry::names() const {
  std::vector<std::string> out;
  for (const auto &[name, d] : domains_) out.push_back(name);
  return out;
}

json SessionConfig::to_json() const {
  return {{"domain", domain},
          {"backend", std::string(name_of(backend))},
          {"seed", seed},
          {"cgi_url", cgi_url},
          {"few_threshold", few_threshold},
          {"vary_prompts", vary_prompts}};
}

SessionConfig SessionConfig::from_json(const json &j) {
  SessionConfig c;
  c.domain = j.value("domain", c.domain);
  auto backend = parse_backend(j.value("backend", std::string("local")));
  if (!backend) throw Error("backend must be local or cgi");
  c.backend = *backend;
  c.seed = j.value("seed", 0u);
  c.cgi_url = j.value("cgi_url", std::string());
  c.few_threshold = j.value("few_threshold", static_cast<size_t>(0));
  c.vary_prompts = j.value("vary_prompts", false);
  return c;
}

json TranscriptEntry::to_json() const {
  json j = {{"type", "turn"},
            {"turn", turn},
            {"utterance", utterance},
            {"state", std::string(name_of(state))},
            {"sub_state", sub_state ? json(std::string(name_of(*sub_state))) : json(nullptr)},
            {"reply", reply},
            {"queried", queried},
            {"match_count", match_count ? json(*match_count) : json(nullptr)},
            {"cause", cause},
            {"querier_invocations", querier_invocations},
            {"timestamp", timestamp}};
  return j;
}

TranscriptEntry TranscriptEntry::from_json(const json &j) {
  TranscriptEntry e;
  e.turn = j.at("turn").get<int>();
  e.utterance = j.at("utterance").get<std::string>();
  auto state = parse_upper_state(j.at("state").get<std::string>());
  if (!state) throw Error("bad state in transcript");
  e.state = *state;
  if (!j.at("sub_state").is_null()) e.sub_state = parse_lower_state(j.at("sub_state").get<std::string>());
  e.reply = j.at("reply").get<std::string>();
  e.queried = j.value("queried", false);
  if (j.contains("match_count") && !j["match_count"].is_null()) e.match_count = j["match_count"].get<size_t>();
  e.cause = j.value("cause", std::string());
  e.querier_invocations = j.value("querier_invocations", 0);
  e.timestamp = j.value("timestamp", std::string());
  return e;
}

json TurnResponse::to_json(const ApplicationSchema &schema) const {
  json b = json::object();
  for (const auto &[name, fb] : bindings) {
    b[name] = {{"value", is_number(fb.value) ? json(std::get<std::int64_t>(fb.value))
                                              : json(std::get<std::string>(fb.value))},
               {"display", display_value(schema, name, fb.value, fb.approx)},
               {"status", std::string(name_of(fb.status))},
               {"approx", fb.approx},
               {"window", fb.window}};
  }
  return {{"reply", reply},
          {"state", std::string(name_of(state))},
          {"sub_state", sub_state ? json(std::string(name_of(*sub_state))) : json(nullptr)},
          {"bindings", b},
          {"closed", closed},
          {"debug",
           {{"cause", debug.cause},
            {"act", debug.act},
            {"querier_invocations", debug.querier_invocations},
            {"classification_queries", debug.classification_queries},
            {"probe_queries", debug.probe_queries},
            {"queried", debug.queried},
            {"match_count", debug.match_count ? json(*debug.match_count) : json(nullptr)},
            {"turn", debug.turn}}}};
}

namespace {

std::string now_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Session::Session(std::string id, const Domain &domain, SessionConfig config,
                 std::optional<std::filesystem::path> transcript_file)
    : id_(std::move(id)), domain_(domain), config_(std::move(config)), file_(std::move(transcript_file)) {
  if (config_.backend == Backend::kLocal) {
    querier_ = std::make_unique<LocalQuerier>(domain_.store);
  } else {
    CgiTransport transport = config_.cgi_url.empty() ? mock_transport(domain_.store, domain_.pack)
                                                     : http_transport(config_.cgi_url);
    querier_ = std::make_unique<CgiQuerier>(domain_.pack, domain_.store.columns(), std::move(transport));
  }
  context_.last_template = infodialog::greeting(domain_.pack);
  TranscriptEntry first;
  first.turn = 0;
  first.state = UpperState::kInitial;
  first.reply = render_or_apologize(context_.last_template, domain_.pack.rules,
                                    {config_.seed, 0, config_.vary_prompts});
  first.cause = "greeting";
  first.timestamp = now_utc();
  if (file_) {
    std::ofstream out(*file_, std::ios::trunc);
    json header = {{"type", "session"}, {"session_id", id_}, {"config", config_.to_json()}};
    out << header.dump() << "\n";
  }
  append(first);
  last_used_ = std::chrono::steady_clock::now();
}

void Session::append(const TranscriptEntry &entry) {
  transcript_.push_back(entry);
  if (!file_) return;
  std::ofstream out(*file_, std::ios::app);
  out << entry.to_json().dump() << "\n";
}

TurnResponse Session::step(const std::string &utterance) {
  std::lock_guard<std::mutex> lock(mu_);
  if (closed_) throw SessionClosed(id_);
  last_used_ = std::chrono::steady_clock::now();

  const DomainPack &pack = domain_.pack;
  ExtractionResult ex = understand(utterance, pack, context_);
  size_t before = querier_->invocations();
  DialogOptions options;
  options.few_threshold = config_.few_threshold;
  TurnOutcome outcome = decide_state(context_, ex, pack, *querier_, options);
  const StateDecision &d = outcome.decision;
  context_ = outcome.context;
  int turn = static_cast<int>(transcript_.size());

  TurnResponse r;
  r.reply = render_or_apologize(d.template_, pack.rules, {config_.seed, turn, config_.vary_prompts});
  r.state = d.state;
  r.sub_state = d.sub_state;
  r.bindings = context_.bindings;
  r.closed = d.state == UpperState::kQuit;
  r.debug.cause = d.cause;
  r.debug.act = std::string(name_of(d.template_.act));
  r.debug.querier_invocations = static_cast<int>(querier_->invocations() - before);
  r.debug.classification_queries = d.classification_queries;
  r.debug.probe_queries = d.probe_queries;
  r.debug.queried = d.queried;
  r.debug.match_count = d.match_count;
  r.debug.turn = turn;
  closed_ = r.closed;

  TranscriptEntry e;
  e.turn = turn;
  e.utterance = utterance;
  e.state = d.state;
  e.sub_state = d.sub_state;
  e.reply = r.reply;
  e.queried = d.queried;
  e.match_count = d.match_count;
  e.cause = d.cause;
  e.querier_invocations = r.debug.querier_invocations;
  e.timestamp = now_utc();
  append(e);
  return r;
}

std::vector<TranscriptEntry> Session::transcript() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transcript_;
}

DialogueContext Session::context() const {
  std::lock_guard<std::mutex> lock(mu_);
  return context_;
}

bool Session::closed() const {
  std::lock_guard<std::mutex> lock(mu_);
  return closed_;
}

std::string Session::greeting() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transcript_.front().reply;
}

std::chrono::steady_clock::time_point Session::last_used() const {
  std::lock_guard<std::mutex> lock(mu_);
  return last_used_;
}

void Session::restore(const TranscriptFile &saved, const std::filesystem::path &file) {
  for (const auto &e : saved.entries)
    if (e.turn > 0 && !closed_) step(e.utterance);
  std::lock_guard<std::mutex> lock(mu_);
  transcript_ = saved.entries;
  file_ = file;
}

TranscriptFile read_transcript(const std::filesystem::path &path) {
  std::istringstream in(read_file(path));
  TranscriptFile f;
  std::string line;
  bool header = false;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      throw ParseError(path.filename().string(), number, e.what());
    }
    try {
      if (j.value("type", "") == "session") {
        f.session_id = j.value("session_id", "");
        f.config = SessionConfig::from_json(j.at("config"));
        header = true;
      } else {
        f.entries.push_back(TranscriptEntry::from_json(j));
      }
    } catch (const json::exception &e) {
      throw ParseError(path.filename().string(), number, e.what());
    }
  }
  if (!header) throw ParseError(path.filename().string(), 1, "missing session header");
  return f;
}

std::vector<ReplayMismatch> replay(const TranscriptFile &file, const DomainRegistry &registry) {
  std::vector<ReplayMismatch> out;
  Session s("replay", registry.get(file.config.domain), file.config);
  auto describe = [](UpperState st, const std::optional<LowerState> &sub, const std::string &reply) {
    std::string d(name_of(st));
    if (sub) d += "/" + std::string(name_of(*sub));
    return d + ": " + reply;
  };
  for (const auto &e : file.entries) {
    if (e.turn == 0) {
      if (s.greeting() != e.reply) out.push_back({0, e.reply, s.greeting()});
      continue;
    }
    if (s.closed()) {
      out.push_back({e.turn, describe(e.state, e.sub_state, e.reply), "(session closed)"});
      break;
    }
    TurnResponse r = s.step(e.utterance);
    std::string want = describe(e.state, e.sub_state, e.reply);
    std::string got = describe(r.state, r.sub_state, r.reply);
    if (want != got) out.push_back({e.turn, want, got});
  }
  return out;
}

SessionManager::SessionManager(const DomainRegistry &registry, SessionManagerOptions options)
    : registry_(registry), options_(std::move(options)) {
  if (options_.transcript_dir) std::filesystem::create_directories(*options_.transcript_dir);
}

std::string SessionManager::new_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

std::shared_ptr<Session> SessionManager::create(const SessionConfig &config) {
  const Domain &domain = registry_.get(config.domain);
  std::lock_guard<std::mutex> lock(mu_);
  std::string id;
  do {
    id = new_id();
  } while (sessions_.count(id));
  std::optional<std::filesystem::path> file;
  if (options_.transcript_dir) file = *options_.transcript_dir / (id + ".jsonl");
  auto s = std::make_shared<Session>(id, domain, config, file);
  sessions_[id] = s;
  return s;
}

std::shared_ptr<Session> SessionManager::get(const std::string &id) {
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  bool safe = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
  if (!safe || !options_.transcript_dir) throw UnknownSession(id);
  auto path = *options_.transcript_dir / (id + ".jsonl");
  if (!std::filesystem::exists(path)) throw UnknownSession(id);
  TranscriptFile f = read_transcript(path);
  auto s = std::make_shared<Session>(id, registry_.get(f.config.domain), f.config);
  s->restore(f, path);
  sessions_[id] = s;
  return s;
}

size_t SessionManager::expire_idle() {
  std::lock_guard<std::mutex> lock(mu_);
  auto now = std::chrono::steady_clock::now();
  size_t n = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_used() > options_.ttl) {
      it = sessions_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

size_t SessionManager::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

struct ApiServer::Impl {
  SessionManager &sessions;
  const DomainRegistry &registry;
  httplib::Server server;
  std::thread thread;

  Impl(SessionManager &s, const DomainRegistry &r) : sessions(s), registry(r) { routes(); }

  static void reply(httplib::Response &res, int status, const json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }
  static void fail(httplib::Response &res, int status, const std::string &error,
                   const std::string &detail) {
    reply(res, status, {{"error", error}, {"detail", detail}});
  }

  // Maps library errors onto status codes.
  template <typename F>
  static void guarded(httplib::Response &res, F &&f) {
    try {
      f();
    } catch (const UnknownSession &e) {
      fail(res, 404, "unknown_session", e.what());
    } catch (const UnknownDomain &e) {
      fail(res, 404, "unknown_domain", e.what());
    } catch (const SessionClosed &e) {
      fail(res, 409, "session_closed", e.what());
    } catch (const json::exception &e) {
      fail(res, 400, "bad_request", e.what());
    } catch (const QuerierUnavailable &e) {
      fail(res, 503, "backend_unavailable", e.what());
    } catch (const Error &e) {
      fail(res, 400, "bad_request", e.what());
    }
  }

  void routes() {
    server.Get("/api/domains", [this](const httplib::Request &, httplib::Response &res) {
      reply(res, 200, {{"domains", registry.names()}});
    });
    server.Post("/api/session", [this](const httplib::Request &req, httplib::Response &res) {
      guarded(res, [&] {
        json body = req.body.empty() ? json::object() : json::parse(req.body);
        auto s = sessions.create(SessionConfig::from_json(body));
        reply(res, 201, {{"session_id", s->id()}, {"greeting", s->greeting()}, {"state", "INITIAL"}});
      });
    });
    server.Post(R"(/api/session/([0-9a-f]+)/utterance)",
                [this](const httplib::Request &req, httplib::Response &res) {
                  guarded(res, [&] {
                    json body = json::parse(req.body);
                    auto s = sessions.get(req.matches[1]);
                    auto r = s->step(body.at("text").get<std::string>());
                    reply(res, 200, r.to_json(s->domain().pack.schema));
                  });
                });
    server.Get(R"(/api/session/([0-9a-f]+)/transcript)",
               [this](const httplib::Request &req, httplib::Response &res) {
                 guarded(res, [&] {
                   auto s = sessions.get(req.matches[1]);
                   json entries = json::array();
                   for (const auto &e : s->transcript()) entries.push_back(e.to_json());
                   reply(res, 200, {{"session_id", s->id()}, {"entries", entries}});
                 });
               });
    server.set_error_handler([](const httplib::Request &, httplib::Response &res) {
      if (res.body.empty()) fail(res, res.status, "not_found", "no such endpoint");
    });
  }
};

ApiServer::ApiServer(SessionManager &sessions, const DomainRegistry &registry)
    : impl_(std::make_unique<Impl>(sessions, registry)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string &host, int port) {
  int bound = port > 0 ? (impl_->server.bind_to_port(host, port) ? port : -1)
                       : impl_->server.bind_to_any_port(host);
  if (bound < 0) throw Error("cannot bind API server to port " + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::run(const std::string &host, int port) {
  if (!impl_->server.listen(host, port)) throw Error("cannot listen on port " + std::to_string(port));
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace infodialog
