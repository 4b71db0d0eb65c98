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

// Command-line front end: interactive dialogues, the HTTP API, transcript
// replay and dataset generation.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include "infodialog/errors.h"
#include "infodialog/flight.h"
#include "infodialog/service.h"

using namespace infodialog;

namespace {

int repl(const std::string &packs, SessionConfig config, bool debug,
         const std::string &transcript) {
  DomainRegistry registry(packs);
  std::optional<std::filesystem::path> file;
  if (!transcript.empty()) file = transcript;
  Session session("repl", registry.get(config.domain), config, file);
  std::cout << "system: " << session.greeting() << "\n";
  std::string line;
  while (std::cout << "user: " << std::flush, std::getline(std::cin, line)) {
    TurnResponse r = session.step(line);
    std::cout << "system: " << r.reply << "\n";
    if (debug) {
      std::cout << "  [" << name_of(r.state);
      if (r.sub_state) std::cout << "/" << name_of(*r.sub_state);
      std::cout << " cause=" << r.debug.cause << " queries=" << r.debug.querier_invocations << "]\n";
    }
    if (r.closed) break;
  }
  return 0;
}

int serve(const std::string &packs, const std::string &host, int port, const std::string &transcripts,
          int ttl_minutes) {
  DomainRegistry registry(packs);
  SessionManagerOptions options;
  options.ttl = std::chrono::minutes(ttl_minutes);
  if (!transcripts.empty()) options.transcript_dir = transcripts;
  SessionManager sessions(registry, options);
  std::atomic<bool> running{true};
  std::thread gc([&] {
    while (running) {
      std::this_thread::sleep_for(std::chrono::seconds(1));
      static int ticks = 0;
      if (++ticks % 60 == 0) sessions.expire_idle();
    }
  });
  ApiServer server(sessions, registry);
  std::cerr << "serving " << host << ":" << port << "\n";
  server.run(host, port);
  running = false;
  gc.join();
  return 0;
}

int replay_file(const std::string &packs, const std::string &path) {
  DomainRegistry registry(packs);
  TranscriptFile file = read_transcript(path);
  auto mismatches = replay(file, registry);
  for (const auto &m : mismatches)
    std::cout << "turn " << m.turn << ":\n  expected " << m.expected << "\n  actual   " << m.actual << "\n";
  std::cout << (mismatches.empty() ? "replay ok" : "replay FAILED") << " (" << file.entries.size()
            << " entries)\n";
  return mismatches.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Mixed-initiative information dialogue manager"};
  app.require_subcommand(1);
  std::string packs = default_packs_dir().string();
  app.add_option("--packs", packs, "Directory of domain packs");

  SessionConfig config;
  std::string backend = "local";
  bool debug = false;
  std::string transcript;
  auto *repl_cmd = app.add_subcommand("repl", "Talk to the system on stdin/stdout");
  repl_cmd->add_option("--domain", config.domain, "Domain pack name");
  repl_cmd->add_option("--backend", backend, "local or cgi")->check(CLI::IsMember({"local", "cgi"}));
  repl_cmd->add_option("--cgi-url", config.cgi_url, "Airline site base URL (default: in-process mock)");
  repl_cmd->add_option("--seed", config.seed, "Prompt variation seed");
  repl_cmd->add_option("--few-threshold", config.few_threshold, "Largest match count listed in full");
  repl_cmd->add_flag("--vary", config.vary_prompts, "Vary prompts among rule alternatives");
  repl_cmd->add_flag("--debug", debug, "Print state and query counts per turn");
  repl_cmd->add_option("--transcript", transcript, "Write a JSONL transcript here");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string transcripts;
  int ttl = 30;
  auto *serve_cmd = app.add_subcommand("serve", "Serve the JSON HTTP API");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--transcripts", transcripts, "Directory for session transcripts");
  serve_cmd->add_option("--ttl-minutes", ttl, "Idle session lifetime");

  std::string replay_path;
  auto *replay_cmd = app.add_subcommand("replay", "Re-run a transcript and compare every turn");
  replay_cmd->add_option("transcript", replay_path)->required();

  std::uint32_t gen_seed = 7;
  size_t gen_n = 200;
  std::string gen_out;
  auto *gen_cmd = app.add_subcommand("gen-dataset", "Write the generated flight dataset");
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--n", gen_n);
  gen_cmd->add_option("--out", gen_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*repl_cmd) {
      config.backend = *parse_backend(backend);
      return repl(packs, config, debug, transcript);
    }
    if (*serve_cmd) return serve(packs, host, port, transcripts, ttl);
    if (*replay_cmd) return replay_file(packs, replay_path);
    if (*gen_cmd) {
      std::string text = serialize_dataset(generate_dataset(gen_seed, gen_n));
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(gen_out) << text;
      }
      return 0;
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
