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

// Stand-alone mock airline web site.

#include <CLI11.hpp>

#include <iostream>

#include "infodialog/errors.h"
#include "infodialog/flight.h"
#include "infodialog/schema.h"

using namespace infodialog;

int main(int argc, char **argv) {
  CLI::App app{"Mock airline flight information site"};
  app.require_subcommand(1);
  MockSiteConfig config;
  config.port = 8081;
  std::string dataset;
  std::string pack_dir = (default_packs_dir() / "flights").string();
  auto *serve = app.add_subcommand("serve", "Serve the form pages and result script");
  serve->add_option("--port", config.port);
  serve->add_option("--host", config.host);
  serve->add_option("--dataset", dataset, "Dataset file (default: the pack's)");
  serve->add_option("--latency-ms", config.latency_ms, "Delay added to every result page");
  serve->add_option("--pack", pack_dir, "Flight domain pack directory");
  CLI11_PARSE(app, argc, argv);
  try {
    DomainPack pack = load_domain_pack(pack_dir);
    if (dataset.empty()) dataset = (std::filesystem::path(pack_dir) / pack.schema.dataset).string();
    TableStore store = TableStore::load(dataset);
    MockSite site(store, pack, config);
    std::cerr << "mock site on " << config.host << ":" << config.port << "\n";
    site.run();
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
