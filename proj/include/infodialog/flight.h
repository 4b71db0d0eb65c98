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

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infodialog/query.h"
#include "infodialog/schema.h"

namespace infodialog {

// x' = (1664525 x + 1013904223) mod 2^32; the seed is the initial state.
class Lcg {
 public:
  explicit Lcg(std::uint32_t seed) : state_(seed) {}
  std::uint32_t next() {
    state_ = 1664525u * state_ + 1013904223u;
    return state_;
  }
  // Uses the high bits, which have the longer period.
  std::uint32_t uniform(std::uint32_t n) { return (next() >> 16) % n; }

 private:
  std::uint32_t state_;
};

inline constexpr std::array<std::string_view, 20> kCities = {
    "Atlanta", "Boston",  "Chicago",   "Dallas",      "Denver",
    "Detroit", "Dulles",  "Houston",   "Las Vegas",   "Los Angeles",
    "Miami",   "Minneapolis", "Newark", "New York",   "Orlando",
    "Philadelphia", "Phoenix", "San Francisco", "Seattle", "St Louis",
};

inline constexpr std::array<std::string_view, 3> kStatuses = {"on time", "delayed", "landed"};

struct FlightRow {
  int flight_number = 0;
  std::string departure_city;
  std::string arrival_city;
  int departure_time = 0;  // minutes after midnight
  int arrival_time = 0;
  std::string gate;
  std::string status;

  bool operator==(const FlightRow &) const = default;
};

// Rows planted when n is at least this many.
inline constexpr size_t kPlantedRows = 13;

// Flight numbers are unique three-digit numbers.
inline constexpr size_t kMaxRows = 900;

// Throws std::invalid_argument when n exceeds kMaxRows.
std::vector<FlightRow> generate_dataset(std::uint32_t seed, size_t n);

// '|'-separated dataset text with the flights header.
std::string serialize_dataset(const std::vector<FlightRow> &rows);
TableStore to_store(const std::vector<FlightRow> &rows);

// Empty when the rows satisfy every generator guarantee for threshold k.
std::vector<std::string> guarantee_violations(const std::vector<FlightRow> &rows, size_t k = 5);

// The airline site: one result script distinguishing its three forms by the
// hidden fltAns field, plus one page per form.
HttpReply handle_request(const std::string &path,
                         const std::vector<std::pair<std::string, std::string>> &params,
                         const TableStore &store, const DomainPack &pack);

std::string form_page(const CgiForm &form, const DomainPack &pack);

// Calls handle_request in-process; no sockets.
CgiTransport mock_transport(const TableStore &store, const DomainPack &pack);

struct MockSiteConfig {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  int latency_ms = 0;
};

class MockSite {
 public:
  MockSite(const TableStore &store, const DomainPack &pack, MockSiteConfig config);
  ~MockSite();

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Binds and serves on the calling thread until stop().
  void run();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace infodialog
