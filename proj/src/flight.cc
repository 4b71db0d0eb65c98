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

#include "infodialog/flight.h"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "infodialog/errors.h"
#include "infodialog/text.h"

namespace infodialog {

namespace {

constexpr int kFirstSlot = 5 * 60;        // 05:00
constexpr int kLastSlot = 23 * 60 + 55;   // 23:55

struct Generator {
  Lcg lcg;
  std::set<int> used_numbers;

  int flight_number() {
    for (;;) {
      int n = 100 + static_cast<int>(lcg.uniform(900));
      if (used_numbers.insert(n).second) return n;
    }
  }
  std::string gate() {
    std::string g(1, static_cast<char>('A' + lcg.uniform(5)));
    return g + std::to_string(1 + lcg.uniform(20));
  }
  std::string status() { return std::string(kStatuses[lcg.uniform(3)]); }
  int duration() { return 45 + 5 * static_cast<int>(lcg.uniform(60)); }

  FlightRow timed(int number, std::string_view dep, std::string_view arr, int arrival) {
    FlightRow r;
    r.flight_number = number;
    r.departure_city = dep;
    r.arrival_city = arr;
    r.arrival_time = arrival;
    r.departure_time = std::max(kFirstSlot, arrival - duration());
    r.gate = gate();
    r.status = status();
    return r;
  }
};

}  // namespace

std::vector<FlightRow> generate_dataset(std::uint32_t seed, size_t n) {
  if (n > kMaxRows) throw std::invalid_argument("at most " + std::to_string(kMaxRows) + " flights");
  Generator g{Lcg(seed), {}};
  std::vector<FlightRow> rows;
  rows.reserve(n);
  const std::pair<std::string_view, std::string_view> many_pair{"Boston", "Dallas"};
  const std::pair<std::string_view, std::string_view> few_pair{"Newark", "Miami"};

  if (n >= kPlantedRows) {
    g.used_numbers.insert(472);
    rows.push_back(g.timed(472, "New York", "Dallas", 10 * 60 + 30));
    for (int i = 0; i < 8; ++i)
      rows.push_back(g.timed(g.flight_number(), many_pair.first, many_pair.second,
                             16 * 60 + 5 * static_cast<int>(g.lcg.uniform(25))));
    for (int i = 0; i < 3; ++i)
      rows.push_back(g.timed(g.flight_number(), few_pair.first, few_pair.second,
                             9 * 60 + 5 * static_cast<int>(g.lcg.uniform(25))));
    rows.push_back(g.timed(g.flight_number(), "Dulles", "Atlanta",
                           13 * 60 + 5 * static_cast<int>(g.lcg.uniform(25))));
  }

  while (rows.size() < n) {
    std::string_view dep = kCities[g.lcg.uniform(20)];
    std::string_view arr = kCities[g.lcg.uniform(20)];
    if (dep == arr) continue;
    if (n >= kPlantedRows && ((dep == many_pair.first && arr == many_pair.second) ||
                              (dep == few_pair.first && arr == few_pair.second)))
      continue;
    FlightRow r;
    r.flight_number = g.flight_number();
    r.departure_city = dep;
    r.arrival_city = arr;
    int duration = g.duration();
    int slots = (kLastSlot - duration - kFirstSlot) / 5 + 1;
    r.departure_time = kFirstSlot + 5 * static_cast<int>(g.lcg.uniform(static_cast<std::uint32_t>(slots)));
    r.arrival_time = r.departure_time + duration;
    r.gate = g.gate();
    r.status = g.status();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string serialize_dataset(const std::vector<FlightRow> &rows) {
  return to_store(rows).serialize();
}

TableStore to_store(const std::vector<FlightRow> &rows) {
  std::vector<Column> columns = {
      {"fltNumber", ColumnType::kNumber}, {"depCity", ColumnType::kText},
      {"arrCity", ColumnType::kText},     {"depTime", ColumnType::kMinutes},
      {"arrTime", ColumnType::kMinutes},  {"gate", ColumnType::kText},
      {"status", ColumnType::kText},
  };
  std::vector<Row> out;
  for (const auto &r : rows) {
    out.push_back({{"fltNumber", static_cast<std::int64_t>(r.flight_number)},
                   {"depCity", r.departure_city},
                   {"arrCity", r.arrival_city},
                   {"depTime", static_cast<std::int64_t>(r.departure_time)},
                   {"arrTime", static_cast<std::int64_t>(r.arrival_time)},
                   {"gate", r.gate},
                   {"status", r.status}});
  }
  return TableStore(std::move(columns), std::move(out));
}

std::vector<std::string> guarantee_violations(const std::vector<FlightRow> &rows, size_t k) {
  std::vector<std::string> out;
  std::set<int> numbers;
  std::map<std::pair<std::string, std::string>, std::vector<int>> arrivals;
  bool dallas = false, dulles = false;
  for (const auto &r : rows) {
    std::string id = "flight " + std::to_string(r.flight_number);
    if (r.flight_number < 100 || r.flight_number > 999) out.push_back(id + ": not three digits");
    if (!numbers.insert(r.flight_number).second) out.push_back(id + ": duplicate number");
    if (r.departure_city == r.arrival_city) out.push_back(id + ": departs and arrives in one city");
    for (int t : {r.departure_time, r.arrival_time})
      if (t % 5 != 0 || t < kFirstSlot || t > kLastSlot) out.push_back(id + ": time off grid");
    if (r.departure_time >= r.arrival_time) out.push_back(id + ": arrives before it leaves");
    if (std::find(kStatuses.begin(), kStatuses.end(), r.status) == kStatuses.end())
      out.push_back(id + ": unknown status");
    arrivals[{r.departure_city, r.arrival_city}].push_back(r.arrival_time);
    for (const auto &c : {r.departure_city, r.arrival_city}) {
      dallas = dallas || c == "Dallas";
      dulles = dulles || c == "Dulles";
    }
  }
  if (rows.size() < kPlantedRows) return out;
  bool many = false, few = false;
  for (auto &[pair, times] : arrivals) {
    std::sort(times.begin(), times.end());
    size_t best = 0;
    for (size_t i = 0, j = 0; j < times.size(); ++j) {
      while (times[j] - times[i] > 120) ++i;
      best = std::max(best, j - i + 1);
    }
    many = many || best > k;
    few = few || (times.size() >= 2 && times.size() <= k);
  }
  if (!many) out.push_back("no city pair with more than " + std::to_string(k) + " flights in two hours");
  if (!few) out.push_back("no city pair with 2 to " + std::to_string(k) + " flights");
  if (!dallas) out.push_back("Dallas missing");
  if (!dulles) out.push_back("Dulles missing");
  return out;
}

namespace {

std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

HttpReply error_page(int status, const std::string &message) {
  return {status, "<html><body><h1>Error</h1><p>" + escape_html(message) + "</p></body></html>\n"};
}

const FieldSpec *field_of_param(const DomainPack &pack, const std::string &param) {
  for (const auto &f : pack.schema.fields)
    if (f.cgi_param && *f.cgi_param == param) return &f;
  return nullptr;
}

}  // namespace

HttpReply handle_request(const std::string &path,
                         const std::vector<std::pair<std::string, std::string>> &params,
                         const TableStore &store, const DomainPack &pack) {
  bool known_path = std::any_of(pack.forms.begin(), pack.forms.end(),
                                [&](const CgiForm &f) { return f.path == path; });
  if (!known_path) return error_page(404, "No such page: " + path);

  std::map<std::string, std::string> given;
  for (const auto &[k, v] : params) {
    if (given.count(k)) return error_page(400, "Repeated parameter " + k);
    given[k] = v;
  }
  // The hidden field names the form that submitted the request.
  const CgiForm *form = nullptr;
  for (const auto &f : pack.forms) {
    for (const auto &[hk, hv] : f.hidden) {
      auto it = given.find(hk);
      if (it != given.end() && it->second == hv) form = &f;
    }
  }
  if (!form || form->path != path) return error_page(400, "Missing or unknown form identifier");
  for (const auto &r : form->required)
    if (!given.count(r) || given[r].empty()) return error_page(400, "Missing parameter " + r);

  std::map<std::string, std::string> window_param_of;  // window param -> time param
  for (const auto &[time, win] : pack.scrape.window_params) window_param_of[win] = time;

  std::vector<QueryConstraint> constraints;
  for (const auto &[k, v] : given) {
    bool hidden = std::any_of(form->hidden.begin(), form->hidden.end(),
                              [&](const auto &h) { return h.first == k; });
    if (hidden) continue;
    if (std::find(form->params.begin(), form->params.end(), k) == form->params.end())
      return error_page(400, "Parameter " + k + " does not belong to form " + form->id);
    if (window_param_of.count(k)) continue;
    const FieldSpec *f = field_of_param(pack, k);
    if (!f) return error_page(400, "Unknown parameter " + k);
    const Column *col = store.column(f->db_column);
    if (!col) return error_page(400, "Unknown parameter " + k);
    QueryConstraint c{col->name, ConstraintOp::kEq, std::string(v), 0};
    if (col->type == ColumnType::kNumber) {
      if (!all_digits(v) || v.empty() || v.size() > 9) return error_page(400, "Bad number for " + k);
      c.value = static_cast<std::int64_t>(std::stoll(v));
    } else if (col->type == ColumnType::kMinutes) {
      if (v.size() != 4 || !all_digits(v)) return error_page(400, "Bad time for " + k);
      int h = std::stoi(v.substr(0, 2)), m = std::stoi(v.substr(2));
      if (h > 23 || m > 59) return error_page(400, "Bad time for " + k);
      c.value = static_cast<std::int64_t>(h * 60 + m);
      if (auto w = pack.scrape.window_params.find(k); w != pack.scrape.window_params.end()) {
        auto code = given.find(w->second);
        if (code != given.end()) {
          auto minutes = pack.scrape.window_for_code(code->second);
          if (!minutes) return error_page(400, "Bad window code for " + w->second);
          c.window = *minutes;
        }
        if (c.window > 0) c.op = ConstraintOp::kWithinWindow;
      }
    }
    constraints.push_back(std::move(c));
  }

  QueryResultSet result = exec_local(store, constraints, kNoRowCap);
  std::string body = "<html><head><title>Flight Information</title></head><body>\n";
  if (result.count == 0) {
    body += pack.scrape.no_match + "No flights match your request.</p>\n</body></html>\n";
    return {200, body};
  }
  const auto &s = pack.scrape;
  body += s.result_begin + "\n<tr>";
  for (const auto &c : s.cell_columns) body += "<th>" + escape_html(c) + "</th>";
  body += "</tr>\n";
  for (const auto &row : result.rows) {
    body += s.row_begin;
    for (const auto &c : s.cell_columns) {
      const Column *col = store.column(c);
      auto it = row.find(c);
      std::string text = it == row.end() ? "" : format_cell(it->second, col ? col->type : ColumnType::kText);
      body += s.cell_begin + escape_html(text) + s.cell_end;
    }
    body += s.row_end + "\n";
  }
  body += s.result_end + "\n</body></html>\n";
  return {200, body};
}

std::string form_page(const CgiForm &form, const DomainPack &pack) {
  std::string page = "<html><head><title>Flight Information</title></head><body>\n";
  page += "<form method=\"get\" action=\"" + escape_html(form.path) + "\">\n";
  for (const auto &[k, v] : form.hidden)
    page += "<input type=\"hidden\" name=\"" + escape_html(k) + "\" value=\"" + escape_html(v) + "\">\n";
  std::map<std::string, std::string> window_param_of;
  for (const auto &[time, win] : pack.scrape.window_params) window_param_of[win] = time;
  for (const auto &p : form.params) {
    if (window_param_of.count(p)) {
      page += "<select name=\"" + escape_html(p) + "\">";
      for (const auto &[minutes, code] : pack.scrape.window_codes)
        page += "<option value=\"" + escape_html(code) + "\">+/- " + std::to_string(minutes) +
                " min</option>";
      page += "</select>\n";
    } else {
      page += "<input type=\"text\" name=\"" + escape_html(p) + "\">\n";
    }
  }
  page += "<input type=\"submit\" value=\"Search\">\n</form>\n</body></html>\n";
  return page;
}

CgiTransport mock_transport(const TableStore &store, const DomainPack &pack) {
  return [&store, &pack](const CgiRequest &req) {
    auto [path, params] = parse_url(req.url());
    return handle_request(path, params, store, pack);
  };
}

struct MockSite::Impl {
  const TableStore &store;
  const DomainPack &pack;
  MockSiteConfig config;
  httplib::Server server;
  std::thread thread;
  int bound_port = 0;

  Impl(const TableStore &s, const DomainPack &p, MockSiteConfig c)
      : store(s), pack(p), config(std::move(c)) {
    std::set<std::string> paths;
    for (const auto &f : pack.forms) paths.insert(f.path);
    for (const auto &path : paths) {
      server.Get(path, [this, path](const httplib::Request &req, httplib::Response &res) {
        if (config.latency_ms > 0)
          std::this_thread::sleep_for(std::chrono::milliseconds(config.latency_ms));
        // Raw query string keeps parameter order for validation.
        auto [ignored, params] = parse_url(req.target);
        (void)ignored;
        HttpReply reply = handle_request(path, params, store, pack);
        res.status = reply.status;
        res.set_content(reply.body, "text/html");
      });
    }
    for (const auto &f : pack.forms) {
      std::string page = form_page(f, pack);
      server.Get("/aa/forms/" + f.id, [page](const httplib::Request &, httplib::Response &res) {
        res.set_content(page, "text/html");
      });
    }
  }
};

MockSite::MockSite(const TableStore &store, const DomainPack &pack, MockSiteConfig config)
    : impl_(std::make_unique<Impl>(store, pack, std::move(config))) {}

MockSite::~MockSite() { stop(); }

int MockSite::start() {
  auto &i = *impl_;
  i.bound_port = i.config.port > 0 && i.server.bind_to_port(i.config.host, i.config.port)
                     ? i.config.port
                     : (i.config.port > 0 ? -1 : i.server.bind_to_any_port(i.config.host));
  if (i.bound_port < 0) throw Error("cannot bind mock site to port " + std::to_string(i.config.port));
  i.thread = std::thread([&i] { i.server.listen_after_bind(); });
  i.server.wait_until_ready();
  return i.bound_port;
}

void MockSite::run() {
  auto &i = *impl_;
  if (!i.server.bind_to_port(i.config.host, i.config.port))
    throw Error("cannot bind mock site to port " + std::to_string(i.config.port));
  i.bound_port = i.config.port;
  i.server.listen_after_bind();
}

void MockSite::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int MockSite::port() const { return impl_->bound_port; }

}  // namespace infodialog
