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

#include "infodialog/query.h"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "infodialog/conf.h"
#include "infodialog/errors.h"
#include "infodialog/text.h"

namespace infodialog {

std::string_view name_of(ColumnType t) {
  switch (t) {
    case ColumnType::kText: return "text";
    case ColumnType::kNumber: return "number";
    case ColumnType::kMinutes: return "minutes";
  }
  return "";
}

Value parse_cell(std::string_view text, ColumnType type) {
  std::string s = trim(text);
  switch (type) {
    case ColumnType::kText:
      return s;
    case ColumnType::kNumber:
      if (s.empty() || s.size() > 18 || !all_digits(s)) throw Error("not a number: '" + s + "'");
      return static_cast<std::int64_t>(std::stoll(s));
    case ColumnType::kMinutes:
      if (auto m = parse_hhmm(s)) return static_cast<std::int64_t>(*m);
      throw Error("not a time: '" + s + "'");
  }
  return s;
}

std::string format_cell(const Value &v, ColumnType type) {
  if (type == ColumnType::kMinutes && is_number(v)) return format_hhmm(static_cast<int>(std::get<std::int64_t>(v)));
  return to_string(v);
}

TableStore::TableStore(std::vector<Column> columns, std::vector<Row> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
  for (const auto &row : rows_) {
    if (row.size() != columns_.size()) throw Error("row arity does not match columns");
    for (const auto &c : columns_) {
      auto it = row.find(c.name);
      if (it == row.end()) throw Error("row lacks column " + c.name);
      if (is_number(it->second) != (c.type != ColumnType::kText))
        throw Error("value of wrong type in column " + c.name);
    }
  }
}

TableStore TableStore::parse(std::string_view text, const std::string &file) {
  std::vector<Column> columns;
  std::vector<Row> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, '|');) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == '|') cells.emplace_back();
    if (columns.empty()) {
      for (const auto &h : cells) {
        auto colon = h.find(':');
        std::string type = colon == std::string::npos ? "text" : trim(h.substr(colon + 1));
        Column c{trim(h.substr(0, colon)), ColumnType::kText};
        if (type == "number") c.type = ColumnType::kNumber;
        else if (type == "minutes") c.type = ColumnType::kMinutes;
        else if (type != "text") throw ParseError(file, number, "unknown column type " + type);
        columns.push_back(std::move(c));
      }
      continue;
    }
    if (cells.size() != columns.size())
      throw ParseError(file, number, "expected " + std::to_string(columns.size()) + " cells");
    Row row;
    for (size_t k = 0; k < cells.size(); ++k) {
      try {
        row[columns[k].name] = parse_cell(cells[k], columns[k].type);
      } catch (const ParseError &) {
        throw;
      } catch (const Error &e) {
        throw ParseError(file, number, e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  if (columns.empty()) throw ParseError(file, number, "missing header line");
  return TableStore(std::move(columns), std::move(rows));
}

TableStore TableStore::load(const std::filesystem::path &path) {
  return parse(read_file(path), path.filename().string());
}

const Column *TableStore::column(std::string_view name) const {
  for (const auto &c : columns_)
    if (c.name == name) return &c;
  return nullptr;
}

std::string TableStore::serialize() const {
  std::string out;
  std::vector<std::string> head;
  for (const auto &c : columns_) head.push_back(c.name + ":" + std::string(name_of(c.type)));
  out += join(head, "|") + "\n";
  for (const auto &row : rows_) {
    std::vector<std::string> cells;
    for (const auto &c : columns_) cells.push_back(format_cell(row.at(c.name), c.type));
    out += join(cells, "|") + "\n";
  }
  return out;
}

bool QueryConstraint::matches(const Row &row) const {
  auto it = row.find(column);
  if (it == row.end()) return false;
  if (op == ConstraintOp::kEq) return it->second == value;
  if (!is_number(it->second) || !is_number(value)) return false;
  auto d = std::get<std::int64_t>(it->second) - std::get<std::int64_t>(value);
  return (d < 0 ? -d : d) <= window;
}

std::vector<QueryConstraint> compile_constraints(const Bindings &bindings, const DomainPack &pack) {
  std::vector<QueryConstraint> out;
  // Schema field order keeps the output canonical.
  for (const auto &f : pack.schema.fields) {
    auto it = bindings.find(f.name);
    if (it == bindings.end()) continue;
    if (f.db_column.empty()) throw UnmappedField(f.name);
    const FieldBinding &b = it->second;
    QueryConstraint c{f.db_column, ConstraintOp::kEq, b.value, 0};
    if (f.semantic_class == kTimeOfDayClass && (b.approx || b.window > 0)) {
      c.op = ConstraintOp::kWithinWindow;
      c.window = b.window > 0 ? b.window : pack.schema.approx_window;
    }
    out.push_back(std::move(c));
  }
  for (const auto &[name, b] : bindings)
    if (!pack.schema.field(name)) throw UnmappedField(name);
  return out;
}

QueryResultSet exec_local(const TableStore &store, const std::vector<QueryConstraint> &constraints,
                          size_t cap) {
  QueryResultSet r;
  for (const auto &row : store.rows()) {
    bool ok = std::all_of(constraints.begin(), constraints.end(),
                          [&](const QueryConstraint &c) { return c.matches(row); });
    if (!ok) continue;
    ++r.count;
    if (r.rows.size() < cap) r.rows.push_back(row);
  }
  r.truncated = r.count > cap;
  return r;
}

std::string to_sql(const std::string &table, const std::vector<QueryConstraint> &constraints) {
  std::string sql = "SELECT * FROM " + table;
  std::vector<std::string> terms;
  auto literal = [](const Value &v) {
    if (is_number(v)) return to_string(v);
    std::string s = "'";
    for (char c : std::get<std::string>(v)) {
      if (c == '\'') s += '\'';
      s += c;
    }
    return s + "'";
  };
  for (const auto &c : constraints) {
    if (c.op == ConstraintOp::kEq) {
      terms.push_back(c.column + " = " + literal(c.value));
    } else {
      auto center = std::get<std::int64_t>(c.value);
      terms.push_back(c.column + " BETWEEN " + std::to_string(center - c.window) + " AND " +
                      std::to_string(center + c.window));
    }
  }
  if (!terms.empty()) sql += " WHERE " + join(terms, " AND ");
  return sql;
}

std::string url_encode(std::string_view s) {
  static const char *hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string CgiRequest::url() const {
  std::string u = path;
  char sep = '?';
  for (const auto &[k, v] : params) {
    u += sep;
    u += url_encode(k) + "=" + url_encode(v);
    sep = '&';
  }
  return u;
}

std::pair<std::string, std::vector<std::pair<std::string, std::string>>> parse_url(
    std::string_view url) {
  std::vector<std::pair<std::string, std::string>> params;
  auto q = url.find('?');
  std::string path(url.substr(0, q));
  if (q == std::string_view::npos) return {path, params};
  for (const auto &part : split_list(url.substr(q + 1), '&')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) params.emplace_back(url_decode(part), "");
    else params.emplace_back(url_decode(part.substr(0, eq)), url_decode(part.substr(eq + 1)));
  }
  return {path, params};
}

namespace {

// CGI parameter carrying a column, from the db-map.
std::optional<std::string> param_of_column(const DomainPack &pack, const std::string &column) {
  for (const auto &f : pack.schema.fields)
    if (f.db_column == column && f.cgi_param) return *f.cgi_param;
  return std::nullopt;
}

std::string hhmm_compact(std::int64_t minutes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d%02d", static_cast<int>(minutes / 60), static_cast<int>(minutes % 60));
  return buf;
}

}  // namespace

CgiRequest build_cgi_request(const std::vector<QueryConstraint> &constraints,
                             const DomainPack &pack) {
  std::map<std::string, const QueryConstraint *> by_param;
  for (const auto &c : constraints)
    if (auto p = param_of_column(pack, c.column)) by_param[*p] = &c;

  const CgiForm *form = nullptr;
  if (by_param.count("fltNumber")) form = pack.form("byNumber");
  else if (by_param.count("arrTime")) form = pack.form("byArrival");
  else form = pack.form("byDeparture");
  if (!form) throw NoFormSatisfiable("no matching form in pack");
  for (const auto &r : form->required)
    if (!by_param.count(r)) throw NoFormSatisfiable(form->id + " needs " + r);

  std::map<std::string, std::string> window_of;  // window param -> time param
  for (const auto &[time, win] : pack.scrape.window_params) window_of[win] = time;

  CgiRequest req;
  req.path = form->path;
  req.form_id = form->id;
  req.params = form->hidden;
  for (const auto &p : form->params) {
    if (auto w = window_of.find(p); w != window_of.end()) {
      auto it = by_param.find(w->second);
      if (it == by_param.end()) continue;
      int minutes = it->second->op == ConstraintOp::kWithinWindow ? it->second->window : 0;
      auto code = pack.scrape.code_for_window(minutes);
      if (!code) throw NoFormSatisfiable("no window code for " + std::to_string(minutes) + " minutes");
      req.params.emplace_back(p, *code);
      continue;
    }
    auto it = by_param.find(p);
    if (it == by_param.end()) continue;
    const Value &v = it->second->value;
    bool timed = pack.scrape.window_params.count(p) > 0;
    req.params.emplace_back(p, timed && is_number(v) ? hhmm_compact(std::get<std::int64_t>(v)) : to_string(v));
  }
  return req;
}

std::vector<QueryConstraint> residual_constraints(const std::vector<QueryConstraint> &constraints,
                                                  const CgiRequest &request,
                                                  const DomainPack &pack) {
  std::vector<QueryConstraint> out;
  for (const auto &c : constraints) {
    auto p = param_of_column(pack, c.column);
    bool sent = p && std::any_of(request.params.begin(), request.params.end(),
                                 [&](const auto &kv) { return kv.first == *p; });
    if (!sent) out.push_back(c);
  }
  return out;
}

QueryResultSet scrape_rows(std::string_view body, const ScrapeSpec &spec,
                           const std::vector<Column> &columns, size_t cap) {
  QueryResultSet r;
  if (!spec.no_match.empty() && body.find(spec.no_match) != std::string_view::npos) return r;
  auto begin = body.find(spec.result_begin);
  if (begin == std::string_view::npos) throw ScrapeMismatch("result table marker missing");
  begin += spec.result_begin.size();
  auto end = body.find(spec.result_end, begin);
  if (end == std::string_view::npos) throw ScrapeMismatch("result table end marker missing");
  std::string_view table = body.substr(begin, end - begin);

  auto type_of = [&](const std::string &name) {
    for (const auto &c : columns)
      if (c.name == name) return c.type;
    return ColumnType::kText;
  };
  auto unescape = [](std::string s) {
    static const std::pair<const char *, const char *> ents[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&amp;", "&"}};
    for (const auto &[from, to] : ents)
      for (size_t p; (p = s.find(from)) != std::string::npos;) s.replace(p, std::strlen(from), to);
    return s;
  };

  size_t pos = 0;
  while ((pos = table.find(spec.row_begin, pos)) != std::string_view::npos) {
    pos += spec.row_begin.size();
    auto row_end = table.find(spec.row_end, pos);
    if (row_end == std::string_view::npos) throw ScrapeMismatch("row end marker missing");
    std::string_view cells = table.substr(pos, row_end - pos);
    pos = row_end + spec.row_end.size();
    Row row;
    size_t cpos = 0;
    for (const auto &name : spec.cell_columns) {
      auto cb = cells.find(spec.cell_begin, cpos);
      if (cb == std::string_view::npos) throw ScrapeMismatch("row has too few cells");
      cb += spec.cell_begin.size();
      auto ce = cells.find(spec.cell_end, cb);
      if (ce == std::string_view::npos) throw ScrapeMismatch("cell end marker missing");
      try {
        row[name] = parse_cell(unescape(std::string(cells.substr(cb, ce - cb))), type_of(name));
      } catch (const ScrapeMismatch &) {
        throw;
      } catch (const Error &e) {
        throw ScrapeMismatch(e.what());
      }
      cpos = ce + spec.cell_end.size();
    }
    ++r.count;
    if (r.rows.size() < cap) r.rows.push_back(std::move(row));
  }
  r.truncated = r.count > cap;
  return r;
}

QueryResultSet LocalQuerier::run(const std::vector<QueryConstraint> &constraints, size_t cap) {
  return exec_local(store_, constraints, cap);
}

CgiTransport http_transport(const std::string &base_url) {
  return [base_url](const CgiRequest &req) {
    httplib::Client client(base_url);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(5, 0);
    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto res = client.Get(req.url());
      if (res) return HttpReply{res->status, res->body};
      last_error = httplib::to_string(res.error());
    }
    throw QuerierUnavailable(base_url + ": " + last_error);
  };
}

QueryResultSet CgiQuerier::run(const std::vector<QueryConstraint> &constraints, size_t cap) {
  CgiRequest req = build_cgi_request(constraints, pack_);
  requests_.push_back(req);
  HttpReply reply = transport_(req);
  if (reply.status != 200)
    throw QuerierUnavailable("HTTP " + std::to_string(reply.status) + " for " + req.url());
  auto residual = residual_constraints(constraints, req, pack_);
  QueryResultSet all = scrape_rows(reply.body, pack_.scrape, columns_, kNoRowCap);
  if (residual.empty() && cap == kNoRowCap) return all;
  QueryResultSet r;
  for (auto &row : all.rows) {
    bool ok = std::all_of(residual.begin(), residual.end(),
                          [&](const QueryConstraint &c) { return c.matches(row); });
    if (!ok) continue;
    ++r.count;
    if (r.rows.size() < cap) r.rows.push_back(std::move(row));
  }
  r.truncated = r.count > cap;
  return r;
}

}  // namespace infodialog
