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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infodialog/frame.h"
#include "infodialog/schema.h"
#include "infodialog/value.h"

namespace infodialog {

enum class ColumnType { kText, kNumber, kMinutes };

std::string_view name_of(ColumnType t);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;

  bool operator==(const Column &) const = default;
};

// One row keyed by column name.
using Row = std::map<std::string, Value>;

// Parses a cell according to its column type. Throws Error on bad input.
Value parse_cell(std::string_view text, ColumnType type);
std::string format_cell(const Value &v, ColumnType type);

// Immutable in-memory table. Dataset files are '|'-separated with a
// "name:type" header line.
class TableStore {
 public:
  TableStore() = default;
  TableStore(std::vector<Column> columns, std::vector<Row> rows);

  static TableStore parse(std::string_view text, const std::string &file);
  static TableStore load(const std::filesystem::path &path);

  const std::vector<Column> &columns() const { return columns_; }
  const std::vector<Row> &rows() const { return rows_; }
  const Column *column(std::string_view name) const;
  std::string serialize() const;

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
};

enum class ConstraintOp { kEq, kWithinWindow };

struct QueryConstraint {
  std::string column;
  ConstraintOp op = ConstraintOp::kEq;
  Value value;
  int window = 0;  // minutes, within_window only

  bool matches(const Row &row) const;
  bool operator==(const QueryConstraint &) const = default;
};

inline constexpr size_t kDefaultRowCap = 50;
inline constexpr size_t kNoRowCap = std::numeric_limits<size_t>::max();

struct QueryResultSet {
  size_t count = 0;
  std::vector<Row> rows;  // store order, at most cap rows
  bool truncated = false;

  bool operator==(const QueryResultSet &) const = default;
};

// Bindings -> column constraints. Time bindings with a window become
// within_window; everything else is eq.
std::vector<QueryConstraint> compile_constraints(const Bindings &bindings, const DomainPack &pack);

QueryResultSet exec_local(const TableStore &store, const std::vector<QueryConstraint> &constraints,
                          size_t cap = kDefaultRowCap);

// For logs only.
std::string to_sql(const std::string &table, const std::vector<QueryConstraint> &constraints);

struct CgiRequest {
  std::string method = "GET";
  std::string path;
  std::string form_id;
  std::vector<std::pair<std::string, std::string>> params;  // wire order

  std::string url() const;  // path?k=v&k=v, percent-encoded
  bool operator==(const CgiRequest &) const = default;
};

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

// Splits "/path?a=b&c=d" into path and decoded params.
std::pair<std::string, std::vector<std::pair<std::string, std::string>>> parse_url(
    std::string_view url);

// Picks the form for the constraints and serializes its parameters.
CgiRequest build_cgi_request(const std::vector<QueryConstraint> &constraints,
                             const DomainPack &pack);

// Constraints the request built for them cannot carry.
std::vector<QueryConstraint> residual_constraints(const std::vector<QueryConstraint> &constraints,
                                                  const CgiRequest &request,
                                                  const DomainPack &pack);

// Reads result rows out of a result page. Cells are typed by `columns`
// when named there, else kept as text.
QueryResultSet scrape_rows(std::string_view body, const ScrapeSpec &spec,
                           const std::vector<Column> &columns = {}, size_t cap = kDefaultRowCap);

// Back-end interface seen by the dialogue manager.
class Querier {
 public:
  virtual ~Querier() = default;

  QueryResultSet query(const std::vector<QueryConstraint> &constraints, size_t cap = kDefaultRowCap) {
    ++invocations_;
    return run(constraints, cap);
  }
  size_t invocations() const { return invocations_; }

  // Whether candidate rows may be inspected to pick the next question.
  virtual bool has_row_access() const = 0;
  virtual std::string_view name() const = 0;

 protected:
  virtual QueryResultSet run(const std::vector<QueryConstraint> &constraints, size_t cap) = 0;

 private:
  size_t invocations_ = 0;
};

class LocalQuerier : public Querier {
 public:
  explicit LocalQuerier(const TableStore &store) : store_(store) {}
  bool has_row_access() const override { return true; }
  std::string_view name() const override { return "local"; }

 protected:
  QueryResultSet run(const std::vector<QueryConstraint> &constraints, size_t cap) override;

 private:
  const TableStore &store_;
};

struct HttpReply {
  int status = 0;
  std::string body;
};

// Sends one request and returns the reply; throws QuerierUnavailable when
// the site cannot be reached.
using CgiTransport = std::function<HttpReply(const CgiRequest &)>;

// HTTP transport against base_url ("http://host:port"): 5 s timeout and one
// retry.
CgiTransport http_transport(const std::string &base_url);

class CgiQuerier : public Querier {
 public:
  CgiQuerier(const DomainPack &pack, std::vector<Column> columns, CgiTransport transport)
      : pack_(pack), columns_(std::move(columns)), transport_(std::move(transport)) {}
  bool has_row_access() const override { return false; }
  std::string_view name() const override { return "cgi"; }

  const std::vector<CgiRequest> &requests() const { return requests_; }

 protected:
  QueryResultSet run(const std::vector<QueryConstraint> &constraints, size_t cap) override;

 private:
  const DomainPack &pack_;
  std::vector<Column> columns_;
  CgiTransport transport_;
  std::vector<CgiRequest> requests_;
};

}  // namespace infodialog
