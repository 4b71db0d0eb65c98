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

#include <stdexcept>
#include <string>

namespace infodialog {

// Base for every error the framework raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Domain pack loading.

class MissingFile : public Error {
 public:
  explicit MissingFile(std::string name)
      : Error("missing domain pack file: " + name), name_(std::move(name)) {}
  const std::string &name() const { return name_; }

 private:
  std::string name_;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, int line, std::string reason)
      : Error(file + ":" + std::to_string(line) + ": " + reason),
        file_(std::move(file)),
        line_(line),
        reason_(std::move(reason)) {}
  const std::string &file() const { return file_; }
  int line() const { return line_; }
  const std::string &reason() const { return reason_; }

 private:
  std::string file_;
  int line_;
  std::string reason_;
};

class DanglingReference : public Error {
 public:
  DanglingReference(std::string file, std::string symbol, int line = 0)
      : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
              ": unknown reference '" + symbol + "'"),
        file_(std::move(file)),
        symbol_(std::move(symbol)),
        line_(line) {}
  const std::string &file() const { return file_; }
  const std::string &symbol() const { return symbol_; }
  int line() const { return line_; }

 private:
  std::string file_;
  std::string symbol_;
  int line_;
};

// Dialogue and query errors.

class CorrectionTargetNotFound : public Error {
 public:
  explicit CorrectionTargetNotFound(const std::string &old_value)
      : Error("no current binding has value '" + old_value + "'") {}
};

class UnmappedField : public Error {
 public:
  explicit UnmappedField(const std::string &field)
      : Error("field has no database mapping: " + field) {}
};

class NoFormSatisfiable : public Error {
 public:
  explicit NoFormSatisfiable(const std::string &detail)
      : Error("no form accepts the constraints: " + detail) {}
};

class ScrapeMismatch : public Error {
 public:
  explicit ScrapeMismatch(const std::string &detail)
      : Error("result page does not match scrape spec: " + detail) {}
};

class QuerierUnavailable : public Error {
 public:
  explicit QuerierUnavailable(const std::string &detail)
      : Error("back-end unavailable: " + detail) {}
};

class NoRuleMatched : public Error {
 public:
  explicit NoRuleMatched(const std::string &act)
      : Error("no render rule matches act " + act) {}
};

// Service.

class UnknownDomain : public Error {
 public:
  explicit UnknownDomain(const std::string &name)
      : Error("unknown domain: " + name) {}
};

class UnknownSession : public Error {
 public:
  explicit UnknownSession(const std::string &id)
      : Error("unknown session: " + id) {}
};

class SessionClosed : public Error {
 public:
  explicit SessionClosed(const std::string &id)
      : Error("session is closed: " + id) {}
};

}  // namespace infodialog
