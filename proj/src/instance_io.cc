// Copyright 2026 The BranchRL Authors
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

#include "branchrl/instance_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "branchrl/status_macros.h"

namespace branchrl {
namespace {

constexpr absl::string_view kHeader = "MILP v1";

class LineReader {
 public:
  explicit LineReader(absl::string_view text)
      : lines_(absl::StrSplit(text, '\n')) {
    // A trailing newline produces one empty final element.
    if (!lines_.empty() && lines_.back().empty()) lines_.pop_back();
  }

  // Next line split into whitespace separated tokens; the first token must be
  // `key`.
  absl::StatusOr<std::vector<absl::string_view>> Next(absl::string_view key) {
    if (pos_ >= lines_.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", pos_ + 1, ": unexpected end of file, expected '",
                       key, "'"));
    }
    ++pos_;
    std::vector<absl::string_view> tokens =
        absl::StrSplit(lines_[pos_ - 1], ' ', absl::SkipEmpty());
    if (tokens.empty() || tokens[0] != key) {
      return Error(absl::StrCat("expected '", key, "'"));
    }
    tokens.erase(tokens.begin());
    return tokens;
  }

  absl::string_view RawNext() { return pos_ < lines_.size() ? lines_[pos_++] : ""; }
  bool AtEnd() const { return pos_ >= lines_.size(); }

  absl::Status Error(absl::string_view message) const {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", pos_, ": ", message));
  }

 private:
  std::vector<absl::string_view> lines_;
  size_t pos_ = 0;
};

absl::StatusOr<std::vector<double>> ParseDoubles(
    LineReader& reader, const std::vector<absl::string_view>& tokens,
    size_t expected) {
  if (tokens.size() != expected) {
    return reader.Error(absl::StrCat("expected ", expected, " values, found ",
                                     tokens.size()));
  }
  std::vector<double> values;
  values.reserve(tokens.size());
  for (absl::string_view token : tokens) {
    auto value = ParseDouble(token);
    if (!value.ok()) return reader.Error(value.status().message());
    values.push_back(*value);
  }
  return values;
}

absl::StatusOr<int> ParseCount(LineReader& reader, absl::string_view key) {
  ASSIGN_OR_RETURN(auto tokens, reader.Next(key));
  int value = 0;
  if (tokens.size() != 1 || !absl::SimpleAtoi(tokens[0], &value) || value < 0) {
    return reader.Error(absl::StrCat("bad '", key, "' count"));
  }
  return value;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

absl::StatusOr<double> ParseDouble(absl::string_view token) {
  if (token == "inf") return kInf;
  if (token == "-inf") return -kInf;
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed number '", token, "'"));
  }
  return value;
}

std::string SerializeInstance(const MilpInstance& instance) {
  std::string out;
  auto append_doubles = [&out](absl::string_view key,
                               const std::vector<double>& values) {
    absl::StrAppend(&out, key);
    for (double v : values) absl::StrAppend(&out, " ", FormatDouble(v));
    absl::StrAppend(&out, "\n");
  };
  absl::StrAppend(&out, kHeader, "\n");
  absl::StrAppend(&out, "name ", instance.name, "\n");
  absl::StrAppend(&out, "seed ", instance.seed, "\n");
  absl::StrAppend(&out, "nvars ", instance.num_vars(), "\n");
  absl::StrAppend(&out, "ncons ", instance.num_cons(), "\n");
  append_doubles("obj", instance.objective);
  append_doubles("lb", instance.lower);
  append_doubles("ub", instance.upper);
  absl::StrAppend(&out, "int");
  for (bool b : instance.is_integer) absl::StrAppend(&out, b ? " 1" : " 0");
  absl::StrAppend(&out, "\n");
  for (const SparseRow& row : instance.rows) {
    absl::StrAppend(&out, "row ", FormatDouble(row.rhs), " ", row.size());
    for (int k = 0; k < row.size(); ++k) {
      absl::StrAppend(&out, " ", row.index[k], ":", FormatDouble(row.coef[k]));
    }
    absl::StrAppend(&out, "\n");
  }
  return out;
}

absl::StatusOr<MilpInstance> ParseInstance(absl::string_view text) {
  LineReader reader(text);
  if (reader.AtEnd()) return absl::InvalidArgumentError("line 1: empty file");
  const absl::string_view header = reader.RawNext();
  if (header != kHeader) {
    if (header.substr(0, 6) == "MILP v") {
      return absl::UnimplementedError(absl::StrCat(
          "line 1: unsupported format version '", header.substr(5), "'"));
    }
    return absl::InvalidArgumentError("line 1: missing 'MILP v1' header");
  }

  MilpInstance instance;
  {
    // The name is the remainder of the line and may contain spaces.
    const absl::string_view line = reader.RawNext();
    if (line.substr(0, 5) != "name ") return reader.Error("expected 'name'");
    instance.name = std::string(line.substr(5));
  }
  {
    ASSIGN_OR_RETURN(auto tokens, reader.Next("seed"));
    if (tokens.size() != 1 || !absl::SimpleAtoi(tokens[0], &instance.seed)) {
      return reader.Error("bad seed");
    }
  }
  ASSIGN_OR_RETURN(const int n, ParseCount(reader, "nvars"));
  ASSIGN_OR_RETURN(const int m, ParseCount(reader, "ncons"));
  {
    ASSIGN_OR_RETURN(auto tokens, reader.Next("obj"));
    ASSIGN_OR_RETURN(instance.objective, ParseDoubles(reader, tokens, n));
  }
  {
    ASSIGN_OR_RETURN(auto tokens, reader.Next("lb"));
    ASSIGN_OR_RETURN(instance.lower, ParseDoubles(reader, tokens, n));
  }
  {
    ASSIGN_OR_RETURN(auto tokens, reader.Next("ub"));
    ASSIGN_OR_RETURN(instance.upper, ParseDoubles(reader, tokens, n));
  }
  {
    ASSIGN_OR_RETURN(auto tokens, reader.Next("int"));
    if (static_cast<int>(tokens.size()) != n) {
      return reader.Error(absl::StrCat("expected ", n, " integrality flags"));
    }
    instance.is_integer.reserve(n);
    for (absl::string_view t : tokens) {
      if (t != "0" && t != "1") return reader.Error("integrality flag not 0/1");
      instance.is_integer.push_back(t == "1");
    }
  }
  instance.rows.reserve(m);
  for (int i = 0; i < m; ++i) {
    ASSIGN_OR_RETURN(auto tokens, reader.Next("row"));
    if (tokens.size() < 2) return reader.Error("row needs rhs and count");
    SparseRow row;
    auto rhs = ParseDouble(tokens[0]);
    if (!rhs.ok()) return reader.Error(rhs.status().message());
    row.rhs = *rhs;
    int k = 0;
    if (!absl::SimpleAtoi(tokens[1], &k) || k < 0 ||
        static_cast<int>(tokens.size()) != k + 2) {
      return reader.Error("row entry count does not match");
    }
    for (int e = 0; e < k; ++e) {
      const absl::string_view entry = tokens[e + 2];
      const size_t colon = entry.find(':');
      int idx = 0;
      if (colon == absl::string_view::npos ||
          !absl::SimpleAtoi(entry.substr(0, colon), &idx)) {
        return reader.Error(absl::StrCat("malformed entry '", entry, "'"));
      }
      auto coef = ParseDouble(entry.substr(colon + 1));
      if (!coef.ok()) return reader.Error(coef.status().message());
      row.index.push_back(idx);
      row.coef.push_back(*coef);
    }
    instance.rows.push_back(std::move(row));
  }
  if (!reader.AtEnd()) return reader.Error("trailing content after last row");
  return instance;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::Status WriteInstance(const MilpInstance& instance,
                           const std::string& path) {
  return WriteFile(path, SerializeInstance(instance));
}

absl::StatusOr<MilpInstance> ReadInstance(const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  auto instance = ParseInstance(text);
  if (!instance.ok()) {
    return absl::Status(instance.status().code(),
                        absl::StrCat(path, ": ", instance.status().message()));
  }
  return instance;
}

}  // namespace branchrl
