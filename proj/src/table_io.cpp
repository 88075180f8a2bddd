// Copyright 2026 The fqf Authors
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

#include "fqf/table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fqf/error.hpp"

namespace fqf {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const std::string& path, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw Error(ErrorCode::Parse, path + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return os;
}

struct GridColumns {
  std::vector<double> t;
  std::vector<double> dy;
};

GridColumns read_grid(const std::string& path) {
  const Table table = read_table_csv(path);
  if (table.columns != std::vector<std::string>{"step", "t", "dY"})
    throw Error(ErrorCode::Parse, path + ": expected header 'step,t,dY'");
  if (table.rows.empty()) throw Error(ErrorCode::Parse, path + ": record has no rows");
  GridColumns g;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    if (table.rows[k][0] != static_cast<double>(k))
      throw Error(ErrorCode::GridMismatch, path + ": step column must count 0, 1, 2, ...");
    g.t.push_back(table.rows[k][1]);
    g.dy.push_back(table.rows[k][2]);
  }
  return g;
}

double infer_dt(const std::string& path, const std::vector<double>& t, double dt_hint) {
  double dt = dt_hint;
  if (t.size() >= 2) dt = t[1] - t[0];
  if (!(dt > 0.0)) throw Error(ErrorCode::GridMismatch, path + ": cannot determine a positive dt");
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double expected = t[0] + static_cast<double>(k) * dt;
    if (std::abs(t[k] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw Error(ErrorCode::GridMismatch, path + ": time column is not a uniform grid", k);
  }
  return dt;
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw Error(ErrorCode::Parse, "table has no column '" + name + "'");
}

void write_table_csv(const std::string& path, const Table& table) {
  auto os = open_out(path);
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw Error(ErrorCode::InvalidArgument, "row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_real(row[i]);
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

Table read_table_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  Table table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size())
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": wrong number of fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_real(c, path, lineno));
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw Error(ErrorCode::Parse, path + ": empty file");
  return table;
}

void write_record_csv(const std::string& path, const MeasurementRecord& record) {
  record.validate();
  auto os = open_out(path);
  os << "step,t,dY\n";
  for (std::size_t k = 0; k < record.steps(); ++k)
    os << k << ',' << format_real(record.time(k)) << ',' << static_cast<int>(record.increments[k]) << '\n';
  if (!os) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

MeasurementRecord read_record_csv(const std::string& path, double dt_hint) {
  const GridColumns g = read_grid(path);
  MeasurementRecord r;
  r.t0 = g.t[0];
  r.dt = infer_dt(path, g.t, dt_hint);
  r.increments.reserve(g.dy.size());
  for (std::size_t k = 0; k < g.dy.size(); ++k) {
    if (g.dy[k] != 0.0 && g.dy[k] != 1.0)
      throw Error(ErrorCode::Parse, path + ": counting increments must be 0 or 1", k);
    r.increments.push_back(g.dy[k] != 0.0 ? 1 : 0);
  }
  return r;
}

void write_classical_record_csv(const std::string& path, const ClassicalRecord& record) {
  record.validate();
  auto os = open_out(path);
  os << "step,t,dY\n";
  for (std::size_t k = 0; k < record.steps(); ++k)
    os << k << ',' << format_real(record.time(k)) << ',' << format_real(record.increments[k]) << '\n';
  if (!os) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

ClassicalRecord read_classical_record_csv(const std::string& path, double dt_hint) {
  const GridColumns g = read_grid(path);
  ClassicalRecord r;
  r.t0 = g.t[0];
  r.dt = infer_dt(path, g.t, dt_hint);
  r.increments = g.dy;
  return r;
}

}  // namespace fqf
