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

#pragma once

// Plain CSV tables. Reals are written with 17 significant digits so every
// double survives a write/read cycle unchanged.

#include <string>
#include <vector>

#include "fqf/record.hpp"

namespace fqf {

std::string format_real(double x);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws Parse if absent.
  std::size_t column(const std::string& name) const;
};

void write_table_csv(const std::string& path, const Table& table);
Table read_table_csv(const std::string& path);

/// `step,t,dY` with integer dY.
void write_record_csv(const std::string& path, const MeasurementRecord& record);
/// t0 and dt are recovered from the t column (dt = t1 - t0); a single-row
/// file needs `dt_hint`. Throws GridMismatch for non-uniform grids.
MeasurementRecord read_record_csv(const std::string& path, double dt_hint = 0.0);

/// `step,t,dY` with real dY.
void write_classical_record_csv(const std::string& path, const ClassicalRecord& record);
ClassicalRecord read_classical_record_csv(const std::string& path, double dt_hint = 0.0);

}  // namespace fqf
