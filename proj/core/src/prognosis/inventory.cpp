// Copyright 2026 The Vendguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vendguard/prognosis/inventory.hpp"

#include <algorithm>
#include <cmath>

#include "vendguard/error.hpp"

namespace vendguard::prognosis {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kSnacks: return "Snacks";
    case Category::kBeverages: return "Beverages";
    case Category::kConfectionery: return "Confectionery";
    case Category::kPreparedFoods: return "PreparedFoods";
  }
  return "Unknown";
}

std::vector<double> daily_dispenses(const MachineSeries& series) {
  std::vector<double> daily;
  if (series.size() == 0) return daily;
  const std::int64_t span = static_cast<std::int64_t>(series.size()) * series.cadence;
  daily.assign(static_cast<std::size_t>((span + kSecondsPerDay - 1) / kSecondsPerDay), 0.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series.interactions[i];
    if (std::isnan(v)) continue;
    if (v < 0.0) fail(Errc::kInvalidArgument, "negative interaction count");
    daily[static_cast<std::size_t>((series.time_at(i) - series.start) / kSecondsPerDay)] += v;
  }
  return daily;
}

InventoryEstimate estimate_stock_depletion(std::span<const double> daily, double initial_stock,
                                           Category category) {
  if (initial_stock < 0.0) fail(Errc::kInvalidArgument, "initial stock must be >= 0");
  InventoryEstimate e;
  e.category = category;
  double total = 0.0;
  for (double d : daily) {
    if (d < 0.0) fail(Errc::kInvalidArgument, "negative dispense count");
    total += d;
  }
  e.stock = std::max(0.0, initial_stock - total);
  const std::size_t k = std::min<std::size_t>(7, daily.size());
  if (k > 0) {
    double recent = 0.0;
    for (double d : daily.last(k)) recent += d;
    e.rate_per_day = recent / static_cast<double>(k);
  }
  if (e.rate_per_day > 0.0) e.days_to_empty = e.stock / e.rate_per_day;
  return e;
}

std::vector<InventoryEstimate> estimate_machine_inventory(const MachineSeries& series,
                                                          double initial_stock_per_category) {
  const std::vector<double> daily = daily_dispenses(series);
  std::vector<InventoryEstimate> out;
  for (int c = 0; c < 4; ++c) {
    std::vector<double> share(daily.size());
    for (std::size_t d = 0; d < daily.size(); ++d) share[d] = daily[d] * kCategoryShare[c];
    out.push_back(estimate_stock_depletion(share, initial_stock_per_category, static_cast<Category>(c)));
  }
  return out;
}

}  // namespace vendguard::prognosis
