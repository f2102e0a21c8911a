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

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vendguard/types.hpp"

namespace vendguard::prognosis {

enum class Category { kSnacks, kBeverages, kConfectionery, kPreparedFoods };
std::string_view to_string(Category c);
// Share of dispenses attributed to each category, in enum order.
inline constexpr double kCategoryShare[4] = {0.40, 0.35, 0.15, 0.10};

struct InventoryEstimate {
  Category category = Category::kSnacks;
  double stock = 0.0;
  double rate_per_day = 0.0;            // trailing 7-day mean
  std::optional<double> days_to_empty;  // empty: never at the current rate
};

// Dispense totals per whole day since series.start; missing samples count 0.
std::vector<double> daily_dispenses(const MachineSeries& series);

// Stock = initial - cumulative dispenses, floored at 0.
InventoryEstimate estimate_stock_depletion(std::span<const double> daily, double initial_stock,
                                           Category category = Category::kSnacks);

// All four categories of one machine, splitting dispenses by kCategoryShare.
std::vector<InventoryEstimate> estimate_machine_inventory(const MachineSeries& series,
                                                          double initial_stock_per_category);

}  // namespace vendguard::prognosis
