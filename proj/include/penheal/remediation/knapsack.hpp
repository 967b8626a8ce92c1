#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal::remediation {

/// Integer-scaled knapsack item: cost in tenths, value in hundredths.
struct KnapsackItem {
    int cost_units = 0;
    std::int64_t value_units = 0;
};

struct KnapsackSolution {
    /// Chosen item index per group, or nullopt when the group is skipped.
    std::vector<std::optional<std::size_t>> choice;
    std::int64_t total_value_units = 0;
    int total_cost_units = 0;
};

/// Exact group-knapsack DP: at most one item per group, maximize total value
/// subject to total cost <= capacity. Among optimal solutions the one with
/// the lowest total cost wins; remaining ties go to the lexicographically
/// smallest choice vector (earlier groups first, lower item index first,
/// skipping a group ranks after every item).
KnapsackSolution solve_group_knapsack(const std::vector<std::vector<KnapsackItem>>& groups,
                                      int capacity_units);

inline constexpr int kCostScale = 10;
inline constexpr int kValueScale = 100;

int cost_units(double cost);
std::int64_t value_units(double value);

struct Selection {
    std::vector<RecommendationGroup> groups;  // every candidate Adopted or Discarded
    double total_value = 0.0;
    double total_cost = 0.0;
    double budget = 0.0;

    std::vector<Recommendation> adopted() const;
};

/// Marks every candidate Adopted or Discarded under a single shared budget.
/// Candidates with value <= 0 never enter the DP.
Selection select(std::vector<RecommendationGroup> groups, double budget);

/// Variant where each group gets its own independent budget.
Selection select_per_group(std::vector<RecommendationGroup> groups, double budget_per_group);

}  // namespace penheal::remediation
