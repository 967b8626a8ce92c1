#include "penheal/remediation/knapsack.hpp"

#include <cmath>
#include <limits>

namespace penheal::remediation {

namespace {

struct Cell {
    std::int64_t value = 0;
    int cost = 0;
    // Rank of the choice made at this group: item index, or kSkip.
    std::size_t rank = kSkip;

    static constexpr std::size_t kSkip = std::numeric_limits<std::size_t>::max();
};

bool better(const Cell& a, const Cell& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.rank < b.rank;
}

}  // namespace

KnapsackSolution solve_group_knapsack(const std::vector<std::vector<KnapsackItem>>& groups,
                                      int capacity_units) {
    const int cap = std::max(capacity_units, 0);
    const std::size_t n = groups.size();

    // best[g][j]: optimum over groups g..n-1 with capacity j. Filled backward
    // so a forward walk from group 0 reconstructs the tie-broken choice.
    std::vector<std::vector<Cell>> best(n + 1, std::vector<Cell>(static_cast<std::size_t>(cap) + 1));
    for (std::size_t g = n; g-- > 0;) {
        for (int j = cap; j >= 0; --j) {
            Cell cell = best[g + 1][j];
            cell.rank = Cell::kSkip;
            for (std::size_t k = 0; k < groups[g].size(); ++k) {
                const auto& item = groups[g][k];
                if (item.cost_units < 0 || j < item.cost_units) continue;
                const Cell& rest = best[g + 1][j - item.cost_units];
                Cell candidate{rest.value + item.value_units, rest.cost + item.cost_units, k};
                if (better(candidate, cell)) cell = candidate;
            }
            best[g][j] = cell;
        }
    }

    KnapsackSolution sol;
    sol.choice.assign(n, std::nullopt);
    int j = cap;
    for (std::size_t g = 0; g < n; ++g) {
        const Cell& cell = best[g][j];
        if (cell.rank != Cell::kSkip) {
            sol.choice[g] = cell.rank;
            j -= groups[g][cell.rank].cost_units;
        }
    }
    sol.total_value_units = n ? best[0][cap].value : 0;
    sol.total_cost_units = n ? best[0][cap].cost : 0;
    return sol;
}

int cost_units(double cost) { return static_cast<int>(std::llround(cost * kCostScale)); }

std::int64_t value_units(double value) { return std::llround(value * kValueScale); }

std::vector<Recommendation> Selection::adopted() const {
    std::vector<Recommendation> out;
    for (const auto& g : groups) {
        for (const auto& c : g.candidates) {
            if (c.status == RecommendationStatus::Adopted) out.push_back(c);
        }
    }
    return out;
}

namespace {

// Candidates with non-positive value are never beneficial and stay out of
// the DP; `index_map` translates DP item indices back to candidate indices.
void build_items(const RecommendationGroup& group, std::vector<KnapsackItem>& items,
                 std::vector<std::size_t>& index_map) {
    for (std::size_t k = 0; k < group.candidates.size(); ++k) {
        const auto& c = group.candidates[k];
        if (value_units(c.value) <= 0) continue;
        items.push_back({cost_units(c.cost), value_units(c.value)});
        index_map.push_back(k);
    }
}

void apply_choice(RecommendationGroup& group, std::optional<std::size_t> chosen) {
    for (std::size_t k = 0; k < group.candidates.size(); ++k) {
        group.candidates[k].status = (chosen && *chosen == k) ? RecommendationStatus::Adopted
                                                              : RecommendationStatus::Discarded;
    }
}

}  // namespace

Selection select(std::vector<RecommendationGroup> groups, double budget) {
    std::vector<std::vector<KnapsackItem>> items(groups.size());
    std::vector<std::vector<std::size_t>> index_map(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) build_items(groups[g], items[g], index_map[g]);

    const auto sol = solve_group_knapsack(items, cost_units(budget));

    Selection out;
    out.budget = budget;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::optional<std::size_t> chosen;
        if (sol.choice[g]) chosen = index_map[g][*sol.choice[g]];
        apply_choice(groups[g], chosen);
        if (chosen) {
            out.total_value += groups[g].candidates[*chosen].value;
            out.total_cost += groups[g].candidates[*chosen].cost;
        }
    }
    out.groups = std::move(groups);
    return out;
}

Selection select_per_group(std::vector<RecommendationGroup> groups, double budget_per_group) {
    Selection out;
    out.budget = budget_per_group * static_cast<double>(groups.size());
    for (auto& group : groups) {
        std::vector<std::vector<KnapsackItem>> items(1);
        std::vector<std::size_t> index_map;
        build_items(group, items[0], index_map);
        const auto sol = solve_group_knapsack(items, cost_units(budget_per_group));
        std::optional<std::size_t> chosen;
        if (sol.choice[0]) chosen = index_map[*sol.choice[0]];
        apply_choice(group, chosen);
        if (chosen) {
            out.total_value += group.candidates[*chosen].value;
            out.total_cost += group.candidates[*chosen].cost;
        }
    }
    out.groups = std::move(groups);
    return out;
}

}  // namespace penheal::remediation
