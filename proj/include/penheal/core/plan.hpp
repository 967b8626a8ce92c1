#pragma once

#include <string>
#include <vector>

#include "penheal/core/model.hpp"

namespace penheal {

/// Checks every TaskNode/AttackPlan invariant. Each violation string starts
/// with the offending node id ("1.1: parent mismatch"). Total function.
std::vector<std::string> validate_plan(const AttackPlan& plan);

/// Checks that `next` is a legal successor of `prev`: no node disappears,
/// and statuses only move ToDo -> Completed/Failed.
std::vector<std::string> validate_transition(const AttackPlan& prev, const AttackPlan& next);

}  // namespace penheal
