#pragma once

#include <vector>

#include "bt/env/transition.hpp"

namespace bt::explore {

/// Training transitions for one collected step. An a+ step expands to
/// itself followed by a copy relabelled with the primitive action pi_p took
/// (marked `is_duplicate`); every other step is returned unchanged.
/// Throws IntegrityError for an a+ step without a resolved primitive action
/// or not flagged as coming from pi_p.
std::vector<env::Transition> relabel(const env::Transition& tr, ActionId extra_action);

}  // namespace bt::explore
