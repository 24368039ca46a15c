#include "bt/explore/relabel.hpp"

namespace bt::explore {

std::vector<env::Transition> relabel(const env::Transition& tr, ActionId extra_action) {
  if (extra_action == kNoAction || tr.action != extra_action) return {tr};
  if (!tr.from_pretrained) throw IntegrityError("a+ transition not flagged as from_pretrained");
  if (tr.primitive_action == kNoAction) {
    throw IntegrityError("a+ transition has no primitive action");
  }
  env::Transition dup = tr;
  dup.action = tr.primitive_action;
  dup.is_duplicate = true;
  return {tr, dup};
}

}  // namespace bt::explore
