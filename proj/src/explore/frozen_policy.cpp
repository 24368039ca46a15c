#include "bt/explore/frozen_policy.hpp"

#include <openssl/evp.h>

#include <array>
#include <utility>

#include "bt/learner/serialize.hpp"

namespace bt::explore {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw IntegrityError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xf]);
  }
  return out;
}

FrozenPolicy FrozenPolicy::greedy(learner::QFunction qf, const env::ObservationTable& obs) {
  FrozenPolicy p;
  p.kind_ = Kind::greedy_from_checkpoint;
  p.n_actions_ = qf.n_actions_base();
  p.table_.resize(static_cast<std::size_t>(obs.n_states));
  for (StateId s = 0; s < obs.n_states; ++s) {
    const Eigen::VectorXd q = qf.q_values({s, obs.row(s)});
    p.table_[static_cast<std::size_t>(s)] = learner::argmax(q.head(p.n_actions_));
  }
  p.qf_ = std::move(qf);
  return p;
}

FrozenPolicy FrozenPolicy::scripted(std::vector<ActionId> table, int n_actions) {
  for (ActionId a : table) {
    if (a < 0 || a >= n_actions) throw ValidationError("scripted policy action out of range");
  }
  FrozenPolicy p;
  p.kind_ = Kind::scripted;
  p.n_actions_ = n_actions;
  p.table_ = std::move(table);
  return p;
}

ActionId FrozenPolicy::act(StateId s) const {
  if (s < 0 || static_cast<std::size_t>(s) >= table_.size()) {
    throw ValidationError("frozen policy: state out of range");
  }
  return table_[static_cast<std::size_t>(s)];
}

std::string FrozenPolicy::digest() const {
  std::string bytes;
  learner::put_u32(bytes, kind_ == Kind::scripted ? 1u : 0u);
  learner::put_u32(bytes, static_cast<std::uint32_t>(n_actions_));
  if (kind_ == Kind::greedy_from_checkpoint) learner::put_qfunction(bytes, qf_);
  learner::put_u32(bytes, static_cast<std::uint32_t>(table_.size()));
  for (ActionId a : table_) learner::put_u32(bytes, static_cast<std::uint32_t>(a));
  return sha256_hex(bytes);
}

}  // namespace bt::explore
