#pragma once

#include <cstdint>
#include <string>

#include "bt/harness/config.hpp"
#include "bt/learner/q_function.hpp"

namespace bt::harness {

/// Versioned, digested value-function snapshot.
///
/// Binary layout (all integers and doubles little-endian, doubles IEEE-754
/// binary64):
///   "BTCKPT01"                      8-byte magic
///   u32 format_version              currently 1
///   u32 phase                       0 pretrain_ngu, 1 pretrain_rnd, 2 transfer
///   u64 env_steps, u64 seed
///   u32 repr (0 tabular, 1 encoder_head), u32 input_dim, u32 feature_dim,
///   u32 n_actions, u32 extra_action
///   4 arrays w1, b1, w2, b2:        u32 rows, u32 cols, rows*cols f64 (column-major)
///   32 bytes                        SHA-256 of everything above
struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t format_version = kFormatVersion;
  Phase phase = Phase::pretrain_ngu;
  std::uint64_t env_steps = 0;
  std::uint64_t seed = 0;
  learner::QFunction q;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws IntegrityError on a bad magic, unsupported version, truncated data
/// or digest mismatch.
Checkpoint deserialize_checkpoint(std::string_view bytes);

/// Throws IoError when the file cannot be written or read.
void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace bt::harness
