#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bt/common.hpp"
#include "bt/env/transition.hpp"
#include "bt/replay/sum_tree.hpp"

namespace bt::replay {

struct ReplayConfig {
  int capacity = 4096;  // sequences
  int sequence_length = 16;
  double overlap = 0.5;
  double priority_exponent = 0.9;
  double is_exponent = 0.0;

  void validate() const;
  /// Steps between consecutive window starts: max(1, round(L * (1 - overlap))).
  [[nodiscard]] int stride() const;
};

/// An emitted window of one episode. Immutable once emitted.
struct SequenceRecord {
  std::vector<env::Transition> transitions;
  EpisodeId episode_id = 0;
  std::int64_t start_index = 0;  // position of the first entry in the episode's stream
};

struct Sample {
  std::uint64_t id = 0;
  std::shared_ptr<const SequenceRecord> record;
  double priority = 0.0;
  double weight = 1.0;
};

struct ReplayStats {
  std::size_t size = 0;
  double priority_mass = 0.0;
  std::uint64_t emitted = 0;
  std::uint64_t evictions = 0;
  std::uint64_t stale_updates = 0;
};

/// Prioritized replay of windows of length L that start every
/// L * (1 - overlap) entries of an episode and never cross episodes.
///
/// Each producer appends to its own stream. A window is emitted as soon as it
/// holds L entries; when the episode ends every window still open is emitted
/// as a shorter tail. Relabelled duplicates are ordinary entries of the stream
/// (they count toward L), but a window never opens on a duplicate: it opens
/// on the next original entry instead.
///
/// Records are sampled with probability p^beta / sum p^beta. New records get
/// the current maximum priority (1 when the buffer is empty). All public
/// methods are thread-safe.
class SequenceBuffer {
 public:
  explicit SequenceBuffer(const ReplayConfig& config = {});

  [[nodiscard]] const ReplayConfig& config() const { return config_; }

  /// Throws IntegrityError when `episode_id` is older than the stream's
  /// current episode, or reuses a closed one. A newer id closes the stream's
  /// current episode first.
  void append(const env::Transition& tr, EpisodeId episode_id, int stream = 0);
  /// Emits the open tails of the stream's current episode.
  void end_episode(int stream = 0);

  /// Empty when the buffer holds no records.
  [[nodiscard]] std::vector<Sample> sample(std::size_t batch_size, Rng& rng) const;

  /// Throws ValidationError for negative priorities; unknown or evicted ids
  /// are skipped and counted in stale_updates.
  void update_priorities(std::span<const std::uint64_t> ids, std::span<const double> priorities);

  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] ReplayStats stats() const;
  /// Sum of p^beta recomputed from the live records (consistency check).
  [[nodiscard]] double recomputed_mass() const;
  [[nodiscard]] double max_priority() const;

 private:
  struct Stream {
    EpisodeId episode_id = 0;
    bool open = false;
    bool have_closed = false;
    EpisodeId last_closed = 0;
    bool pending_open = false;
    std::vector<env::Transition> entries;
    std::vector<std::int64_t> window_starts;
  };

  void close_locked(Stream& st);
  void emit_locked(const Stream& st, std::int64_t start, std::int64_t end);

  ReplayConfig config_;
  mutable std::mutex mu_;
  SumTree tree_;
  std::vector<std::shared_ptr<const SequenceRecord>> slots_;
  std::vector<std::uint64_t> slot_ids_;
  std::vector<double> priorities_;
  std::map<int, Stream> streams_;
  std::uint64_t next_id_ = 0;
  std::size_t size_ = 0;
  std::uint64_t evictions_ = 0;
  std::uint64_t stale_updates_ = 0;
};

}  // namespace bt::replay
