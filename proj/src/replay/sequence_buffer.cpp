#include "bt/replay/sequence_buffer.hpp"

#include <cmath>
#include <string>

namespace bt::replay {

void ReplayConfig::validate() const {
  if (capacity < 1) throw ConfigError("replay.capacity must be >= 1");
  if (sequence_length < 1) throw ConfigError("replay.sequence_length must be >= 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ConfigError("replay.overlap must be in [0, 1)");
  if (!(priority_exponent >= 0.0)) throw ConfigError("replay.priority_exponent must be >= 0");
  if (is_exponent != 0.0) {
    throw ConfigError("replay.is_exponent: only 0 (no importance weighting) is supported");
  }
}

int ReplayConfig::stride() const {
  const auto s = static_cast<int>(std::lround(sequence_length * (1.0 - overlap)));
  return s < 1 ? 1 : s;
}

SequenceBuffer::SequenceBuffer(const ReplayConfig& config)
    : config_(config),
      tree_(static_cast<std::size_t>(config.capacity > 0 ? config.capacity : 1)) {
  config_.validate();
  slots_.resize(static_cast<std::size_t>(config_.capacity));
  slot_ids_.assign(slots_.size(), 0);
  priorities_.assign(slots_.size(), 0.0);
}

void SequenceBuffer::emit_locked(const Stream& st, std::int64_t start, std::int64_t end) {
  auto rec = std::make_shared<SequenceRecord>();
  rec->transitions.assign(st.entries.begin() + start, st.entries.begin() + end);
  rec->episode_id = st.episode_id;
  rec->start_index = start;

  const double p = size_ == 0 ? 1.0 : tree_.max_key();
  const std::uint64_t id = next_id_++;
  const auto slot = static_cast<std::size_t>(id % slots_.size());
  if (slots_[slot]) {
    ++evictions_;
  } else {
    ++size_;
  }
  slots_[slot] = std::move(rec);
  slot_ids_[slot] = id;
  priorities_[slot] = p;
  tree_.set(slot, std::pow(p, config_.priority_exponent), p);
}

void SequenceBuffer::close_locked(Stream& st) {
  if (!st.open) return;
  const auto n = static_cast<std::int64_t>(st.entries.size());
  for (std::int64_t start : st.window_starts) {
    if (start < n) emit_locked(st, start, n);
  }
  st.window_starts.clear();
  st.entries.clear();
  st.pending_open = false;
  st.open = false;
  st.have_closed = true;
  st.last_closed = st.episode_id;
}

void SequenceBuffer::append(const env::Transition& tr, EpisodeId episode_id, int stream) {
  std::lock_guard lock(mu_);
  Stream& st = streams_[stream];
  if (st.open && episode_id != st.episode_id) {
    if (episode_id < st.episode_id) {
      throw IntegrityError("replay: episode " + std::to_string(episode_id) + " arrived after " +
                           std::to_string(st.episode_id) + " on stream " + std::to_string(stream));
    }
    close_locked(st);
  }
  if (!st.open) {
    if (st.have_closed && episode_id <= st.last_closed) {
      throw IntegrityError("replay: episode " + std::to_string(episode_id) +
                           " is not newer than closed episode " + std::to_string(st.last_closed));
    }
    st.open = true;
    st.episode_id = episode_id;
  }

  const auto index = static_cast<std::int64_t>(st.entries.size());
  if (index % config_.stride() == 0) st.pending_open = true;
  if (st.pending_open && !tr.is_duplicate) {
    st.window_starts.push_back(index);
    st.pending_open = false;
  }
  env::Transition stored = tr;
  stored.episode_id = episode_id;
  st.entries.push_back(stored);

  const std::int64_t end = index + 1;
  std::erase_if(st.window_starts, [&](std::int64_t start) {
    if (end - start < config_.sequence_length) return false;
    emit_locked(st, start, end);
    return true;
  });
}

void SequenceBuffer::end_episode(int stream) {
  std::lock_guard lock(mu_);
  auto it = streams_.find(stream);
  if (it != streams_.end()) close_locked(it->second);
}

std::vector<Sample> SequenceBuffer::sample(std::size_t batch_size, Rng& rng) const {
  std::lock_guard lock(mu_);
  std::vector<Sample> out;
  if (size_ == 0) return out;
  out.reserve(batch_size);
  const double total = tree_.total();
  for (std::size_t b = 0; b < batch_size; ++b) {
    std::size_t slot = 0;
    if (total > 0.0) {
      slot = tree_.find(uniform01(rng) * total);
    } else {
      // Every live record has priority 0: fall back to uniform.
      std::size_t k = static_cast<std::size_t>(uniform_index(rng, static_cast<std::int64_t>(size_)));
      for (slot = 0; slot < slots_.size(); ++slot) {
        if (slots_[slot] && k-- == 0) break;
      }
    }
    out.push_back({slot_ids_[slot], slots_[slot], priorities_[slot], 1.0});
  }
  return out;
}

void SequenceBuffer::update_priorities(std::span<const std::uint64_t> ids,
                                       std::span<const double> priorities) {
  if (ids.size() != priorities.size()) {
    throw ValidationError("update_priorities: ids and priorities differ in length");
  }
  for (double p : priorities) {
    if (!(p >= 0.0)) throw ValidationError("update_priorities: negative priority");
  }
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto slot = static_cast<std::size_t>(ids[i] % slots_.size());
    if (ids[i] >= next_id_ || !slots_[slot] || slot_ids_[slot] != ids[i]) {
      ++stale_updates_;
      continue;
    }
    priorities_[slot] = priorities[i];
    tree_.set(slot, std::pow(priorities[i], config_.priority_exponent), priorities[i]);
  }
}

std::size_t SequenceBuffer::size() const {
  std::lock_guard lock(mu_);
  return size_;
}

ReplayStats SequenceBuffer::stats() const {
  std::lock_guard lock(mu_);
  return {size_, tree_.total(), next_id_, evictions_, stale_updates_};
}

double SequenceBuffer::recomputed_mass() const {
  std::lock_guard lock(mu_);
  double total = 0.0;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i]) total += std::pow(priorities_[i], config_.priority_exponent);
  }
  return total;
}

double SequenceBuffer::max_priority() const {
  std::lock_guard lock(mu_);
  return size_ == 0 ? 1.0 : tree_.max_key();
}

}  // namespace bt::replay
