#include "vnflab/agents/replay_buffer.hpp"

#include <random>
#include <stdexcept>

namespace vnflab::agents {

Batch make_batch(const std::vector<const Transition*>& items) {
  if (items.empty()) throw std::invalid_argument("make_batch: empty batch");
  const Eigen::Index b = static_cast<Eigen::Index>(items.size());
  const Eigen::Index d = items.front()->state.size();
  Batch out;
  out.states.resize(d, b);
  out.next_states.resize(d, b);
  out.actions.resize(b);
  out.params.resize(2, b);
  out.rewards.resize(b);
  out.param_index.resize(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Transition& t = *items[static_cast<std::size_t>(i)];
    out.states.col(i) = t.state;
    out.next_states.col(i) = t.next_state;
    out.actions(i) = t.action_index;
    out.params.col(i) = t.params;
    out.rewards(i) = t.reward;
    out.param_index(i) = t.param_index;
  }
  return out;
}

Batch select_columns(const Batch& batch, const std::vector<Eigen::Index>& columns) {
  const Eigen::Index b = static_cast<Eigen::Index>(columns.size());
  Batch out;
  out.states.resize(batch.states.rows(), b);
  out.next_states.resize(batch.next_states.rows(), b);
  out.actions.resize(b);
  out.params.resize(2, b);
  out.rewards.resize(b);
  out.param_index.resize(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Eigen::Index c = columns[static_cast<std::size_t>(i)];
    out.states.col(i) = batch.states.col(c);
    out.next_states.col(i) = batch.next_states.col(c);
    out.actions(i) = batch.actions(c);
    out.params.col(i) = batch.params.col(c);
    out.rewards(i) = batch.rewards(c);
    out.param_index(i) = batch.param_index(c);
  }
  return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
  // Once full, the cursor points at the oldest element.
  const std::size_t base = items_.size() < capacity_ ? 0 : cursor_;
  return items_[(base + i) % items_.size()];
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer::sample on empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> chosen(batch_size);
  for (auto& p : chosen) p = &items_[pick(rng)];
  return make_batch(chosen);
}

}  // namespace vnflab::agents
