// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

#include "blowchoc/filter.hpp"
#include "blowchoc/key_source.hpp"

namespace blowchoc {

/// Blocking FIFO with a fixed capacity. push() waits while the queue is full,
/// pop() waits while it is empty; after close() pop() drains what is left and
/// then returns nullopt.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  /// Returns false if the queue was closed.
  bool push(T item) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
};

struct BuildOptions {
  /// 0 inserts sequentially in the calling thread. Any other value runs one
  /// worker thread per shard, fed by a dispatcher in the calling thread.
  unsigned threads = 0;
  /// Read the key source on its own thread instead of in the dispatcher.
  bool reader_thread = false;
  /// Keys buffered per shard before the dispatcher blocks.
  std::size_t queue_capacity = std::size_t{1} << 16;
  /// Keys per message between dispatcher and worker.
  std::size_t batch_size = 1024;
};

/// Inserts every key of source into filter.
///
/// The dispatcher appends each key to the FIFO of its shard; each worker
/// drains its own FIFO and writes only its own shard. Because shards are
/// disjoint and each FIFO keeps stream order, the result is bit-identical to
/// inserting the whole stream sequentially, for any thread setting.
/// Exceptions from the source are rethrown after all workers have stopped.
void insert_all(Filter& filter, KeySource& source, const BuildOptions& options = {});

/// Creates a filter from config and inserts every key of source.
Filter build_sharded(const FilterConfig& config, KeySource& source,
                     const BuildOptions& options = {});

}  // namespace blowchoc
