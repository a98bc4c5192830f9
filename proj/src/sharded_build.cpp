// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/sharded_build.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <exception>
#include <memory>
#include <thread>
#include <vector>

namespace blowchoc {

namespace {

using Batch = std::vector<std::uint64_t>;

void insert_sequential(Filter& filter, KeySource& source, std::size_t batch_size) {
  Batch batch(batch_size);
  while (const std::size_t n = source.read(batch)) {
    for (std::size_t i = 0; i < n; ++i) filter.insert(batch[i]);
  }
}

}  // namespace

void insert_all(Filter& filter, KeySource& source, const BuildOptions& options) {
  const std::size_t batch_size = std::max<std::size_t>(options.batch_size, 1);
  if (options.threads == 0) {
    insert_sequential(filter, source, batch_size);
    return;
  }

  const std::size_t num_shards = filter.shard_plan().num_shards;
  const std::size_t queue_batches = std::max<std::size_t>(options.queue_capacity / batch_size, 1);

  std::vector<std::unique_ptr<BoundedQueue<Batch>>> queues;
  queues.reserve(num_shards);
  for (std::size_t s = 0; s < num_shards; ++s) {
    queues.push_back(std::make_unique<BoundedQueue<Batch>>(queue_batches));
  }
  std::vector<std::exception_ptr> worker_errors(num_shards);
  // Writers currently inside each shard; must never exceed one.
  auto writers = std::make_unique<std::atomic<int>[]>(num_shards);

  std::vector<std::thread> workers;
  workers.reserve(num_shards);
  for (std::size_t s = 0; s < num_shards; ++s) {
    workers.emplace_back([&, s] {
      while (std::optional<Batch> batch = queues[s]->pop()) {
        if (worker_errors[s]) continue;  // keep draining so the dispatcher never blocks
        [[maybe_unused]] const int before = writers[s].fetch_add(1);
        assert(before == 0);
        try {
          for (std::uint64_t key : *batch) filter.insert_into_shard(s, key);
        } catch (...) {
          worker_errors[s] = std::current_exception();
        }
        writers[s].fetch_sub(1);
      }
    });
  }

  BoundedQueue<Batch> read_queue(std::max<std::size_t>(queue_batches, 2));
  std::exception_ptr reader_error;
  std::thread reader;
  if (options.reader_thread) {
    reader = std::thread([&] {
      try {
        for (;;) {
          Batch batch(batch_size);
          const std::size_t n = source.read(batch);
          if (n == 0) break;
          batch.resize(n);
          if (!read_queue.push(std::move(batch))) break;
        }
      } catch (...) {
        reader_error = std::current_exception();
      }
      read_queue.close();
    });
  }

  std::exception_ptr dispatch_error;
  std::uint64_t dispatched = 0;
  try {
    std::vector<Batch> pending(num_shards);
    for (auto& p : pending) p.reserve(batch_size);
    auto dispatch = [&](std::span<const std::uint64_t> keys) {
      for (std::uint64_t key : keys) {
        const std::size_t s = filter.shard_of(key);
        pending[s].push_back(key);
        if (pending[s].size() == batch_size) {
          queues[s]->push(std::move(pending[s]));
          pending[s] = Batch();
          pending[s].reserve(batch_size);
        }
      }
      dispatched += keys.size();
    };

    if (options.reader_thread) {
      while (std::optional<Batch> batch = read_queue.pop()) dispatch(*batch);
    } else {
      Batch batch(batch_size);
      while (const std::size_t n = source.read(batch)) dispatch(std::span(batch).first(n));
    }
    for (std::size_t s = 0; s < num_shards; ++s) {
      if (!pending[s].empty()) queues[s]->push(std::move(pending[s]));
    }
  } catch (...) {
    dispatch_error = std::current_exception();
  }

  read_queue.close();
  if (reader.joinable()) reader.join();
  for (auto& q : queues) q->close();
  for (auto& w : workers) w.join();

  if (dispatch_error) std::rethrow_exception(dispatch_error);
  if (reader_error) std::rethrow_exception(reader_error);
  for (const auto& e : worker_errors) {
    if (e) std::rethrow_exception(e);
  }
  filter.set_inserted(filter.inserted() + dispatched);
}

Filter build_sharded(const FilterConfig& config, KeySource& source, const BuildOptions& options) {
  Filter filter(config);
  insert_all(filter, source, options);
  return filter;
}

}  // namespace blowchoc
