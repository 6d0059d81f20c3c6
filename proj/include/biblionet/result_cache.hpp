#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <future>
#include <list>
#include <mutex>
#include <string>
#include <unordered_map>

namespace biblionet {

/// Thread-safe memo table. Concurrent requests for a key being computed wait
/// for the first computation instead of repeating it. A non-zero capacity
/// evicts the least recently used entry. Failed computations are not kept.
template <class T>
class ResultCache {
 public:
  explicit ResultCache(std::size_t capacity = 0) : capacity_(capacity) {}

  T get_or_compute(const std::string& key, const std::function<T()>& compute) {
    std::promise<T> promise;
    std::shared_future<T> future;
    std::uint64_t ticket = 0;
    {
      std::lock_guard lock(mutex_);
      if (const auto it = entries_.find(key); it != entries_.end()) {
        ++hits_;
        lru_.splice(lru_.begin(), lru_, it->second.position);
        future = it->second.value;
      } else {
        ++misses_;
        ticket = ++next_ticket_;
        future = promise.get_future().share();
        lru_.push_front(key);
        entries_.emplace(key, Entry{future, lru_.begin(), ticket});
        evict_locked();
      }
    }
    if (ticket == 0) return future.get();

    try {
      promise.set_value(compute());
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mutex_);
      if (const auto it = entries_.find(key); it != entries_.end() && it->second.ticket == ticket) {
        lru_.erase(it->second.position);
        entries_.erase(it);
      }
    }
    return future.get();
  }

  void clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
    lru_.clear();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }
  std::uint64_t hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
  }
  std::uint64_t misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
  }
  std::size_t capacity() const { return capacity_; }

 private:
  struct Entry {
    std::shared_future<T> value;
    std::list<std::string>::iterator position;
    std::uint64_t ticket;
  };

  void evict_locked() {
    while (capacity_ > 0 && entries_.size() > capacity_) {
      entries_.erase(lru_.back());
      lru_.pop_back();
    }
  }

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Entry> entries_;
  std::list<std::string> lru_;  // most recent first
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t next_ticket_ = 0;
};

}  // namespace biblionet
