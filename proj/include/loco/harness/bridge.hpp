#pragma once

#include "loco/harness/json_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace loco::harness {

inline constexpr int kBridgeSchemaVersion = 1;

// Operator-to-simulator message after validation. menu_input timestamps are
// assigned when the simulation consumes the message.
struct InboundMessage {
  enum class Type { command, menu_input, primitive, scenario_control };
  Type type = Type::command;
  std::optional<std::int64_t> seq;
  pilot::Command command;
  hri::InputEvent input;
  pilot::PrimitiveRequest primitive;
  std::string control;  // stop | pause | resume
};
const char* to_string(InboundMessage::Type type);

/// Parses one text frame. Throws ProtocolError for malformed JSON, an
/// unknown type or an invalid payload.
InboundMessage parse_inbound(const std::string& text);

// Simulator-to-operator frame; the sequence number is stamped at send time.
struct OutboundFrame {
  std::string type;  // hello | state | menu_frame | event_ack | error
  json payload;
};

/// {"type", "seq", "payload"} as compact text.
std::string encode_frame(const OutboundFrame& frame, std::int64_t seq);

OutboundFrame hello_frame();
OutboundFrame error_frame(const std::string& message, std::optional<std::int64_t> in_reply_to = std::nullopt);
OutboundFrame ack_frame(const InboundMessage& msg, bool accepted, const std::string& detail, json extra = json());

/// Example of every message type, for schema validation.
std::vector<std::string> sample_messages();

// Bounded FIFO that drops its oldest element when full.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  /// True when an element had to be dropped to make room.
  bool push(T value) {
    return push_evicting(std::move(value), [](const T&) { return true; });
  }

  /// When full, drops the oldest element satisfying `evictable`, or the
  /// oldest element if none does.
  template <typename Pred>
  bool push_evicting(T value, Pred evictable) {
    bool dropped = false;
    {
      std::lock_guard lock(mutex_);
      if (items_.size() >= capacity_) {
        auto victim = std::find_if(items_.begin(), items_.end(), evictable);
        items_.erase(victim == items_.end() ? items_.begin() : victim);
        ++dropped_;
        dropped = true;
      }
      items_.push_back(std::move(value));
    }
    ready_.notify_one();
    return dropped;
  }

  std::optional<T> try_pop() {
    std::lock_guard lock(mutex_);
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    return v;
  }

  std::optional<T> pop_for(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    if (!ready_.wait_for(lock, timeout, [&] { return !items_.empty(); })) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    return v;
  }

  std::vector<T> drain() {
    std::lock_guard lock(mutex_);
    std::vector<T> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

  void clear() {
    std::lock_guard lock(mutex_);
    items_.clear();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }
  std::uint64_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }
  std::size_t capacity() const { return capacity_; }

 private:
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<T> items_;
  std::uint64_t dropped_ = 0;
};

// The only state shared between the simulation thread and the bridge
// thread. Frames are published only while an operator is connected.
class BridgeChannel {
 public:
  explicit BridgeChannel(std::size_t outbound_capacity = 64, std::size_t inbound_capacity = 256)
      : outbound_(outbound_capacity), inbound_(inbound_capacity) {}

  // Simulation side.
  /// Under backpressure state frames are dropped oldest-first; acks, errors
  /// and menu frames are kept while any state frame remains queued.
  void publish(OutboundFrame frame) {
    if (connected_) {
      outbound_.push_evicting(std::move(frame), [](const OutboundFrame& f) { return f.type == "state"; });
    }
  }
  std::vector<InboundMessage> drain_inbound() { return inbound_.drain(); }

  // Bridge side.
  void submit(InboundMessage msg) { inbound_.push(std::move(msg)); }
  std::optional<OutboundFrame> next_outbound(std::chrono::milliseconds timeout) { return outbound_.pop_for(timeout); }
  std::optional<OutboundFrame> try_next_outbound() { return outbound_.try_pop(); }
  void set_connected(bool connected) {
    if (connected) outbound_.clear();
    connected_ = connected;
  }
  bool connected() const { return connected_; }

  /// Frames dropped because the consumer fell behind.
  std::uint64_t dropped() const { return outbound_.dropped(); }

 private:
  BoundedQueue<OutboundFrame> outbound_;
  BoundedQueue<InboundMessage> inbound_;
  std::atomic<bool> connected_{false};
};

}  // namespace loco::harness
