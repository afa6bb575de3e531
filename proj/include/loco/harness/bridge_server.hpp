#pragma once

#include "loco/harness/bridge.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace loco::harness {

// WebSocket endpoint serving a single operator session. Runs its own I/O
// thread; the simulation talks to it only through the BridgeChannel.
// A second concurrent client receives an error frame and is closed.
class BridgeServer {
 public:
  /// Port 0 binds an ephemeral port. Throws std::runtime_error when the
  /// port cannot be bound.
  BridgeServer(BridgeChannel& channel, std::uint16_t port, const std::string& address = "127.0.0.1");
  ~BridgeServer();

  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  std::uint16_t port() const;
  /// Idempotent; joins the I/O thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace loco::harness
