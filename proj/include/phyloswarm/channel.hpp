#pragma once

// Frame-oriented duplex connections between a master and one worker.
// Both transports move whole frames (length prefix included) so the same
// codec sits on either side.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "phyloswarm/wire.hpp"

namespace phyloswarm {

class ChannelClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Channel {
 public:
  virtual ~Channel() = default;

  /// Throws ChannelClosed when the connection is gone.
  virtual void send_frame(std::string_view frame) = 0;
  /// Next whole frame, or nullopt once the peer has closed. An oversize
  /// length prefix raises FrameError; a peer vanishing mid-frame raises
  /// FrameError(LengthMismatch).
  virtual std::optional<std::string> recv_frame() = 0;
  /// Idempotent; unblocks a pending recv_frame on either end.
  virtual void close() = 0;

  void send(const WireMessage& message) { send_frame(encode_frame(message)); }
  std::optional<WireMessage> recv() {
    auto frame = recv_frame();
    if (!frame) return std::nullopt;
    return decode_frame(*frame);
  }
};

/// Two connected in-process endpoints.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_loopback_pair();

class TcpListener {
 public:
  /// port 0 picks an ephemeral port.
  explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Blocks for the next connection; nullptr once the listener is closed.
  std::unique_ptr<Channel> accept();
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

std::unique_ptr<Channel> connect_tcp(const std::string& host, std::uint16_t port);

}  // namespace phyloswarm
