#include "phyloswarm/channel.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace phyloswarm {

namespace {

struct Mailbox {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::string> frames;
  bool closed = false;
};

class LoopbackChannel : public Channel {
 public:
  LoopbackChannel(std::shared_ptr<Mailbox> inbox, std::shared_ptr<Mailbox> outbox)
      : inbox_(std::move(inbox)), outbox_(std::move(outbox)) {}
  ~LoopbackChannel() override { close(); }

  void send_frame(std::string_view frame) override {
    std::lock_guard lock(outbox_->mutex);
    if (outbox_->closed) throw ChannelClosed("loopback peer closed");
    outbox_->frames.emplace_back(frame);
    outbox_->ready.notify_one();
  }

  std::optional<std::string> recv_frame() override {
    std::unique_lock lock(inbox_->mutex);
    inbox_->ready.wait(lock, [&] { return !inbox_->frames.empty() || inbox_->closed; });
    if (inbox_->frames.empty()) return std::nullopt;
    std::string frame = std::move(inbox_->frames.front());
    inbox_->frames.pop_front();
    return frame;
  }

  void close() override {
    for (auto* box : {inbox_.get(), outbox_.get()}) {
      std::lock_guard lock(box->mutex);
      box->closed = true;
      box->ready.notify_all();
    }
  }

 private:
  std::shared_ptr<Mailbox> inbox_;
  std::shared_ptr<Mailbox> outbox_;
};

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpChannel() override {
    close();
    ::close(fd_);
  }

  void send_frame(std::string_view frame) override {
    std::lock_guard lock(send_mutex_);
    std::size_t sent = 0;
    while (sent < frame.size()) {
      const ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw ChannelClosed(std::string("tcp send: ") + std::strerror(errno));
      sent += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> recv_frame() override {
    std::string header(4, '\0');
    const std::size_t got = read_fully(header.data(), 4);
    if (got == 0) return std::nullopt;
    if (got < 4) throw FrameError(FrameErrorCode::LengthMismatch, "connection closed inside length prefix");
    const std::size_t length = frame_payload_length(header);
    std::string frame = header;
    frame.resize(4 + length);
    if (read_fully(frame.data() + 4, length) < length) {
      throw FrameError(FrameErrorCode::LengthMismatch, "connection closed inside payload");
    }
    return frame;
  }

  void close() override {
    if (!shut_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  std::size_t read_fully(char* out, std::size_t count) {
    std::size_t got = 0;
    while (got < count) {
      const ssize_t n = ::recv(fd_, out + got, count - got, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      got += static_cast<std::size_t>(n);
    }
    return got;
  }

  int fd_;
  std::mutex send_mutex_;
  std::atomic<bool> shut_{false};
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_loopback_pair() {
  auto a_to_b = std::make_shared<Mailbox>();
  auto b_to_a = std::make_shared<Mailbox>();
  return {std::make_unique<LoopbackChannel>(b_to_a, a_to_b), std::make_unique<LoopbackChannel>(a_to_b, b_to_a)};
}

TcpListener::TcpListener(std::uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw std::runtime_error("listen address must be an IPv4 literal: " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 64) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd_);
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpChannel>(fd);
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return nullptr;
  }
}

void TcpListener::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::unique_ptr<Channel> connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found);
  if (rc != 0) throw std::runtime_error("cannot resolve " + host + ": " + ::gai_strerror(rc));
  std::string reason = "no address";
  for (addrinfo* ai = found; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      return std::make_unique<TcpChannel>(fd);
    }
    reason = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(found);
  throw std::runtime_error("cannot connect to " + host + ":" + std::to_string(port) + ": " + reason);
}

}  // namespace phyloswarm
