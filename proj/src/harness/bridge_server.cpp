#include "loco/harness/bridge_server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include <deque>
#include <thread>

namespace loco::harness {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr auto kPollInterval = std::chrono::milliseconds(5);

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, BridgeChannel& channel, bool refuse)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), channel_(channel), refuse_(refuse) {}

  void start(std::function<void()> on_close) {
    on_close_ = std::move(on_close);
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void close() {
    closing_ = true;
    timer_.cancel();
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return finish();
    if (refuse_) {
      enqueue(encode_frame(error_frame("another operator session is active"), ++out_seq_));
      closing_after_write_ = true;
      return;
    }
    channel_.set_connected(true);
    connected_ = true;
    enqueue(encode_frame(hello_frame(), ++out_seq_));
    read();
    poll();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) return finish();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      InboundMessage msg = parse_inbound(text);
      if (msg.seq && last_in_seq_ && *msg.seq <= *last_in_seq_) {
        throw ProtocolError("seq must increase");
      }
      if (msg.seq) last_in_seq_ = msg.seq;
      channel_.submit(std::move(msg));
    } catch (const ProtocolError& e) {
      spdlog::debug("bridge: rejected inbound frame: {}", e.what());
      const json j = json::parse(text, nullptr, false);
      std::optional<std::int64_t> seq;
      if (j.is_object() && j.contains("seq") && j["seq"].is_number_integer()) seq = j["seq"].get<std::int64_t>();
      enqueue(encode_frame(error_frame(e.what(), seq), ++out_seq_));
    }
    read();
  }

  void poll() {
    if (closing_) return;
    while (auto frame = channel_.try_next_outbound()) {
      if (frame->type == "state") frame->payload["dropped"] = channel_.dropped();
      enqueue(encode_frame(*frame, ++out_seq_));
    }
    timer_.expires_after(kPollInterval);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->poll();
    });
  }

  void enqueue(std::string text) {
    writes_.push_back(std::move(text));
    if (writes_.size() == 1) write_next();
  }

  void write_next() {
    ws_.async_write(asio::buffer(writes_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      self->writes_.pop_front();
      if (!self->writes_.empty()) {
        self->write_next();
      } else if (self->closing_after_write_) {
        self->ws_.async_close(websocket::close_code::try_again_later,
                              [self](beast::error_code) { self->finish(); });
      }
    });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    closing_ = true;
    timer_.cancel();
    if (connected_) channel_.set_connected(false);
    if (on_close_) on_close_();
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  BridgeChannel& channel_;
  bool refuse_;
  std::function<void()> on_close_;
  beast::flat_buffer buffer_;
  std::deque<std::string> writes_;
  std::int64_t out_seq_ = 0;
  std::optional<std::int64_t> last_in_seq_;
  bool connected_ = false;
  bool closing_ = false;
  bool closing_after_write_ = false;
  bool finished_ = false;
};

}  // namespace

struct BridgeServer::Impl {
  Impl(BridgeChannel& ch, std::uint16_t port, const std::string& address)
      : channel(ch), acceptor(io) {
    const tcp::endpoint endpoint(asio::ip::make_address(address), port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
    bound_port = acceptor.local_endpoint().port();
    accept();
    thread = std::thread([this] { io.run(); });
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      const bool refuse = active != nullptr;
      auto session = std::make_shared<Session>(std::move(socket), channel, refuse);
      if (!refuse) active = session;
      std::weak_ptr<Session> weak = session;
      session->start([this, weak, refuse] {
        if (!refuse && active == weak.lock()) active.reset();
      });
      accept();
    });
  }

  BridgeChannel& channel;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::shared_ptr<Session> active;
  std::thread thread;
  std::uint16_t bound_port = 0;
};

BridgeServer::BridgeServer(BridgeChannel& channel, std::uint16_t port, const std::string& address) {
  try {
    impl_ = std::make_unique<Impl>(channel, port, address);
  } catch (const boost::system::system_error& e) {
    throw std::runtime_error("bridge: cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
  }
  spdlog::info("bridge listening on {}:{}", address, this->port());
}

BridgeServer::~BridgeServer() { stop(); }

std::uint16_t BridgeServer::port() const { return impl_->bound_port; }

void BridgeServer::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  asio::post(impl_->io, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    if (impl_->active) impl_->active->close();
  });
  impl_->io.stop();
  impl_->thread.join();
  impl_->channel.set_connected(false);
}

}  // namespace loco::harness
