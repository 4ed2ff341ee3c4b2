#include "cbopt/ndjson.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

namespace cbopt {

using nlohmann::json;

Endpoint parse_endpoint(const std::string& s) {
  Endpoint ep;
  const std::size_t colon = s.rfind(':');
  std::string port_str;
  if (colon == std::string::npos) {
    port_str = s;
  } else {
    if (colon > 0) ep.host = s.substr(0, colon);
    port_str = s.substr(colon + 1);
  }
  try {
    ep.port = std::stoi(port_str);
  } catch (const std::exception&) {
    throw std::invalid_argument("endpoint must be host:port, got '" + s + "'");
  }
  if (ep.port < 1 || ep.port > 65535) throw std::invalid_argument("endpoint port out of range");
  return ep;
}

namespace {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  int fd() const { return fd_; }

 private:
  int fd_;
};

int tcp_connect(const Endpoint& ep, int timeout_ms) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(ep.port));
  if (::inet_pton(AF_INET, ep.host == "localhost" ? "127.0.0.1" : ep.host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw TransportError("unresolvable host '" + ep.host + "' (numeric IPv4 or localhost)");
  }
  timeval tv{};
  tv.tv_sec = timeout_ms / 1000;
  tv.tv_usec = (timeout_ms % 1000) * 1000;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw TransportError("connect to " + ep.host + ":" + std::to_string(ep.port) + " failed");
  }
  return fd;
}

void send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw TransportError("send failed");
    off += static_cast<std::size_t>(n);
  }
}

// Reads up to and including '\n'; empty optional-style return via bool.
bool recv_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    const std::size_t pos = buffer.find('\n');
    if (pos != std::string::npos) {
      line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      return true;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n == 0) return false;  // orderly shutdown
    if (n < 0) throw TransportError("recv failed or timed out");
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

json parse_response_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::runtime_error("malformed response: not a JSON object");
  return j;
}

std::vector<Eigen::VectorXd> decode_logits(const json& j, uint64_t expect_id, std::size_t expect_rows) {
  if (!j.contains("id") || !j["id"].is_number_unsigned()) {
    throw std::runtime_error("malformed response: missing id");
  }
  if (j["id"].get<uint64_t>() != expect_id) {
    throw std::runtime_error("response id mismatch: expected " + std::to_string(expect_id) + ", got " +
                             std::to_string(j["id"].get<uint64_t>()));
  }
  if (!j.contains("logits") || !j["logits"].is_array()) {
    throw std::runtime_error("malformed response: missing logits");
  }
  const json& rows = j["logits"];
  if (rows.size() != expect_rows) {
    throw std::runtime_error("response row count mismatch: expected " + std::to_string(expect_rows) +
                             ", got " + std::to_string(rows.size()));
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(rows.size());
  for (const json& row : rows) {
    if (!row.is_array() || row.empty()) throw std::runtime_error("malformed response: bad logit row");
    Eigen::VectorXd v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number()) throw std::runtime_error("malformed response: non-numeric logit");
      v[static_cast<Eigen::Index>(i)] = row[i].get<double>();
      if (!std::isfinite(v[static_cast<Eigen::Index>(i)])) {
        throw std::runtime_error("malformed response: non-finite logit");
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> remote_classify(const Endpoint& endpoint,
                                             const std::vector<Eigen::VectorXd>& inputs,
                                             const RemoteOptions& opts) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(inputs.size());
  static std::atomic<uint64_t> next_id{1};

  std::size_t start = 0;
  while (start < inputs.size()) {
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(opts.chunk), inputs.size() - start);
    const uint64_t id = next_id.fetch_add(1);

    json req;
    req["id"] = id;
    json rows = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::VectorXd& v = inputs[start + i];
      json row = json::array();
      for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(v[k]);
      rows.push_back(std::move(row));
    }
    req["inputs"] = std::move(rows);
    const std::string line = req.dump() + "\n";

    std::vector<Eigen::VectorXd> chunk_logits;
    int attempt = 0;
    for (;;) {
      ++attempt;
      try {
        Socket sock(tcp_connect(endpoint, opts.timeout_ms));
        send_all(sock.fd(), line);
        std::string buffer, resp;
        if (!recv_line(sock.fd(), buffer, resp)) throw TransportError("connection closed before response");
        chunk_logits = decode_logits(parse_response_line(resp), id, count);
        break;
      } catch (const TransportError& e) {
        if (attempt >= opts.max_attempts) {
          throw std::runtime_error(std::string("remote_classify: transport failed after ") +
                                   std::to_string(attempt) + " attempts: " + e.what());
        }
      }
    }
    for (auto& v : chunk_logits) out.push_back(std::move(v));
    start += count;
  }
  return out;
}

NdjsonServer::NdjsonServer(int port, Handler handler) : handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("NdjsonServer: socket() failed");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listen_fd_);
    throw std::runtime_error("NdjsonServer: bind to port " + std::to_string(port) + " failed");
  }
  if (::listen(listen_fd_, 16) != 0) {
    ::close(listen_fd_);
    throw std::runtime_error("NdjsonServer: listen failed");
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

NdjsonServer::~NdjsonServer() { stop(); }

void NdjsonServer::start() {
  thread_ = std::thread([this] { accept_loop(); });
}

void NdjsonServer::serve_forever() { accept_loop(); }

void NdjsonServer::stop() {
  stopping_.store(true);
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (thread_.joinable()) thread_.join();
}

void NdjsonServer::accept_loop() {
  while (!stopping_.load()) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load()) break;
      continue;
    }
    serve_connection(fd);
  }
}

void NdjsonServer::serve_connection(int fd) {
  Socket sock(fd);
  std::string buffer, line;
  try {
    while (recv_line(fd, buffer, line)) {
      json req = json::parse(line, nullptr, false);
      json resp;
      if (req.is_discarded() || !req.is_object() || !req.contains("id") || !req.contains("inputs") ||
          !req["inputs"].is_array()) {
        resp["error"] = "malformed request";
        send_all(fd, resp.dump() + "\n");
        continue;
      }
      std::vector<std::vector<double>> inputs;
      inputs.reserve(req["inputs"].size());
      for (const json& row : req["inputs"]) inputs.push_back(row.get<std::vector<double>>());
      const std::vector<std::vector<double>> logits = handler_(inputs);
      resp["id"] = req["id"];
      resp["logits"] = logits;
      send_all(fd, resp.dump() + "\n");
    }
  } catch (const std::exception&) {
    // connection-level failure: drop the client, keep serving
  }
}

NdjsonServer::Handler echo_handler() {
  return [](const std::vector<std::vector<double>>& inputs) { return inputs; };
}

NdjsonServer::Handler classifier_handler(const Classifier& h) {
  return [&h](const std::vector<std::vector<double>>& inputs) {
    std::vector<std::vector<double>> out;
    out.reserve(inputs.size());
    for (const std::vector<double>& in : inputs) {
      const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(in.data(), static_cast<Eigen::Index>(in.size()));
      const Eigen::VectorXd y = h.logits(x);
      out.emplace_back(y.data(), y.data() + y.size());
    }
    return out;
  };
}

RemoteClassifier::RemoteClassifier(Endpoint endpoint, int input_dim, int num_classes,
                                   bool outputs_are_probabilities, RemoteOptions opts)
    : endpoint_(std::move(endpoint)),
      input_dim_(input_dim),
      num_classes_(num_classes),
      outputs_are_probabilities_(outputs_are_probabilities),
      opts_(opts) {}

Eigen::VectorXd RemoteClassifier::logits(const Eigen::VectorXd& input) const {
  return logits_batch({input})[0];
}

std::vector<Eigen::VectorXd> RemoteClassifier::logits_batch(
    const std::vector<Eigen::VectorXd>& inputs) const {
  std::vector<Eigen::VectorXd> out = remote_classify(endpoint_, inputs, opts_);
  for (Eigen::VectorXd& v : out) {
    if (v.size() != num_classes_) throw std::runtime_error("remote logits have wrong class count");
    if (outputs_are_probabilities_) v = v.array().max(1e-300).log().matrix();
  }
  return out;
}

}  // namespace cbopt
