#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "cbopt/ndjson.hpp"
#include "cbopt/rng.hpp"

using namespace cbopt;

namespace {

// Minimal one-shot server: accepts a single connection, reads one line,
// replies with a fixed payload. Used to exercise the client's rejection of
// protocol violations, which the real server never produces.
class OneShotServer {
 public:
  explicit OneShotServer(std::string reply) : reply_(std::move(reply)) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd_ >= 0);
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    REQUIRE(::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    socklen_t len = sizeof(addr);
    REQUIRE(::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
    port_ = ntohs(addr.sin_port);
    REQUIRE(::listen(fd_, 1) == 0);
    thread_ = std::thread([this] {
      const int conn = ::accept(fd_, nullptr, nullptr);
      if (conn < 0) return;
      char buf[65536];
      std::string line;
      while (line.find('\n') == std::string::npos) {
        const ssize_t n = ::recv(conn, buf, sizeof(buf), 0);
        if (n <= 0) break;
        line.append(buf, static_cast<std::size_t>(n));
      }
      // Echo the request id into a %ID% placeholder if present.
      std::string out = reply_;
      const auto idpos = line.find("\"id\":");
      if (out.find("%ID%") != std::string::npos && idpos != std::string::npos) {
        std::size_t start = idpos + 5;
        std::size_t end = start;
        while (end < line.size() && isdigit(static_cast<unsigned char>(line[end]))) ++end;
        out.replace(out.find("%ID%"), 4, line.substr(start, end - start));
      }
      ::send(conn, out.data(), out.size(), MSG_NOSIGNAL);
      ::close(conn);
    });
  }

  ~OneShotServer() {
    if (thread_.joinable()) thread_.join();
    if (fd_ >= 0) ::close(fd_);
  }

  int port() const { return port_; }

 private:
  std::string reply_;
  int fd_ = -1;
  int port_ = 0;
  std::thread thread_;
};

std::vector<Eigen::VectorXd> make_inputs(int n, int d, Rng& rng) {
  std::vector<Eigen::VectorXd> v;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x[j] = rng.uniform();
    v.push_back(x);
  }
  return v;
}

}  // namespace

TEST_CASE("parse_endpoint accepts host:port and bare ports") {
  const Endpoint a = parse_endpoint("10.1.2.3:8000");
  CHECK(a.host == "10.1.2.3");
  CHECK(a.port == 8000);
  const Endpoint b = parse_endpoint("9000");
  CHECK(b.host == "127.0.0.1");
  CHECK(b.port == 9000);
  const Endpoint c = parse_endpoint("localhost:1234");
  CHECK(c.host == "localhost");
  CHECK(c.port == 1234);
  CHECK_THROWS_AS(parse_endpoint("host:not_a_port"), std::invalid_argument);
  CHECK_THROWS_AS(parse_endpoint("host:70000"), std::invalid_argument);
  CHECK_THROWS_AS(parse_endpoint(""), std::invalid_argument);
}

TEST_CASE("echo round-trip preserves order and values") {
  NdjsonServer server(0, echo_handler());
  server.start();
  Endpoint ep;
  ep.port = server.port();
  Rng rng(1);
  const std::vector<Eigen::VectorXd> inputs = make_inputs(10, 4, rng);
  const std::vector<Eigen::VectorXd> out = remote_classify(ep, inputs);
  REQUIRE(out.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK((out[i] - inputs[i]).cwiseAbs().maxCoeff() < 1e-12);
  server.stop();
}

TEST_CASE("batches larger than the chunk size split and reassemble in order") {
  // Handler that tags each row with its global value so order is observable,
  // and records per-request sizes.
  std::vector<std::size_t> sizes;
  NdjsonServer server(0, [&sizes](const std::vector<std::vector<double>>& rows) {
    sizes.push_back(rows.size());
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) out.push_back({r[0] * 2.0});
    return out;
  });
  server.start();
  Endpoint ep;
  ep.port = server.port();

  std::vector<Eigen::VectorXd> inputs;
  for (int i = 0; i < 150; ++i) inputs.push_back(Eigen::VectorXd::Constant(1, i * 0.001));
  const std::vector<Eigen::VectorXd> out = remote_classify(ep, inputs);
  REQUIRE(out.size() == 150);
  for (int i = 0; i < 150; ++i) CHECK(out[i][0] == doctest::Approx(i * 0.002).epsilon(1e-12));
  server.stop();
  REQUIRE(sizes.size() == 3);  // 64 + 64 + 22
  CHECK(sizes[0] == 64);
  CHECK(sizes[1] == 64);
  CHECK(sizes[2] == 22);
}

TEST_CASE("a served classifier matches local evaluation") {
  LinearClassifier cls = LinearClassifier::random(6, 3, 5);
  NdjsonServer server(0, classifier_handler(cls));
  server.start();
  Endpoint ep;
  ep.port = server.port();
  RemoteClassifier remote(ep, 6, 3);
  Rng rng(2);
  const std::vector<Eigen::VectorXd> inputs = make_inputs(20, 6, rng);
  const std::vector<Eigen::VectorXd> out = remote.logits_batch(inputs);
  REQUIRE(out.size() == 20);
  for (int i = 0; i < 20; ++i)
    CHECK((out[i] - cls.logits(inputs[i])).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((remote.logits(inputs[0]) - cls.logits(inputs[0])).cwiseAbs().maxCoeff() < 1e-9);
  server.stop();
}

TEST_CASE("probability outputs are mapped through a log") {
  NdjsonServer server(0, [](const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back({0.25, 0.75});
    return out;
  });
  server.start();
  Endpoint ep;
  ep.port = server.port();
  RemoteClassifier remote(ep, 3, 2, /*outputs_are_probabilities=*/true);
  const Eigen::VectorXd y = remote.logits(Eigen::VectorXd::Constant(3, 0.5));
  CHECK(y[0] == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(y[1] == doctest::Approx(std::log(0.75)).epsilon(1e-12));
  server.stop();
}

TEST_CASE("wrong response id fails immediately") {
  OneShotServer bad("{\"id\":999999999,\"logits\":[[1.0]]}\n");
  Endpoint ep;
  ep.port = bad.port();
  RemoteOptions opts;
  opts.timeout_ms = 2000;
  opts.max_attempts = 1;
  std::vector<Eigen::VectorXd> inputs{Eigen::VectorXd::Constant(1, 0.5)};
  CHECK_THROWS_AS(remote_classify(ep, inputs, opts), std::runtime_error);
}

TEST_CASE("malformed json response fails immediately") {
  OneShotServer bad("this is not json\n");
  Endpoint ep;
  ep.port = bad.port();
  RemoteOptions opts;
  opts.timeout_ms = 2000;
  opts.max_attempts = 1;
  std::vector<Eigen::VectorXd> inputs{Eigen::VectorXd::Constant(1, 0.5)};
  CHECK_THROWS_AS(remote_classify(ep, inputs, opts), std::runtime_error);
}

TEST_CASE("row-count mismatches and non-finite values are rejected") {
  {
    OneShotServer bad("{\"id\":%ID%,\"logits\":[[1.0],[2.0]]}\n");  // 2 rows for 1 input
    Endpoint ep;
    ep.port = bad.port();
    RemoteOptions opts;
    opts.timeout_ms = 2000;
    opts.max_attempts = 1;
    std::vector<Eigen::VectorXd> inputs{Eigen::VectorXd::Constant(1, 0.5)};
    CHECK_THROWS_AS(remote_classify(ep, inputs, opts), std::runtime_error);
  }
  {
    OneShotServer bad("{\"id\":%ID%,\"logits\":[[null]]}\n");
    Endpoint ep;
    ep.port = bad.port();
    RemoteOptions opts;
    opts.timeout_ms = 2000;
    opts.max_attempts = 1;
    std::vector<Eigen::VectorXd> inputs{Eigen::VectorXd::Constant(1, 0.5)};
    CHECK_THROWS_AS(remote_classify(ep, inputs, opts), std::runtime_error);
  }
}

TEST_CASE("connection refused retries then surfaces a transport error") {
  Endpoint ep;
  ep.port = 1;  // privileged port nothing listens on
  RemoteOptions opts;
  opts.timeout_ms = 500;
  opts.max_attempts = 2;
  std::vector<Eigen::VectorXd> inputs{Eigen::VectorXd::Constant(1, 0.5)};
  CHECK_THROWS_AS(remote_classify(ep, inputs, opts), std::runtime_error);
}

TEST_CASE("the server answers a malformed request with an error and keeps serving") {
  NdjsonServer server(0, echo_handler());
  server.start();

  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(server.port()));
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  const std::string junk = "{\"bogus\": 1}\n";
  REQUIRE(::send(fd, junk.data(), junk.size(), MSG_NOSIGNAL) == static_cast<ssize_t>(junk.size()));
  std::string line;
  char buf[4096];
  while (line.find('\n') == std::string::npos) {
    const ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    REQUIRE(n > 0);
    line.append(buf, static_cast<std::size_t>(n));
  }
  CHECK(line.find("error") != std::string::npos);
  ::close(fd);

  // A well-formed request still succeeds afterwards.
  Endpoint ep;
  ep.port = server.port();
  std::vector<Eigen::VectorXd> inputs{Eigen::VectorXd::Constant(2, 0.5)};
  const std::vector<Eigen::VectorXd> out = remote_classify(ep, inputs);
  REQUIRE(out.size() == 1);
  CHECK(out[0][0] == doctest::Approx(0.5));
  server.stop();
}
