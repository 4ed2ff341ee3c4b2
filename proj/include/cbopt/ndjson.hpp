#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "cbopt/classifier.hpp"

namespace cbopt {

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;
};

// "host:port"; a bare port means localhost.
Endpoint parse_endpoint(const std::string& s);

struct RemoteOptions {
  int timeout_ms = 30000;
  int max_attempts = 3;  // transport failures only; protocol violations never retry
  int chunk = 64;        // inputs per request
};

// One request per chunk of <= opts.chunk inputs, sent as
//   {"id": <u64>, "inputs": [[...], ...]}\n
// and answered by {"id": <u64>, "logits": [[...], ...]}\n with the same id
// and one logit row per input, in order. Chunk results are concatenated.
// Transport failures (connect/read/write/timeout) retry with a fresh
// connection up to opts.max_attempts; malformed responses, id mismatches,
// non-finite numbers, and row-count mismatches fail immediately.
std::vector<Eigen::VectorXd> remote_classify(const Endpoint& endpoint,
                                             const std::vector<Eigen::VectorXd>& inputs,
                                             const RemoteOptions& opts = {});

// Line-oriented request/response server for the protocol above. One client
// at a time; requests on a connection are answered in arrival order.
class NdjsonServer {
 public:
  using Handler =
      std::function<std::vector<std::vector<double>>(const std::vector<std::vector<double>>&)>;

  NdjsonServer(int port, Handler handler);  // port 0 binds an ephemeral port
  ~NdjsonServer();

  int port() const { return port_; }
  void start();          // serve on a background thread
  void serve_forever();  // serve on the calling thread until stop()
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
};

// logits := inputs, the protocol loopback fixture.
NdjsonServer::Handler echo_handler();
// Serves a local classifier over the wire.
NdjsonServer::Handler classifier_handler(const Classifier& h);

class RemoteClassifier : public Classifier {
 public:
  // Remote servers may emit probabilities instead of logits; outputs_log_probs
  // applies a log so the losses keep working on the same scale.
  RemoteClassifier(Endpoint endpoint, int input_dim, int num_classes,
                   bool outputs_are_probabilities = false, RemoteOptions opts = {});

  int input_dim() const override { return input_dim_; }
  int num_classes() const override { return num_classes_; }
  Eigen::VectorXd logits(const Eigen::VectorXd& input) const override;
  std::vector<Eigen::VectorXd> logits_batch(const std::vector<Eigen::VectorXd>& inputs) const override;

 private:
  Endpoint endpoint_;
  int input_dim_, num_classes_;
  bool outputs_are_probabilities_;
  RemoteOptions opts_;
};

}  // namespace cbopt
