#include "cbopt/broker.hpp"

#include <stdexcept>

namespace cbopt {

BatchResult query_batch(const Classifier& h, const std::vector<ImageTensor>& inputs, QueryLedger& ledger) {
  BatchResult out;
  long long room = ledger.remaining();
  if (room < 0) room = 0;
  const std::size_t take = std::min(inputs.size(), static_cast<std::size_t>(room));
  out.exhausted = take < inputs.size();

  std::vector<Eigen::VectorXd> flat;
  flat.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const ImageTensor& img = inputs[i];
    if ((img.data < -1e-12).any() || (img.data > 1.0 + 1e-12).any()) {
      throw std::invalid_argument("query_batch: input entries must lie in [0,1]");
    }
    flat.push_back(Eigen::VectorXd(img.data.matrix()));
  }
  out.logits = h.logits_batch(flat);
  ledger.used += static_cast<long long>(take);
  return out;
}

}  // namespace cbopt
