#include "cbopt/tensor.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace cbopt {

ImageTensor clip01(ImageTensor t) {
  t.data = t.data.max(0.0).min(1.0);
  return t;
}

ImageTensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tensor file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("missing tensor header: " + path);
  nlohmann::json j = nlohmann::json::parse(header);
  const auto shape = j.at("shape");
  if (!shape.is_array() || shape.size() != 3) throw std::runtime_error("bad tensor shape: " + path);
  ImageTensor t(shape[0].get<int>(), shape[1].get<int>(), shape[2].get<int>());
  if (t.c <= 0 || t.h <= 0 || t.w <= 0) throw std::runtime_error("bad tensor dims: " + path);
  std::vector<float> buf(static_cast<size_t>(t.size()));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
    throw std::runtime_error("truncated tensor payload: " + path);
  for (int i = 0; i < t.size(); ++i) t.data[i] = static_cast<double>(buf[static_cast<size_t>(i)]);
  return t;
}

void write_tensor(const std::string& path, const ImageTensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write tensor file: " + path);
  nlohmann::json j;
  j["shape"] = {t.c, t.h, t.w};
  out << j.dump() << '\n';
  std::vector<float> buf(static_cast<size_t>(t.size()));
  for (int i = 0; i < t.size(); ++i) buf[static_cast<size_t>(i)] = static_cast<float>(t.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write on tensor file: " + path);
}

}  // namespace cbopt
