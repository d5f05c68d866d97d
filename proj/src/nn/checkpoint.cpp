// SPDX-License-Identifier: Apache-2.0
#include "ddi/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ddi/common/error.hpp"

namespace ddi::nn {

namespace {

constexpr char kMagic[8] = {'D', 'D', 'I', 'C', 'K', 'P', 'T', '1'};

void putU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t getU64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

void writeCheckpoint(const std::string& path, const CheckpointData& data) {
  nlohmann::json header;
  header["meta"] = data.meta;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, m] : data.tensors) {
    header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(m.size()) * sizeof(float);
  }
  const std::string text = header.dump();
  std::string blob(kMagic, kMagic + 8);
  putU64(blob, text.size());
  blob += text;
  for (const auto& [name, m] : data.tensors) {
    blob.append(reinterpret_cast<const char*>(m.data()), static_cast<std::size_t>(m.size()) * sizeof(float));
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write checkpoint " + path);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

CheckpointData readCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read checkpoint " + path);
  const std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (blob.size() < 16 || std::memcmp(blob.data(), kMagic, 8) != 0) {
    fail(ErrorCode::kDataError, path + " is not a checkpoint");
  }
  const std::uint64_t header_size = getU64(blob, 8);
  if (16 + header_size > blob.size()) fail(ErrorCode::kDataError, path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(16, header_size));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kDataError, path + ": bad header: " + e.what());
  }
  CheckpointData data;
  data.meta = header.at("meta");
  const std::size_t base = 16 + header_size;
  for (const auto& t : header.at("tensors")) {
    const auto rows = t.at("rows").get<Eigen::Index>();
    const auto cols = t.at("cols").get<Eigen::Index>();
    const auto offset = t.at("offset").get<std::uint64_t>();
    const std::size_t bytes = static_cast<std::size_t>(rows * cols) * sizeof(float);
    if (base + offset + bytes > blob.size()) fail(ErrorCode::kDataError, path + ": truncated tensor data");
    Matrix<float> m(rows, cols);
    std::memcpy(m.data(), blob.data() + base + offset, bytes);
    data.tensors.emplace(t.at("name").get<std::string>(), std::move(m));
  }
  return data;
}

template <typename T>
void storeState(CheckpointData& data, const ParameterList<T>& params, const BufferList<T>& buffers,
                const Adam<T>* optimizer) {
  for (const auto* p : params) data.tensors["param/" + p->name] = p->value.template cast<float>();
  for (const auto* b : buffers) data.tensors["buffer/" + b->name] = b->value.template cast<float>();
  if (optimizer) {
    for (const auto& [name, s] : optimizer->state()) {
      data.tensors["adam.m/" + name] = s.m.template cast<float>();
      data.tensors["adam.v/" + name] = s.v.template cast<float>();
    }
    data.meta["adam_steps"] = optimizer->steps();
  }
}

namespace {

template <typename T>
void assign(const CheckpointData& data, const std::string& key, Matrix<T>& target) {
  const auto it = data.tensors.find(key);
  if (it == data.tensors.end()) fail(ErrorCode::kDataError, "checkpoint lacks " + key);
  if (it->second.rows() != target.rows() || it->second.cols() != target.cols()) {
    fail(ErrorCode::kDataError, "checkpoint array " + key + " has shape " + std::to_string(it->second.rows()) + "x" +
                                    std::to_string(it->second.cols()) + ", model expects " +
                                    std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
  }
  target = it->second.template cast<T>();
}

}  // namespace

template <typename T>
void loadState(const CheckpointData& data, const ParameterList<T>& params, const BufferList<T>& buffers,
               Adam<T>* optimizer) {
  for (auto* p : params) assign(data, "param/" + p->name, p->value);
  for (auto* b : buffers) assign(data, "buffer/" + b->name, b->value);
  if (optimizer) {
    optimizer->state().clear();
    for (const auto& [key, m] : data.tensors) {
      if (key.rfind("adam.m/", 0) != 0) continue;
      const std::string name = key.substr(7);
      auto& s = optimizer->state()[name];
      s.m = m.template cast<T>();
      const auto v = data.tensors.find("adam.v/" + name);
      if (v == data.tensors.end()) fail(ErrorCode::kDataError, "checkpoint lacks adam.v/" + name);
      s.v = v->second.template cast<T>();
    }
    optimizer->setSteps(data.meta.value("adam_steps", std::int64_t{0}));
  }
}

template void storeState(CheckpointData&, const ParameterList<float>&, const BufferList<float>&, const Adam<float>*);
template void storeState(CheckpointData&, const ParameterList<double>&, const BufferList<double>&,
                         const Adam<double>*);
template void loadState(const CheckpointData&, const ParameterList<float>&, const BufferList<float>&, Adam<float>*);
template void loadState(const CheckpointData&, const ParameterList<double>&, const BufferList<double>&,
                        Adam<double>*);

}  // namespace ddi::nn
