// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "json.hpp"
#include "ddi/nn/adam.hpp"
#include "ddi/nn/parameter.hpp"

namespace ddi::nn {

//! Binary layout: 8-byte magic "DDICKPT1", little-endian uint64 header size,
//! UTF-8 JSON header, then float32 arrays in header order. The header holds
//! caller metadata under "meta" and an index of arrays under "tensors".
struct CheckpointData {
  nlohmann::json meta = nlohmann::json::object();
  std::map<std::string, Matrix<float>> tensors;
};

void writeCheckpoint(const std::string& path, const CheckpointData& data);
CheckpointData readCheckpoint(const std::string& path);

//! Copies parameters, buffers and optimizer moments into named tensors
//! ("param/", "buffer/", "adam.m/", "adam.v/" prefixes).
template <typename T>
void storeState(CheckpointData& data, const ParameterList<T>& params, const BufferList<T>& buffers,
                const Adam<T>* optimizer);

//! Inverse of storeState; throws kDataError on missing or mis-shaped arrays.
template <typename T>
void loadState(const CheckpointData& data, const ParameterList<T>& params, const BufferList<T>& buffers,
               Adam<T>* optimizer);

}  // namespace ddi::nn
