// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ddi {

std::string sha256Hex(std::string_view bytes);

//! Content hash in the form git uses for blobs: sha1("blob <len>\0" + content).
std::string gitBlobHash(std::string_view bytes);

std::string gitBlobHashOfFile(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

std::string readFile(const std::filesystem::path& path);

void writeFile(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ddi
