#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace platoon {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Version string of the hashing backend, for manifests.
std::string crypto_backend_version();

}  // namespace platoon
