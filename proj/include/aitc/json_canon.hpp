#pragma once

#include <string>

#include <json.hpp>

namespace aitc {

// Canonical serialization: object keys sorted, floating-point numbers at 17
// significant digits, no whitespace.  Stable across platforms so the
// protocol hashes agree between parties.
std::string canonical_json_dump(const nlohmann::json& j);

// Lowercase hex SHA-256 of the canonical serialization.
std::string canonical_json_sha256(const nlohmann::json& j);

std::string sha256_hex(const std::string& bytes);

}  // namespace aitc
