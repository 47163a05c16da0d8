#ifndef BENCHBIAS_HASH_HPP
#define BENCHBIAS_HASH_HPP

#include <string>
#include <string_view>

namespace benchbias {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace benchbias

#endif  // BENCHBIAS_HASH_HPP
