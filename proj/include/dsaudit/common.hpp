#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dsaudit {

// Exit code 1: bad configuration, bad arguments, unusable inputs.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit code 2: malformed or inconsistent data encountered while processing.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// FNV-1a, used for content hashes in manifests and cache keys.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::string& path);
std::string to_hex(std::uint64_t v);

std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

std::string ascii_lower(std::string_view s);

// Fixed-precision decimal formatting for deterministic report files.
std::string format_double(double v, int precision = 12);

}  // namespace dsaudit
