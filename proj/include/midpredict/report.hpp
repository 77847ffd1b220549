#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace midpredict {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Reproducibility stamp carried by every emitted report.
struct Provenance {
    std::uint64_t seed = 0;
    std::string input_digest;
};

// "# midpredict 0.1.0 seed=7 input_sha256=ab12..."
std::string stamp_line(const Provenance& p, std::string_view comment = "# ");

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
// Fixed-precision text for human-facing tables.
std::string format_fixed(double v, int digits);

}  // namespace midpredict
