#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace fareval {

using PageId = std::int64_t;
using TopicId = int;

// Group axes. "Unknown"/"unknown" is index 0 on each axis; the
// intersectional cell index is geography-major: cell = geo * 4 + gender.
inline constexpr int kGeoGroups = 8;
inline constexpr int kKnownGeo = 7;
inline constexpr int kGenderGroups = 4;
inline constexpr int kKnownGender = 3;
inline constexpr int kCells = kGeoGroups * kGenderGroups;  // 32
inline constexpr int kTask1Dims = kCells - 1;              // 31

inline constexpr std::array<std::string_view, kGeoGroups> kGeoLabels = {
    "Unknown",
    "Africa",
    "Antarctica",
    "Asia",
    "Europe",
    "Latin America and the Caribbean",
    "Northern America",
    "Oceania",
};

inline constexpr std::array<std::string_view, kGenderGroups> kGenderLabels = {
    "unknown",
    "female",
    "male",
    "third",
};

enum class Gender : std::uint8_t { Unknown = 0, Female = 1, Male = 2, Third = 3 };

// Article quality labels, ordered from most work needed (Stub) to least (FA).
inline constexpr int kWorkLevels = 6;
inline constexpr std::array<std::string_view, kWorkLevels> kWorkLabels = {
    "Stub", "Start", "C", "B", "GA", "FA",
};

// Attention weight at 1-based rank position: 1 / log2(max(i, 2)).
// Throws std::invalid_argument for positions < 1.
double discount(std::int64_t position);

// Weights for positions 1..n.
std::vector<double> discount_weights(std::size_t n);

// Execution policy for the data-parallel kernels. Both policies produce
// bit-identical results; `Serial` is kept as the reference path for tests
// and benchmarking.
enum class Exec { Serial, Parallel };

}  // namespace fareval
