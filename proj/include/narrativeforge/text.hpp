#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace narrativeforge::text {

std::string trim(std::string_view s);

// Collapses every run of whitespace (including newlines) to one space and trims.
std::string normalize_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

std::size_t word_count(std::string_view s);

// First `n` whitespace-separated words joined by single spaces.
std::string first_words(std::string_view s, std::size_t n);

bool starts_with_icase(std::string_view s, std::string_view prefix);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

std::string hex64(std::uint64_t v);

// Counts non-overlapping occurrences of `needle` in `haystack`.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace narrativeforge::text
