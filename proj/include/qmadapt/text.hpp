#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace qmadapt {

inline std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  auto begin = std::find_if_not(s.begin(), s.end(), is_space);
  auto end = std::find_if_not(s.rbegin(), s.rend(), is_space).base();
  return begin < end ? std::string(begin, end) : std::string();
}

/// Trimmed, ASCII-lowercased form used for every name comparison.
inline std::string fold(std::string_view s) {
  std::string out = trim(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct FoldedLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const { return fold(a) < fold(b); }
};

inline bool same_name(std::string_view a, std::string_view b) { return fold(a) == fold(b); }

}  // namespace qmadapt
