#pragma once

#include <optional>
#include <string_view>

namespace robustmv {

/// Which risk measure the tilted measure is applied to.
///   general      V = g/2 (a'(X-mu))^2 - a'X      (alternative mean moves)
///   fixed_mean   V = g/2 (a'(X-mu))^2 - a'mu     (alternative mean pinned to mu)
///   min_variance V = 1/2 (a'(X-mu))^2            (pure risk, gamma ignored)
enum class Variant { general, fixed_mean, min_variance };

enum class Direction { worst, best };

constexpr std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::general: return "general";
    case Variant::fixed_mean: return "fixed-mean";
    case Variant::min_variance: return "min-variance";
  }
  return "general";
}

constexpr std::string_view to_string(Direction d) noexcept {
  return d == Direction::worst ? "worst" : "best";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "general") return Variant::general;
  if (s == "fixed-mean" || s == "fixed_mean") return Variant::fixed_mean;
  if (s == "min-variance" || s == "min_variance") return Variant::min_variance;
  return std::nullopt;
}

inline std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "worst") return Direction::worst;
  if (s == "best") return Direction::best;
  return std::nullopt;
}

constexpr double sign_of(Direction d) noexcept {
  return d == Direction::worst ? 1.0 : -1.0;
}

}  // namespace robustmv
