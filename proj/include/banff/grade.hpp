#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace banff {

/// Banff semi-quantitative grade, 0 through 3.
class BanffGrade {
public:
    /// Throws GradeOutOfRange for values outside 0..3.
    explicit BanffGrade(int value);

    int value() const { return value_; }

    friend auto operator<=>(const BanffGrade&, const BanffGrade&) = default;

private:
    int value_;
};

enum class Indicator { G, Ptc, V };

inline constexpr Indicator kIndicators[] = {Indicator::G, Indicator::Ptc, Indicator::V};

std::string_view indicator_name(Indicator indicator);
std::optional<Indicator> indicator_from_name(std::string_view name);

}  // namespace banff
