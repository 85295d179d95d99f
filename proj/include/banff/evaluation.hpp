#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "banff/grade.hpp"

namespace banff {

/// Rows are expert grades, columns predicted grades.
struct ConfusionMatrix {
    Indicator indicator = Indicator::G;
    std::array<std::array<std::int64_t, 4>, 4> cells{};
    std::int64_t n_sections = 0;
    /// Pairs dropped because a side was unscorable or absent.
    std::int64_t excluded = 0;

    std::int64_t trace() const;
    /// Cellwise sum; both matrices must describe the same indicator.
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    ConfusionMatrix transposed() const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct GradePair {
    std::optional<BanffGrade> predicted;  ///< empty: unscorable
    std::optional<BanffGrade> expert;     ///< empty: no annotation
};

ConfusionMatrix accumulate(std::span<const GradePair> pairs, Indicator indicator);

struct AgreementSummary {
    double exact_agreement = 0.0;
    double within_one_agreement = 0.0;
    double quadratic_weighted_kappa = 0.0;
    /// diagonal / row sum; empty for grades with no expert cases.
    std::array<std::optional<double>, 4> per_grade_recall{};
};

/// Throws EmptyMatrix when the matrix holds no sections.
///
/// Kappa is 1 - sum(w*O) / sum(w*E) with w = (i-j)^2 / 9 and E the outer product
/// of the marginals over n. When sum(w*E) is zero every case sits in one
/// diagonal cell and kappa is reported as 1.
AgreementSummary summarize(const ConfusionMatrix& cm);

/// One CSV per indicator: comment header lines, a labeled 4x4 grid and an
/// "excluded" footer.
std::string confusion_csv(const ConfusionMatrix& cm,
                          const std::map<std::string, std::string>& provenance = {});

}  // namespace banff
