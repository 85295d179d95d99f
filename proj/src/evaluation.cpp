#include "banff/evaluation.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "banff/errors.hpp"

namespace banff {

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t t = 0;
    for (int i = 0; i < 4; ++i) t += cells[i][i];
    return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.indicator != indicator) throw std::invalid_argument("merging matrices of different indicators");
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) cells[r][c] += other.cells[r][c];
    }
    n_sections += other.n_sections;
    excluded += other.excluded;
    return *this;
}

ConfusionMatrix ConfusionMatrix::transposed() const {
    ConfusionMatrix t = *this;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) t.cells[r][c] = cells[c][r];
    }
    return t;
}

ConfusionMatrix accumulate(std::span<const GradePair> pairs, Indicator indicator) {
    ConfusionMatrix cm;
    cm.indicator = indicator;
    for (const GradePair& p : pairs) {
        if (!p.predicted || !p.expert) {
            ++cm.excluded;
            continue;
        }
        ++cm.cells[p.expert->value()][p.predicted->value()];
        ++cm.n_sections;
    }
    return cm;
}

AgreementSummary summarize(const ConfusionMatrix& cm) {
    if (cm.n_sections == 0) {
        throw EmptyMatrix("confusion matrix for " + std::string(indicator_name(cm.indicator)) +
                          " holds no sections");
    }
    const double n = static_cast<double>(cm.n_sections);
    std::array<double, 4> rows{};
    std::array<double, 4> cols{};
    std::int64_t near = 0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            rows[r] += static_cast<double>(cm.cells[r][c]);
            cols[c] += static_cast<double>(cm.cells[r][c]);
            if (std::abs(r - c) <= 1) near += cm.cells[r][c];
        }
    }

    AgreementSummary s;
    s.exact_agreement = static_cast<double>(cm.trace()) / n;
    s.within_one_agreement = static_cast<double>(near) / n;

    double observed = 0.0;
    double expected = 0.0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const double w = static_cast<double>((r - c) * (r - c)) / 9.0;
            observed += w * static_cast<double>(cm.cells[r][c]);
            expected += w * rows[r] * cols[c] / n;
        }
    }
    s.quadratic_weighted_kappa = expected == 0.0 ? 1.0 : 1.0 - observed / expected;

    for (int g = 0; g < 4; ++g) {
        if (rows[g] > 0.0) s.per_grade_recall[g] = static_cast<double>(cm.cells[g][g]) / rows[g];
    }
    return s;
}

std::string confusion_csv(const ConfusionMatrix& cm, const std::map<std::string, std::string>& provenance) {
    std::ostringstream out;
    out << "# indicator: " << indicator_name(cm.indicator) << "\n";
    out << "# rows: expert grade; columns: predicted grade\n";
    for (const auto& [k, v] : provenance) out << "# " << k << ": " << v << "\n";
    out << "expert\\predicted,0,1,2,3\n";
    for (int r = 0; r < 4; ++r) {
        out << r;
        for (int c = 0; c < 4; ++c) out << "," << cm.cells[r][c];
        out << "\n";
    }
    out << "excluded," << cm.excluded << "\n";
    return out.str();
}

}  // namespace banff
