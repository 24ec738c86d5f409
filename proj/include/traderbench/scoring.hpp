#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traderbench/riskmetrics.hpp"
#include "traderbench/transforms.hpp"

namespace traderbench::scoring {

enum class Section { KnowledgeRetrieval, AnalyticalReasoning, Options, Crypto };

inline constexpr Section kAllSections[] = {Section::KnowledgeRetrieval, Section::AnalyticalReasoning,
                                          Section::Options, Section::Crypto};

std::string_view section_name(Section s) noexcept;
std::optional<Section> parse_section(std::string_view s) noexcept;

/// Mean of normalized task scores for one section. A section with no tasks
/// is inactive and carries no weight.
struct SectionScore {
    Section section = Section::Crypto;
    double score = 0.0;
    std::size_t task_count = 0;
    std::map<std::string, double> breakdown;

    bool active() const noexcept { return task_count > 0; }
    bool operator==(const SectionScore&) const = default;
};

struct OverallScore {
    std::vector<SectionScore> sections;
    std::map<std::string, double> weights;  // active sections only
    double overall = 0.0;

    bool operator==(const OverallScore&) const = default;
};

// Crypto metric weights and transform weights.
inline constexpr double kReturnWeight = 0.35;
inline constexpr double kSharpeWeight = 0.30;
inline constexpr double kWinRateWeight = 0.20;
inline constexpr double kDrawdownWeight = 0.15;

inline constexpr double kBaselineWeight = 0.40;
inline constexpr double kNoisyWeight = 0.30;
inline constexpr double kAdversarialWeight = 0.20;
inline constexpr double kMetaWeight = 0.10;

inline constexpr double kSectionWeight = 0.25;

/// Component maps onto [0, 100].
double return_component(double total_return) noexcept;
double sharpe_component(std::optional<double> sharpe) noexcept;
double win_rate_component(std::optional<double> win_rate) noexcept;
double drawdown_component(double max_drawdown) noexcept;

double crypto_condition_score(const risk::RiskReport& report) noexcept;

using ConditionScores = std::map<transforms::TransformKind, double>;

/// Throws MissingCondition unless all four kinds are present.
double crypto_section_score(const ConditionScores& per_condition);

struct OptionsSubScores {
    double pnl = 0.0;
    double strategy = 0.0;
    double greeks = 0.0;
    double risk = 0.0;
};

double options_section_score(const OptionsSubScores& subs);

/// Equal weights over active sections, renormalized to sum to one.
OverallScore overall(std::vector<SectionScore> sections);

/// clamp(100 (raw - lo) / (hi - lo), 0, 100). Throws DegenerateRange if lo >= hi.
double normalize(double raw, double lo, double hi);

/// Mean of task scores; empty input gives an inactive section.
SectionScore section_from_tasks(Section section, std::span<const double> task_scores);

/// Round half away from zero to one decimal place; used only when rendering.
double round1(double v) noexcept;

}  // namespace traderbench::scoring
