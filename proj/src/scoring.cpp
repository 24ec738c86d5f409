#include "traderbench/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "traderbench/error.hpp"

namespace traderbench::scoring {

namespace {

constexpr std::array<std::pair<Section, std::string_view>, 4> kSections{{
    {Section::KnowledgeRetrieval, "knowledge_retrieval"},
    {Section::AnalyticalReasoning, "analytical_reasoning"},
    {Section::Options, "options"},
    {Section::Crypto, "crypto"},
}};

double clamp100(double v) noexcept { return std::clamp(v, 0.0, 100.0); }

}  // namespace

std::string_view section_name(Section s) noexcept {
    for (const auto& [sec, name] : kSections)
        if (sec == s) return name;
    return "unknown";
}

std::optional<Section> parse_section(std::string_view s) noexcept {
    for (const auto& [sec, name] : kSections)
        if (name == s) return sec;
    return std::nullopt;
}

double return_component(double total_return) noexcept { return clamp100(50.0 + 250.0 * total_return); }

double sharpe_component(std::optional<double> sharpe) noexcept {
    return sharpe ? clamp100(50.0 + 25.0 * *sharpe) : 0.0;
}

double win_rate_component(std::optional<double> win_rate) noexcept {
    return win_rate ? clamp100(100.0 * *win_rate) : 0.0;
}

double drawdown_component(double max_drawdown) noexcept { return clamp100(100.0 - 200.0 * max_drawdown); }

double crypto_condition_score(const risk::RiskReport& report) noexcept {
    return kReturnWeight * return_component(report.total_return) +
           kSharpeWeight * sharpe_component(report.sharpe) +
           kWinRateWeight * win_rate_component(report.win_rate) +
           kDrawdownWeight * drawdown_component(report.max_drawdown);
}

double crypto_section_score(const ConditionScores& per_condition) {
    using transforms::TransformKind;
    for (auto kind : transforms::kAllKinds)
        if (!per_condition.contains(kind))
            fail(ErrorCode::MissingCondition,
                 "missing condition: " + std::string(transforms::kind_name(kind)));
    return kBaselineWeight * per_condition.at(TransformKind::Baseline) +
           kNoisyWeight * per_condition.at(TransformKind::Noisy) +
           kAdversarialWeight * per_condition.at(TransformKind::Adversarial) +
           kMetaWeight * per_condition.at(TransformKind::Meta);
}

double options_section_score(const OptionsSubScores& subs) {
    return (subs.pnl + subs.strategy + subs.greeks + subs.risk) / 4.0;
}

OverallScore overall(std::vector<SectionScore> sections) {
    double raw_total = 0.0;
    for (const auto& s : sections)
        if (s.active()) raw_total += kSectionWeight;
    if (raw_total == 0.0) fail(ErrorCode::NoActiveSections, "no section has tasks");
    OverallScore out;
    for (const auto& s : sections) {
        if (!s.active()) continue;
        const double w = kSectionWeight / raw_total;
        out.weights[std::string(section_name(s.section))] = w;
        out.overall += w * s.score;
    }
    out.sections = std::move(sections);
    return out;
}

double normalize(double raw, double lo, double hi) {
    if (!(lo < hi)) fail(ErrorCode::DegenerateRange, "normalize needs lo < hi");
    return clamp100(100.0 * (raw - lo) / (hi - lo));
}

SectionScore section_from_tasks(Section section, std::span<const double> task_scores) {
    SectionScore s;
    s.section = section;
    s.task_count = task_scores.size();
    if (task_scores.empty()) return s;
    double sum = 0.0;
    for (double v : task_scores) sum += v;
    s.score = sum / static_cast<double>(task_scores.size());
    return s;
}

double round1(double v) noexcept {
    // Nudge by a relative epsilon so exact decimal ties (62.65) round up
    // rather than falling on whichever side of the tie the binary value lands.
    const double scaled = v * 10.0;
    return std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::abs(scaled)), scaled)) / 10.0;
}

}  // namespace traderbench::scoring
