#include <doctest.h>

#include <cmath>

#include "traderbench/error.hpp"
#include "traderbench/scoring.hpp"

using namespace traderbench;
using namespace traderbench::scoring;
using transforms::TransformKind;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Internal;
}

SectionScore active(Section s, double score) { return {s, score, 1, {}}; }

}  // namespace

TEST_CASE("section names") {
    for (auto s : kAllSections) CHECK(parse_section(section_name(s)) == s);
    CHECK(section_name(Section::Crypto) == "crypto");
}

TEST_CASE("component maps") {
    CHECK(return_component(0.0) == 50);
    CHECK(return_component(0.1) == doctest::Approx(75));
    CHECK(return_component(0.5) == 100);
    CHECK(return_component(-0.3) == 0);
    CHECK(sharpe_component(std::nullopt) == 0);
    CHECK(sharpe_component(1.0) == doctest::Approx(75));
    CHECK(sharpe_component(-3.0) == 0);
    CHECK(win_rate_component(std::nullopt) == 0);
    CHECK(win_rate_component(0.6) == doctest::Approx(60));
    CHECK(drawdown_component(0.0) == 100);
    CHECK(drawdown_component(0.1) == doctest::Approx(80));
    CHECK(drawdown_component(0.9) == 0);
}

TEST_CASE("condition score weights") {
    risk::RiskReport r;
    r.total_return = 0.0;  // 50
    r.sharpe = std::nullopt;  // 0
    r.win_rate = std::nullopt;  // 0
    r.max_drawdown = 0.0;  // 100
    CHECK(crypto_condition_score(r) == doctest::Approx(0.35 * 50 + 0.15 * 100));
    r.sharpe = 2.0;
    r.win_rate = 1.0;
    CHECK(crypto_condition_score(r) == doctest::Approx(0.35 * 50 + 0.30 * 100 + 0.20 * 100 + 0.15 * 100));
}

TEST_CASE("crypto section score") {
    const ConditionScores s{{TransformKind::Baseline, 43.1},
                            {TransformKind::Noisy, 42.7},
                            {TransformKind::Meta, 50.1},
                            {TransformKind::Adversarial, 49.1}};
    CHECK(crypto_section_score(s) == doctest::Approx(0.4 * 43.1 + 0.3 * 42.7 + 0.2 * 49.1 + 0.1 * 50.1));
    CHECK(round1(crypto_section_score(s)) == doctest::Approx(44.9));
    auto missing = s;
    missing.erase(TransformKind::Meta);
    CHECK(code_of([&] { crypto_section_score(missing); }) == ErrorCode::MissingCondition);
}

TEST_CASE("options section score") {
    CHECK(options_section_score({88.9, 75.0, 53.3, 71.7}) == doctest::Approx(72.225));
    CHECK(round1(options_section_score({88.9, 75.0, 53.3, 71.7})) == doctest::Approx(72.2));
}

TEST_CASE("overall renormalizes over active sections") {
    std::vector<SectionScore> all{active(Section::KnowledgeRetrieval, 50.6),
                                  active(Section::AnalyticalReasoning, 87.3),
                                  active(Section::Options, 62.1), active(Section::Crypto, 47.4)};
    const auto o = overall(all);
    CHECK(o.overall == doctest::Approx(61.85));
    CHECK(o.weights.size() == 4);
    for (const auto& [_, w] : o.weights) CHECK(w == 0.25);

    std::vector<SectionScore> two{active(Section::Options, 60), active(Section::Crypto, 40),
                                  {Section::KnowledgeRetrieval, 0, 0, {}}};
    const auto p = overall(two);
    CHECK(p.overall == doctest::Approx(50));
    CHECK(p.weights.size() == 2);
    CHECK(p.weights.at("options") == 0.5);

    CHECK(code_of([] { overall({}); }) == ErrorCode::NoActiveSections);
    CHECK(code_of([] { overall({{Section::Crypto, 10, 0, {}}}); }) == ErrorCode::NoActiveSections);
}

TEST_CASE("overall is invariant to input order") {
    std::vector<SectionScore> a{active(Section::Crypto, 33.3), active(Section::Options, 61.0),
                                active(Section::KnowledgeRetrieval, 38.9)};
    std::vector<SectionScore> b{a[2], a[0], a[1]};
    CHECK(overall(a).overall == overall(b).overall);
}

TEST_CASE("normalize and section_from_tasks") {
    CHECK(normalize(5, 0, 10) == 50);
    CHECK(normalize(-1, 0, 10) == 0);
    CHECK(normalize(11, 0, 10) == 100);
    CHECK(code_of([] { normalize(1, 2, 2); }) == ErrorCode::DegenerateRange);
    const std::vector<double> t{10, 20, 60};
    const auto s = section_from_tasks(Section::Options, t);
    CHECK(s.score == doctest::Approx(30));
    CHECK(s.task_count == 3);
    CHECK_FALSE(section_from_tasks(Section::Options, {}).active());
}

TEST_CASE("round1 is half away from zero") {
    CHECK(round1(44.88) == doctest::Approx(44.9));
    CHECK(round1(72.25) == doctest::Approx(72.3));
    CHECK(round1(61.85) == doctest::Approx(61.9));
    CHECK(round1(-0.05) == doctest::Approx(-0.1));
    CHECK(round1(3.04) == doctest::Approx(3.0));
}
