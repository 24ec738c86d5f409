#include <doctest.h>

#include "traderbench/agents.hpp"
#include "traderbench/error.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/indicators.hpp"

using namespace traderbench;
using namespace traderbench::agents;

namespace {

CandleSeries from_closes(const std::vector<double>& closes) {
    std::vector<Candle> cs;
    for (std::size_t i = 0; i < closes.size(); ++i)
        cs.push_back({Timestamp(i) * 60, closes[i], closes[i], closes[i], closes[i], 1});
    return CandleSeries("A", 60, cs);
}

// Replays an agent bar by bar and returns the indices where it ordered.
std::vector<std::size_t> signals(const Agent& a, const CandleSeries& s, Portfolio pf) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto d = a.decide(std::span(s.candles()).first(i + 1), pf);
        if (!d.orders.empty()) out.push_back(i);
    }
    return out;
}

}  // namespace

TEST_CASE("factory") {
    CHECK(agent_names().size() == 5);
    for (const auto& n : agent_names()) CHECK(make_agent({n, {}}).name == n);
    CHECK_THROWS_AS(make_agent({"oracle", {}}), Error);
    CHECK_THROWS_AS(make_agent({"ma_cross", {{"fast", 30}, {"slow", 10}}}), Error);
    CHECK_THROWS_AS(make_agent({"rsi", {{"low", 70}, {"high", 30}}}), Error);
    CHECK_THROWS_AS(make_agent({"rsi", {{"lo", 20}}}), Error);
    CHECK_THROWS_AS(make_agent({"ma_cross", {{"fast", 2.5}}}), Error);
    const auto a = make_agent({"ma_cross", {{"fast", 5}}});
    CHECK(a.params.at("fast") == 5);
    CHECK(a.params.at("slow") == 30);
}

TEST_CASE("inert never trades and buyhold buys exactly once") {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.vol = 0.02;
    const auto s = generate_fixture(spec);
    CHECK(signals(make_agent({"inert", {}}), s, {1000, 0}).empty());
    const auto bh = make_agent({"buyhold", {}});
    CHECK(bh.decide(std::span(s.candles()).first(1), {1000, 0}).orders.size() == 1);
    CHECK(bh.decide(std::span(s.candles()).first(1), {0, 5}).orders.empty());
}

TEST_CASE("ma_cross fires on crossings only") {
    // Down then up: one upward cross after the turn.
    std::vector<double> c;
    for (int i = 0; i < 60; ++i) c.push_back(200 - i);
    for (int i = 0; i < 60; ++i) c.push_back(141 + 2 * i);
    const auto s = from_closes(c);
    const auto a = make_agent({"ma_cross", {}});
    const auto flat = signals(a, s, {1000, 0});
    REQUIRE(flat.size() == 1);
    const auto fast = indicators::sma(c, 10);
    const auto slow = indicators::sma(c, 30);
    const std::size_t i = flat[0];
    CHECK(fast[i - 9] > slow[i - 29]);
    CHECK(fast[i - 10] <= slow[i - 30]);
    CHECK(a.decide(std::span(s.candles()).first(i + 1), {1000, 0}).orders[0].side == sim::Side::Buy);
    // A long holder on a falling series sells at the first defined bar, where
    // the regime starts below.
    const auto longs = signals(a, from_closes(std::vector<double>(c.begin(), c.begin() + 60)), {0, 1});
    CHECK(longs == std::vector<std::size_t>{29});
}

TEST_CASE("rsi agent thresholds") {
    std::vector<double> c;
    for (int i = 0; i < 30; ++i) c.push_back(100 - i);  // oversold
    for (int i = 0; i < 10; ++i) c.push_back(71 + 3 * i);  // rebound
    const auto s = from_closes(c);
    const auto sig = signals(make_agent({"rsi", {}}), s, {1000, 0});
    REQUIRE(!sig.empty());
    const auto r = indicators::rsi(c, 14);
    const std::size_t i = sig[0];
    CHECK(r[i - 14] >= 30);
    CHECK(r[i - 15] < 30);
}

TEST_CASE("macd agent enters on a histogram turn") {
    std::vector<double> c;
    for (int i = 0; i < 80; ++i) c.push_back(200 - i);
    for (int i = 0; i < 40; ++i) c.push_back(121 + i);
    const auto sig = signals(make_agent({"macd", {}}), from_closes(c), {1000, 0});
    REQUIRE(!sig.empty());
    CHECK(sig[0] >= 80);
}

TEST_CASE("decisions never depend on bars past the window") {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.vol = 0.02;
    const auto s = generate_fixture(spec);
    spec.seed = 99;
    const auto other = generate_fixture(spec);
    for (const auto& n : agent_names()) {
        const auto a = make_agent({n, {}});
        for (std::size_t i = 0; i + 1 < s.size(); i += 7) {
            // Same prefix, different future.
            auto spliced = s.candles();
            for (std::size_t k = i + 1; k < spliced.size(); ++k) spliced[k] = other[k];
            const auto d1 = a.decide(std::span(s.candles()).first(i + 1), {1000, 0});
            const auto d2 = a.decide(std::span<const Candle>(spliced).first(i + 1), {1000, 0});
            CHECK(d1.orders == d2.orders);
        }
    }
}
