#include <doctest.h>

#include <cmath>

#include "traderbench/error.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/marketdata.hpp"
#include "traderbench/rng.hpp"

using namespace traderbench;

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

const char* kDaily =
    "timestamp,open,high,low,close,volume\n"
    "1704067200,100,105,99,104,1000\n"
    "1704153600,104,106,101,102,900.5\n"
    "1704240000,102,103,97.25,98,1200\n";

CandleSeries closes_series(std::vector<double> closes) {
    std::vector<Candle> cs;
    for (std::size_t i = 0; i < closes.size(); ++i)
        cs.push_back({static_cast<Timestamp>(i) * 60, closes[i], closes[i], closes[i], closes[i], 1});
    return CandleSeries("T", 60, cs);
}

}  // namespace

TEST_CASE("parse_candle_csv reads well-formed daily rows") {
    const auto s = parse_candle_csv(kDaily, "BTC");
    CHECK(s.size() == 3);
    CHECK(s.interval_seconds() == 86400);
    CHECK(s.symbol() == "BTC");
    CHECK(s[1].volume == 900.5);
    CHECK(s[2].low == 97.25);
}

TEST_CASE("parse_candle_csv error paths") {
    SUBCASE("high below open") {
        CHECK(code_of([] {
                  parse_candle_csv("timestamp,open,high,low,close,volume\n0,100,99,98,99,1\n60,1,1,1,1,1\n");
              }) == ErrorCode::InvariantViolation);
    }
    SUBCASE("irregular spacing") {
        CHECK(code_of([] {
                  parse_candle_csv(
                      "timestamp,open,high,low,close,volume\n0,1,1,1,1,1\n60,1,1,1,1,1\n180,1,1,1,1,1\n");
              }) == ErrorCode::NonUniformInterval);
    }
    SUBCASE("field count") {
        CHECK(code_of([] { parse_candle_csv("timestamp,open,high,low,close,volume\n0,1,1,1,1\n"); }) ==
              ErrorCode::MalformedRow);
        CHECK(code_of([] { parse_candle_csv("timestamp,open,high,low,close,volume\n0,1,1,1,1,1,1\n"); }) ==
              ErrorCode::MalformedRow);
    }
    SUBCASE("bad number") {
        CHECK(code_of([] { parse_candle_csv("timestamp,open,high,low,close,volume\n0,1,1,x,1,1\n"); }) ==
              ErrorCode::MalformedRow);
        CHECK(code_of([] { parse_candle_csv("timestamp,open,high,low,close,volume\n0,1,1,1,1,1e\n"); }) ==
              ErrorCode::MalformedRow);
    }
    SUBCASE("header") {
        CHECK(code_of([] { parse_candle_csv("ts,o,h,l,c,v\n0,1,1,1,1,1\n"); }) == ErrorCode::MalformedRow);
    }
    SUBCASE("non-positive price and negative volume") {
        CHECK(code_of([] { parse_candle_csv("timestamp,open,high,low,close,volume\n0,1,1,0,1,1\n"); }) ==
              ErrorCode::InvariantViolation);
        CHECK(code_of([] { parse_candle_csv("timestamp,open,high,low,close,volume\n0,1,1,1,1,-1\n"); }) ==
              ErrorCode::InvariantViolation);
    }
}

TEST_CASE("serialize then parse round-trips bit-exactly") {
    const auto original = parse_candle_csv(kDaily, "BTC");
    CHECK(serialize_candle_csv(original) == kDaily);

    // Awkward doubles from a noisy fixture survive the trip unchanged.
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.vol = 0.03;
    spec.length = 300;
    const auto fx = generate_fixture(spec);
    const auto text = serialize_candle_csv(fx);
    const auto back = parse_candle_csv(text, fx.symbol());
    CHECK(back == fx);
    CHECK(serialize_candle_csv(back) == text);
}

TEST_CASE("slice_until") {
    const auto s = parse_candle_csv(kDaily, "BTC");
    CHECK(slice_until(s, s.back().timestamp) == s);
    CHECK(slice_until(s, s.front().timestamp).size() == 1);
    CHECK(code_of([&] { slice_until(s, s.front().timestamp - 1); }) == ErrorCode::EmptyWindow);

    // Between bars k and k+1: linear-scan oracle.
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.vol = 0.01;
    const auto fx = generate_fixture(spec);
    Rng rng(7, "test.slice");
    for (int trial = 0; trial < 200; ++trial) {
        const Timestamp clock = fx.front().timestamp +
                                static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(
                                    fx.back().timestamp - fx.front().timestamp + 1)));
        std::size_t expected = 0;
        for (const auto& c : fx.candles())
            if (c.timestamp <= clock) ++expected;
        const auto sliced = slice_until(fx, clock);
        CHECK(sliced.size() == expected);
        CHECK(slice_until(sliced, clock) == sliced);  // idempotent
    }
}

TEST_CASE("log_returns") {
    CHECK(log_returns(closes_series({100, 100})) == std::vector<double>{0.0});
    CHECK(log_returns(closes_series({100, 100 * std::exp(1.0)}))[0] == doctest::Approx(1.0).epsilon(1e-15));
    const auto r = log_returns(closes_series({100, 110, 99}));
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(std::log(1.1)).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(std::log(0.9)).epsilon(1e-14));
    CHECK(code_of([] { log_returns(closes_series({100})); }) == ErrorCode::TooShort);
}

TEST_CASE("log_returns telescope to the end-to-end log ratio") {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.vol = 0.02;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        spec.seed = seed;
        const auto fx = generate_fixture(spec);
        double sum = 0.0;
        for (double r : log_returns(fx)) sum += r;
        CHECK(sum == doctest::Approx(std::log(fx.back().close / fx.front().close)).epsilon(1e-10));
    }
}
