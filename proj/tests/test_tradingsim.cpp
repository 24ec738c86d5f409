#include <doctest.h>

#include <deque>

#include "traderbench/error.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/rng.hpp"
#include "traderbench/tradingsim.hpp"

using namespace traderbench;
using namespace traderbench::sim;

namespace {

CandleSeries bars(std::vector<std::pair<double, double>> open_close) {
    std::vector<Candle> cs;
    Timestamp t = 0;
    for (auto [o, c] : open_close) {
        cs.push_back({t, o, std::max(o, c), std::min(o, c), c, 10});
        t += 3600;
    }
    return CandleSeries("X", 3600, cs);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Internal;
}

// Independent FIFO matcher over the fill log.
std::vector<double> fifo_pnls(const std::vector<Fill>& fills) {
    std::deque<std::pair<double, double>> lots;  // signed qty, price
    std::vector<double> out;
    for (const auto& f : fills) {
        double q = f.side == Side::Buy ? f.quantity : -f.quantity;
        while (q != 0 && !lots.empty() && (lots.front().first > 0) != (q > 0)) {
            auto& [lq, lp] = lots.front();
            const double take = std::min(std::abs(lq), std::abs(q));
            out.push_back(lq > 0 ? (f.price - lp) * take : (lp - f.price) * take);
            lq += lq > 0 ? -take : take;
            q += q > 0 ? -take : take;
            if (std::abs(lq) < 1e-12 * take) lots.pop_front();
            if (std::abs(q) < 1e-12 * take) q = 0;
        }
        if (q != 0) lots.emplace_back(q, f.price);
    }
    return out;
}

}  // namespace

TEST_CASE("construction errors") {
    const auto s = bars({{100, 100}, {100, 100}});
    CHECK(code_of([&] { new_sim(s, 0, 10); }) == ErrorCode::InvalidCash);
    CHECK(code_of([&] { new_sim(s, -5, 10); }) == ErrorCode::InvalidCash);
    CHECK(code_of([&] { new_sim(s, 100, -1); }) == ErrorCode::InvalidInput);
    CHECK(code_of([&] { new_sim(bars({{1, 1}}), 100, 0); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("fills at the next open with adverse slippage") {
    auto sim = new_sim(bars({{100, 101}, {102, 104}, {105, 103}}), 10'000, 10);
    sim.submit({Side::Buy, 10, 0});
    sim.step();
    REQUIRE(sim.fills().size() == 1);
    CHECK(sim.fills()[0].price == doctest::Approx(102 * 1.001));
    CHECK(sim.fills()[0].reference == 102);
    CHECK(sim.cash() == doctest::Approx(10'000 - 10 * 102 * 1.001));
    CHECK(sim.equity() == doctest::Approx(sim.cash() + 10 * 104));
    sim.submit({Side::Sell, 10, sim.clock()});
    CHECK(sim.step());
    CHECK(sim.fills()[1].price == doctest::Approx(105 * 0.999));
    REQUIRE(sim.closed_trades().size() == 1);
    CHECK(sim.closed_trades()[0].pnl == doctest::Approx(10 * (105 * 0.999 - 102 * 1.001)));
    CHECK(sim.total_slippage() == doctest::Approx(10 * 102 * 0.001 + 10 * 105 * 0.001));
    CHECK(code_of([&] { sim.submit({Side::Buy, 1, 0}); }) == ErrorCode::SimFinished);
    CHECK(sim.step());
}

TEST_CASE("rejections") {
    auto sim = new_sim(bars({{100, 100}, {100, 100}, {100, 100}}), 1'000, 0);
    sim.submit({Side::Buy, 11, 0});
    sim.submit({Side::Sell, 1, 0});
    sim.step();
    REQUIRE(sim.rejections().size() == 2);
    CHECK(sim.rejections()[0].reason == ErrorCode::InsufficientCash);
    CHECK(sim.rejections()[1].reason == ErrorCode::InsufficientPosition);
    CHECK(sim.cash() == 1'000);
    sim.submit(Order::sell_all(sim.clock()));
    sim.step();
    CHECK(sim.rejections().back().reason == ErrorCode::InsufficientPosition);
    CHECK(code_of([&] { new_sim(bars({{1, 1}, {1, 1}}), 1, 0).submit({Side::Buy, 0, 0}); }) ==
          ErrorCode::InvalidInput);
}

TEST_CASE("all-in orders") {
    auto sim = new_sim(bars({{100, 100}, {200, 210}, {220, 230}}), 1'000, 25);
    sim.submit(Order::buy_all(0));
    sim.step();
    CHECK(sim.cash() == 0.0);
    CHECK(sim.position() == doctest::Approx(1'000 / (200 * 1.0025)));
    sim.submit(Order::sell_all(sim.clock()));
    sim.step();
    CHECK(sim.position() == 0.0);
    CHECK(sim.cash() == doctest::Approx(1'000 / (200 * 1.0025) * 220 * 0.9975));
    CHECK(sim.closed_trades().size() == 1);
}

TEST_CASE("zero slippage buy and sell at the same open is flat") {
    auto sim = new_sim(bars({{100, 100}, {100, 100}, {100, 100}}), 500, 0);
    sim.submit({Side::Buy, 2, 0});
    sim.submit({Side::Sell, 2, 0});
    sim.step();
    CHECK(sim.cash() == 500);
    CHECK(sim.closed_trades().at(0).pnl == 0.0);
}

TEST_CASE("conservation and FIFO oracle under random orders") {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.vol = 0.02;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        spec.seed = seed;
        const auto s = generate_fixture(spec);
        auto sim = new_sim(s, 10'000, 7.5);
        Rng rng(seed, "test.orders");
        while (!sim.finished()) {
            const std::size_t k = rng.below(3);
            for (std::size_t j = 0; j < k; ++j) {
                const Side side = rng.bernoulli(0.5) ? Side::Buy : Side::Sell;
                if (rng.bernoulli(0.2))
                    sim.submit(side == Side::Buy ? Order::buy_all(sim.clock()) : Order::sell_all(sim.clock()));
                else
                    sim.submit({side, 1 + 20 * rng.uniform(), sim.clock()});
            }
            sim.step();
            CHECK(sim.cash() >= 0.0);
            CHECK(sim.position() >= -1e-9);
        }
        // Cash ledger: initial - buys + sells.
        double cash = 10'000, pos = 0, slip = 0;
        for (const auto& f : sim.fills()) {
            const double v = f.quantity * f.price;
            cash += f.side == Side::Buy ? -v : v;
            pos += f.side == Side::Buy ? f.quantity : -f.quantity;
            slip += std::abs(f.price - f.reference) * f.quantity;
            CHECK(f.bar >= 1);
            CHECK(f.reference == s[f.bar].open);
        }
        CHECK(sim.cash() == doctest::Approx(cash).epsilon(1e-9).scale(1.0));
        CHECK(sim.position() == doctest::Approx(pos).epsilon(1e-9).scale(1.0));
        CHECK(sim.total_slippage() == doctest::Approx(slip).epsilon(1e-9));
        const auto pnls = fifo_pnls(sim.fills());
        REQUIRE(pnls.size() == sim.closed_trades().size());
        for (std::size_t i = 0; i < pnls.size(); ++i)
            CHECK(sim.closed_trades()[i].pnl == doctest::Approx(pnls[i]).epsilon(1e-12).scale(1.0));
        CHECK(sim.equity_curve().size() == s.size());
    }
}

TEST_CASE("shorts behind the flag") {
    SimState sim(bars({{100, 100}, {100, 90}, {90, 90}}), {1'000, 0, true});
    sim.submit({Side::Sell, 5, 0});
    sim.step();
    CHECK(sim.position() == -5);
    CHECK(sim.cash() == 1'500);
    sim.submit(Order::buy_all(sim.clock()));
    sim.step();
    CHECK(sim.position() == 0);
    REQUIRE(sim.closed_trades().size() == 1);
    CHECK(sim.closed_trades()[0].pnl == 50);
}
