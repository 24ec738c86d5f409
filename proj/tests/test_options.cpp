#include <doctest.h>

#include <cmath>
#include <limits>

#include "traderbench/error.hpp"
#include "traderbench/options.hpp"
#include "traderbench/rng.hpp"

using namespace traderbench;
using namespace traderbench::options;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

OptionInputs random_inputs(Rng& rng, Right right = Right::Call) {
    OptionInputs in;
    in.spot = 20 + 180 * rng.uniform();
    in.strike = in.spot * std::exp(0.6 * (rng.uniform() - 0.5));
    in.rate = 0.1 * rng.uniform();
    in.vol = 0.05 + 1.0 * rng.uniform();
    in.expiry_years = 0.05 + 2.0 * rng.uniform();
    in.right = right;
    return in;
}

// Price by integrating the discounted payoff against the lognormal density
// (Simpson on z in [-10, 10]). Independent of the closed form.
double quadrature_price(const OptionInputs& in) {
    const int n = 20'000;
    const double a = -10, b = 10, h = (b - a) / n;
    const double s = in.vol * std::sqrt(in.expiry_years);
    const double mu = std::log(in.spot) + (in.rate - 0.5 * in.vol * in.vol) * in.expiry_years;
    double sum = 0;
    for (int i = 0; i <= n; ++i) {
        const double z = a + i * h;
        const double st = std::exp(mu + s * z);
        const double pay = in.right == Right::Call ? std::max(st - in.strike, 0.0) : std::max(in.strike - st, 0.0);
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        sum += w * pay * std::exp(-0.5 * z * z);
    }
    return std::exp(-in.rate * in.expiry_years) * sum * h / 3 / std::sqrt(2 * M_PI);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

TEST_CASE("names") {
    CHECK(parse_right("put") == Right::Put);
    CHECK(parse_position(position_name(Position::Short)) == Position::Short);
    CHECK_FALSE(parse_right("straddle").has_value());
}

TEST_CASE("textbook value") {
    // Hull: S=42, K=40, r=0.1, vol=0.2, T=0.5 -> call 4.76, put 0.81
    OptionInputs in{42, 40, 0.1, 0.2, 0.5, Right::Call};
    CHECK(bs_price(in) == doctest::Approx(4.7594).epsilon(1e-4));
    in.right = Right::Put;
    CHECK(bs_price(in) == doctest::Approx(0.8086).epsilon(1e-3));
}

TEST_CASE("put-call parity on random inputs") {
    Rng rng(1, "test.parity");
    for (int i = 0; i < 1000; ++i) {
        auto in = random_inputs(rng);
        const double c = bs_price(in);
        in.right = Right::Put;
        const double p = bs_price(in);
        CHECK(std::abs(c - p - (in.spot - in.strike * std::exp(-in.rate * in.expiry_years))) <= 1e-9);
    }
}

TEST_CASE("closed form agrees with quadrature") {
    Rng rng(2, "test.quad");
    for (int i = 0; i < 40; ++i) {
        const auto in = random_inputs(rng, i % 2 ? Right::Put : Right::Call);
        CHECK(std::abs(bs_price(in) - quadrature_price(in)) <= 1e-7 * in.spot);
    }
}

TEST_CASE("greeks match central finite differences") {
    Rng rng(3, "test.fd");
    for (int i = 0; i < 300; ++i) {
        auto in = random_inputs(rng, i % 2 ? Right::Put : Right::Call);
        // Stay where every Greek is well away from zero.
        in.strike = in.spot * std::exp(0.4 * (rng.uniform() - 0.5));
        in.vol = std::max(in.vol, 0.1 / std::sqrt(in.expiry_years));
        const auto g = bs_greeks(in);
        auto at = [&](double ds, double dv, double dt) {
            auto x = in;
            x.spot += ds;
            x.vol += dv;
            x.expiry_years += dt;
            return bs_price(x);
        };
        const double hs = 1e-3 * in.spot, hv = 1e-4, ht = 1e-5 * in.expiry_years;
        const double delta = (at(hs, 0, 0) - at(-hs, 0, 0)) / (2 * hs);
        const double gamma = (at(hs, 0, 0) - 2 * at(0, 0, 0) + at(-hs, 0, 0)) / (hs * hs);
        const double vega = (at(0, hv, 0) - at(0, -hv, 0)) / (2 * hv);
        const double theta = -(at(0, 0, ht) - at(0, 0, -ht)) / (2 * ht);
        CHECK(rel_err(g.delta, delta) <= 1e-4);
        CHECK(rel_err(g.gamma, gamma) <= 1e-4);
        CHECK(rel_err(g.vega, vega) <= 1e-4);
        CHECK(rel_err(g.theta, theta) <= 1e-4);
    }
}

TEST_CASE("greek identities") {
    Rng rng(4, "test.id");
    for (int i = 0; i < 200; ++i) {
        auto in = random_inputs(rng);
        const auto c = bs_greeks(in);
        in.right = Right::Put;
        const auto p = bs_greeks(in);
        CHECK(c.delta - p.delta == doctest::Approx(1.0));
        CHECK(c.gamma == p.gamma);
        CHECK(c.vega == p.vega);
        CHECK(c.delta >= 0);
        CHECK(c.delta <= 1);
    }
}

TEST_CASE("zero vol") {
    OptionInputs in{100, 90, 0.05, 0.0, 1.0, Right::Call};
    CHECK(bs_price(in) == doctest::Approx(100 - 90 * std::exp(-0.05)));
    in.right = Right::Put;
    CHECK(bs_price(in) == 0.0);
    try {
        bs_greeks(in);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroVol);
    }
    CHECK_THROWS_AS(bs_price({-1, 90, 0, 0.2, 1, Right::Call}), Error);
}

TEST_CASE("implied vol round-trips") {
    Rng rng(5, "test.iv");
    for (int i = 0; i < 500; ++i) {
        OptionInputs in;
        in.spot = 50 + 100 * rng.uniform();
        in.rate = 0.05 * rng.uniform();
        in.expiry_years = 0.1 + 1.9 * rng.uniform();
        in.vol = 0.01 + 2.99 * rng.uniform();
        in.right = rng.bernoulli(0.5) ? Right::Call : Right::Put;
        const double sd = in.vol * std::sqrt(in.expiry_years);
        in.strike = in.spot * std::exp(in.rate * in.expiry_years) * std::exp(0.5 * sd * (rng.uniform() - 0.5));
        const double iv = implied_vol(bs_price(in), in);
        CHECK(std::abs(iv - in.vol) <= 1e-6);
    }
}

TEST_CASE("implied vol errors") {
    OptionInputs in{100, 100, 0.0, 0.0, 1.0, Right::Call};
    try {
        implied_vol(101, in);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PriceOutOfBounds);
    }
    try {
        implied_vol(99.99, in);  // needs vol far above 5
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
    }
}

TEST_CASE("long straddle") {
    const std::vector<OptionLeg> legs{{Right::Call, Position::Long, 100, 0.25, 1, 4},
                                      {Right::Put, Position::Long, 100, 0.25, 1, 3}};
    const auto p = strategy_pnl(legs);
    REQUIRE(p.breakevens.size() == 2);
    CHECK(p.breakevens[0] == doctest::Approx(93));
    CHECK(p.breakevens[1] == doctest::Approx(107));
    CHECK(p.max_profit == kInf);
    CHECK(p.max_loss == doctest::Approx(7));
}

TEST_CASE("spreads and short calls") {
    SUBCASE("bull call spread") {
        const std::vector<OptionLeg> legs{{Right::Call, Position::Long, 100, 1, 1, 5},
                                          {Right::Call, Position::Short, 110, 1, 1, 2}};
        const auto p = strategy_pnl(legs);
        CHECK(p.max_profit == doctest::Approx(7));
        CHECK(p.max_loss == doctest::Approx(3));
        CHECK(p.breakevens == std::vector<double>{103});
    }
    SUBCASE("naked short call") {
        const std::vector<OptionLeg> legs{{Right::Call, Position::Short, 100, 1, 2, 4}};
        const auto p = strategy_pnl(legs);
        CHECK(p.max_profit == doctest::Approx(8));
        CHECK(p.max_loss == kInf);
        CHECK(p.breakevens == std::vector<double>{104});
    }
    SUBCASE("long put") {
        const std::vector<OptionLeg> legs{{Right::Put, Position::Long, 50, 1, 1, 5}};
        const auto p = strategy_pnl(legs);
        CHECK(p.max_profit == doctest::Approx(45));
        CHECK(p.max_loss == doctest::Approx(5));
        CHECK(p.breakevens == std::vector<double>{45});
    }
    SUBCASE("iron condor") {
        const std::vector<OptionLeg> legs{{Right::Put, Position::Long, 80, 1, 1, 1},
                                          {Right::Put, Position::Short, 90, 1, 1, 3},
                                          {Right::Call, Position::Short, 110, 1, 1, 3},
                                          {Right::Call, Position::Long, 120, 1, 1, 1}};
        const auto p = strategy_pnl(legs);
        CHECK(p.max_profit == doctest::Approx(4));
        CHECK(p.max_loss == doctest::Approx(6));
        REQUIRE(p.breakevens.size() == 2);
        CHECK(p.breakevens[0] == doctest::Approx(86));
        CHECK(p.breakevens[1] == doctest::Approx(114));
    }
}

TEST_CASE("strategy pnl agrees with a dense payoff scan") {
    Rng rng(6, "test.scan");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<OptionLeg> legs;
        const std::size_t n = 1 + rng.below(4);
        for (std::size_t i = 0; i < n; ++i)
            legs.push_back({rng.bernoulli(0.5) ? Right::Call : Right::Put,
                            rng.bernoulli(0.5) ? Position::Long : Position::Short,
                            double(80 + 5 * rng.below(9)), 0.5, double(1 + rng.below(2)),
                            double(rng.below(8))});
        const auto p = strategy_pnl(legs);
        double hi = -kInf, lo = kInf;
        // Sign changes between nonzero samples; a zero plateau in between
        // widens the bracket the breakeven must fall in.
        std::vector<std::pair<double, double>> brackets;
        double last = strategy_payoff(legs, 0), last_x = 0;
        const double step = 0.01;
        for (int k = 0; k <= 40'000; ++k) {
            const double x = k * step;
            const double v = strategy_payoff(legs, x);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
            if (v == 0) continue;
            if (last != 0 && (v > 0) != (last > 0)) brackets.emplace_back(last_x, x);
            last = v;
            last_x = x;
        }
        if (std::isfinite(p.max_profit)) CHECK(p.max_profit == doctest::Approx(hi).epsilon(1e-9));
        else CHECK(strategy_payoff(legs, 1e6) > hi);
        if (std::isfinite(p.max_loss)) CHECK(p.max_loss == doctest::Approx(-lo).epsilon(1e-9));
        else CHECK(strategy_payoff(legs, 1e6) < lo);
        for (auto [a, b] : brackets) {
            bool found = false;
            for (double be : p.breakevens) found = found || (be >= a - 1e-9 && be <= b + 1e-9);
            CHECK(found);
        }
        for (double b : p.breakevens) CHECK(std::abs(strategy_payoff(legs, b)) <= 1e-9);
    }
}

TEST_CASE("strategy pnl errors") {
    try {
        strategy_pnl({});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyLegs);
    }
    const std::vector<OptionLeg> mixed{{Right::Call, Position::Long, 100, 1, 1, 1},
                                       {Right::Call, Position::Long, 100, 2, 1, 1}};
    try {
        strategy_pnl(mixed);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MixedExpiries);
    }
}

TEST_CASE("scorers") {
    const Greeks truth{0.5, 0.02, -5.0, 20.0};
    CHECK(score_greeks(truth, truth) == 100);
    CHECK(score_greeks({0.52, 0.02, -5.0, 20.0}, truth) == 100);
    CHECK(score_greeks({0.6, 0.02, -5.0 / 365, 20.0}, truth) == 50);
    CHECK(greek_within_tolerance(0.00005, 0.0));
    CHECK_FALSE(greek_within_tolerance(0.0002, 0.0));
    CHECK_FALSE(greek_within_tolerance(NAN, 0.0));

    const StrategyPnL t{kInf, 7, {93, 107}};
    CHECK(score_pnl(t, t) == doctest::Approx(100));
    CHECK(score_pnl({kInf, 7, {93}}, t) == doctest::Approx(100 * (2 + 0.5) / 3));
    CHECK(score_pnl({1e9, 7.05, {93, 107, 120}}, t) == doctest::Approx(100 * (1 + 2.0 / 3) / 3));
    CHECK(score_pnl({0, 0, {}}, {0, 0, {}}) == doctest::Approx(100));
}

TEST_CASE("batch kernels agree with the serial references") {
    Rng rng(7, "test.batch");
    std::vector<OptionInputs> in;
    for (int i = 0; i < 5000; ++i) in.push_back(random_inputs(rng, i % 3 ? Right::Call : Right::Put));
    CHECK(price_batch(in) == price_batch_serial(in));
    CHECK(greeks_batch(in) == greeks_batch_serial(in));
    in[17].vol = 0.0;
    CHECK_THROWS_AS(greeks_batch(in), Error);
}
