#include <doctest.h>

#include <cmath>
#include <numeric>

#include "traderbench/error.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/indicators.hpp"
#include "traderbench/transforms.hpp"

using namespace traderbench;
using namespace traderbench::transforms;

namespace {

CandleSeries walk(std::uint64_t seed, std::size_t n = 300, double vol = 0.01) {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::RandomWalk;
    spec.length = n;
    spec.seed = seed;
    spec.vol = vol;
    return generate_fixture(spec);
}

CandleSeries gentle_trend(std::uint64_t seed) {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::TrendUp;
    spec.length = 240;
    spec.drift = 0.0001;
    spec.seed = seed;
    return generate_fixture(spec);
}

bool all_valid(const CandleSeries& s) {
    for (const auto& c : s.candles())
        if (!is_valid_candle(c)) return false;
    return true;
}

int ma_sign(const std::vector<double>& c, std::size_t j, std::size_t fast, std::size_t slow) {
    auto mean = [&](std::size_t w) {
        double sum = 0;
        for (std::size_t k = j + 1 - w; k <= j; ++k) sum += c[k];
        return sum / double(w);
    };
    return mean(fast) - mean(slow) >= 0 ? 1 : -1;
}

}  // namespace

TEST_CASE("kind names round-trip") {
    for (auto k : kAllKinds) CHECK(parse_kind(kind_name(k)) == k);
    CHECK_FALSE(parse_kind("bogus").has_value());
}

TEST_CASE("baseline is the identity") {
    const auto s = walk(1);
    CHECK(apply_transform(s, {TransformKind::Baseline, 9, {}}) == s);
}

TEST_CASE("parameter validation") {
    TransformParams p;
    p.noise_sigma = -0.1;
    try {
        t_noisy(walk(1), 1, p);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParams);
        CHECK(std::string(e.what()).find("noise_sigma") != std::string::npos);
    }
    TransformParams q;
    q.ma_fast = 30;
    CHECK_THROWS_AS(t_adversarial(walk(1), 1, q), Error);
}

TEST_CASE("noisy statistics") {
    fixtures::FixtureSpec spec;
    spec.shape = fixtures::Shape::Flat;
    spec.length = 10'000;
    const auto flat = generate_fixture(spec);
    TransformParams p;
    const auto noisy = t_noisy(flat, 42, p);
    // On a flat series the injected log-return is log(f_i / f_{i-1}); std ~ sqrt(2) sigma.
    std::vector<double> r;
    for (std::size_t i = 0; i < noisy.size(); ++i) r.push_back(std::log(noisy[i].close / flat[i].close));
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / double(r.size());
    double ss = 0;
    for (double v : r) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / double(r.size() - 1));
    CHECK(sd == doctest::Approx(0.02).epsilon(0.05));

    p.spike_prob = 1.0;
    const auto spiked = t_noisy(flat, 42, p);
    for (std::size_t i = 0; i < flat.size(); ++i) CHECK(spiked[i].volume == 3.0 * flat[i].volume);
}

TEST_CASE("sigma zero noise is the identity on prices") {
    TransformParams p;
    p.noise_sigma = 0.0;
    p.spike_prob = 0.0;
    const auto s = walk(2);
    CHECK(t_noisy(s, 5, p) == s);
}

TEST_CASE("all transforms keep OHLC invariants and are deterministic") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = walk(seed % 7 + 1, 260, 0.01);
        for (auto kind : kAllKinds) {
            TransformSpec spec{kind, seed, {}};
            TransformOutcome a, b;
            try {
                a = apply_transform_detailed(s, spec);
                b = apply_transform_detailed(s, spec);
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::InjectionInfeasible);
                continue;
            }
            CHECK(all_valid(a.series));
            CHECK(a.series == b.series);
            CHECK(a.series.size() == s.size());
            CHECK(a.series.interval_seconds() == s.interval_seconds());
            for (std::size_t i = 0; i < s.size(); ++i) CHECK(a.series[i].timestamp == s[i].timestamp);
        }
    }
}

TEST_CASE("different seeds differ") {
    const auto s = walk(3);
    CHECK(t_noisy(s, 1, {}) != t_noisy(s, 2, {}));
    CHECK(t_meta(s, 1, {}) != t_meta(s, 2, {}));
}

TEST_CASE("meta places false breakouts that close back inside") {
    const auto s = walk(4, 300, 0.005);
    TransformParams p;
    p.trend_windows = 0;
    p.noise_sigma = 0.0;
    p.spike_prob = 0.0;
    p.breakout_count = 3;
    const auto m = t_meta(s, 11, p);
    std::size_t pierced_high = 0, pierced_low = 0;
    for (std::size_t j = p.breakout_lookback; j < s.size(); ++j) {
        double hi = 0, lo = 1e300;
        for (std::size_t k = j - p.breakout_lookback; k < j; ++k) {
            hi = std::max(hi, m[k].high);
            lo = std::min(lo, m[k].low);
        }
        if (m[j].high >= hi * (1 + p.breakout_overshoot) * (1 - 1e-12) && m[j].close < hi) ++pierced_high;
        if (m[j].low <= lo * (1 - p.breakout_overshoot) * (1 + 1e-12) && m[j].close > lo) ++pierced_low;
    }
    CHECK(pierced_high >= 1);
    CHECK(pierced_low >= 1);
}

TEST_CASE("meta trend windows bend the path and vanish at the edges") {
    const auto s = walk(5, 200, 0.0);
    TransformParams p;
    p.noise_sigma = 0.0;
    p.spike_prob = 0.0;
    p.breakout_count = 0;
    p.trend_windows = 2;
    const auto m = t_meta(s, 3, p);
    std::size_t changed = 0;
    double peak = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double ratio = m[i].close / s[i].close;
        if (ratio != 1.0) ++changed;
        peak = std::max(peak, std::abs(ratio - 1));
    }
    // Each window touches trend_len - 2 interior bars.
    CHECK(changed == 2 * (p.trend_len - 2));
    CHECK(peak <= p.trend_drift + 1e-12);
    CHECK(peak > p.trend_drift * 0.8);
}

TEST_CASE("adversarial sites flip the targeted signal within the cap") {
    TransformParams p;
    p.rsi_site = false;
    p.macd_site = false;
    std::size_t placed = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = gentle_trend(seed);
        const auto out = t_adversarial_detailed(s, seed, p);
        const auto before = s.closes();
        const auto after = out.series.closes();
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(std::abs(after[i] / before[i] - 1) <= p.injection_amp * (1 + 1e-12));
            CHECK(out.series[i].open == s[i].open);
            CHECK(out.series[i].volume == s[i].volume);
        }
        for (const auto& site : out.sites) {
            ++placed;
            CHECK(site.kind == "ma_cross");
            CHECK(site.target - site.first + 1 == p.injection_len);
            const int orig = ma_sign(before, site.target, p.ma_fast, p.ma_slow);
            CHECK(ma_sign(after, site.target, p.ma_fast, p.ma_slow) == -orig);
            CHECK(ma_sign(after, site.target - 1, p.ma_fast, p.ma_slow) == orig);
            bool reverted = false;
            for (std::size_t j = site.target + 1; j < s.size() && j <= site.target + p.ma_slow; ++j)
                reverted = reverted || ma_sign(after, j, p.ma_fast, p.ma_slow) == orig;
            CHECK(reverted);
        }
        // Bars outside all windows are untouched.
        for (std::size_t i = 0; i < s.size(); ++i) {
            bool inside = false;
            for (const auto& site : out.sites) inside = inside || (i >= site.first && i <= site.target);
            if (!inside) CHECK(out.series[i] == s[i]);
        }
    }
    CHECK(placed >= 20);
}

TEST_CASE("adversarial macd and rsi sites") {
    std::size_t macd = 0, rsi = 0;
    TransformParams p;
    p.injection_count = 0;
    p.injection_amp = 0.02;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto s = walk(seed, 300, 0.01);
        TransformOutcome out;
        try {
            out = t_adversarial_detailed(s, seed, p);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InjectionInfeasible);
            continue;
        }
        const auto before = indicators::macd(s.closes());
        const auto after = indicators::macd(out.series.closes());
        for (const auto& site : out.sites) {
            if (site.kind == "macd_flip") {
                ++macd;
                const std::size_t k = site.target - before.offset;
                CHECK((before.histogram[k] >= 0) != (after.histogram[k] >= 0));
            } else if (site.kind == "rsi_divergence") {
                ++rsi;
                const auto c = out.series.closes();
                double prior = 0;
                for (std::size_t j = site.target - 20; j < site.target; ++j) prior = std::max(prior, c[j]);
                CHECK(c[site.target] > prior);
            }
            CHECK(site.magnitude <= p.injection_amp);
        }
    }
    CHECK(macd > 0);
    CHECK(rsi > 0);
}

TEST_CASE("adversarial feasibility reporting") {
    const auto s = gentle_trend(1);
    TransformParams p;
    p.injection_amp = 1e-9;
    try {
        t_adversarial(s, 1, p);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InjectionInfeasible);
    }

    TransformParams none;
    none.injection_count = 0;
    none.rsi_site = false;
    none.macd_site = false;
    CHECK(t_adversarial(s, 1, none) == s);

    // A strictly monotone path has no local peak to diverge from.
    const auto out = t_adversarial_detailed(s, 1, {});
    bool noted = false;
    for (const auto& n : out.notes) noted = noted || n.find("rsi_divergence") != std::string::npos;
    CHECK(noted);

    CHECK_THROWS_AS(t_adversarial(walk(1, 30), 1, {}), Error);
}
