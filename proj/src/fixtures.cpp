#include "traderbench/fixtures.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "traderbench/error.hpp"
#include "traderbench/rng.hpp"

namespace traderbench::fixtures {

namespace {

constexpr std::array<std::pair<Shape, std::string_view>, 6> kShapes{{
    {Shape::TrendUp, "trend_up"},
    {Shape::TrendDown, "trend_down"},
    {Shape::Flat, "flat"},
    {Shape::VShape, "v_shape"},
    {Shape::RandomWalk, "random_walk"},
    {Shape::MeanReverting, "mean_reverting"},
}};

}  // namespace

std::string_view shape_name(Shape s) noexcept {
    for (const auto& [shape, name] : kShapes)
        if (shape == s) return name;
    return "unknown";
}

std::optional<Shape> parse_shape(std::string_view name) noexcept {
    for (const auto& [shape, n] : kShapes)
        if (n == name) return shape;
    return std::nullopt;
}

CandleSeries generate_fixture(const FixtureSpec& spec) {
    if (spec.length < 40) fail(ErrorCode::TooShort, "fixture length must be at least 40");
    if (!(spec.base_price > 0) || spec.vol < 0 || spec.interval_seconds <= 0)
        fail(ErrorCode::InvalidParams, "fixture needs base_price > 0, vol >= 0, interval > 0");

    Rng path_rng(spec.seed, "fixture.path");
    Rng wick_rng(spec.seed, "fixture.wicks");
    Rng volume_rng(spec.seed, "fixture.volume");

    const double anchor = std::log(spec.base_price);
    const bool flat = spec.shape == Shape::Flat;
    std::vector<Candle> candles;
    candles.reserve(spec.length);
    double x = anchor;
    double prev_close = spec.base_price;
    for (std::size_t i = 0; i < spec.length; ++i) {
        if (i > 0 && !flat) {
            double step = 0.0;
            switch (spec.shape) {
                case Shape::TrendUp: step = spec.drift; break;
                case Shape::TrendDown: step = -spec.drift; break;
                case Shape::VShape: step = i < spec.length / 2 ? -spec.drift : spec.drift; break;
                case Shape::RandomWalk: step = spec.drift; break;
                case Shape::MeanReverting: step = spec.reversion * (anchor - x); break;
                case Shape::Flat: break;
            }
            x += step + (spec.vol > 0 ? spec.vol * path_rng.normal() : 0.0);
        }
        Candle c;
        c.timestamp = spec.start + static_cast<Timestamp>(i) * spec.interval_seconds;
        c.close = flat ? spec.base_price : std::exp(x);
        c.open = i == 0 ? c.close : prev_close;
        const double up = spec.vol > 0 ? 0.5 * spec.vol * std::abs(wick_rng.normal()) : 0.0;
        const double down = spec.vol > 0 ? 0.5 * spec.vol * std::abs(wick_rng.normal()) : 0.0;
        c.high = std::max(c.open, c.close) * (1.0 + up);
        c.low = std::min(c.open, c.close) * (1.0 - std::min(down, 0.5));
        c.volume = 1000.0 * std::exp(0.25 * volume_rng.normal());
        candles.push_back(c);
        prev_close = c.close;
    }
    return CandleSeries(spec.symbol, spec.interval_seconds, std::move(candles));
}

}  // namespace traderbench::fixtures
