#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "traderbench/marketdata.hpp"

namespace traderbench::fixtures {

enum class Shape { TrendUp, TrendDown, Flat, VShape, RandomWalk, MeanReverting };

std::string_view shape_name(Shape s) noexcept;
std::optional<Shape> parse_shape(std::string_view name) noexcept;

struct FixtureSpec {
    Shape shape = Shape::TrendUp;
    std::size_t length = 200;
    std::uint64_t seed = 42;
    double base_price = 100.0;
    double drift = 0.001;  // log drift per bar (magnitude; sign comes from shape)
    double vol = 0.0;      // log-return std per bar
    double reversion = 0.1;  // mean_reverting only
    std::int64_t interval_seconds = 86400;
    Timestamp start = 1704067200;  // 2024-01-01T00:00:00Z
    std::string symbol = "SYNTH";
};

/// Closes follow a log-space walk (drift by shape plus vol-scaled Gaussian
/// shocks); each bar opens at the previous close. Deterministic in the spec.
CandleSeries generate_fixture(const FixtureSpec& spec);

}  // namespace traderbench::fixtures
