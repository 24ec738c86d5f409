#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace traderbench {

using Timestamp = std::int64_t;  // seconds since epoch, UTC

struct Candle {
    Timestamp timestamp = 0;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    bool operator==(const Candle&) const = default;
};

/// True when the bar satisfies the OHLC ordering and positivity rules.
bool is_valid_candle(const Candle& c) noexcept;

/// Widens high/low so the bar contains its open and close.
void repair(Candle& c) noexcept;

/// A validated, uniformly spaced run of candles. Construction checks every
/// invariant; once built the series is immutable.
class CandleSeries {
public:
    CandleSeries() = default;

    /// Throws InvariantViolation / NonUniformInterval on bad input.
    CandleSeries(std::string symbol, std::int64_t interval_seconds, std::vector<Candle> candles);

    const std::string& symbol() const noexcept { return symbol_; }
    std::int64_t interval_seconds() const noexcept { return interval_; }
    const std::vector<Candle>& candles() const noexcept { return candles_; }
    std::size_t size() const noexcept { return candles_.size(); }
    bool empty() const noexcept { return candles_.empty(); }
    const Candle& operator[](std::size_t i) const { return candles_[i]; }
    const Candle& front() const { return candles_.front(); }
    const Candle& back() const { return candles_.back(); }

    std::vector<double> closes() const;

    /// Same symbol and interval, different bars (revalidated).
    CandleSeries with_candles(std::vector<Candle> candles) const;
    CandleSeries renamed(std::string symbol) const;

    bool operator==(const CandleSeries&) const = default;

private:
    std::string symbol_;
    std::int64_t interval_ = 0;
    std::vector<Candle> candles_;
};

inline constexpr std::string_view kCsvHeader = "timestamp,open,high,low,close,volume";

/// Parses the canonical CSV layout. The interval is inferred from the first
/// two rows; a single row yields interval 0 unless `fallback_interval` is set.
CandleSeries parse_candle_csv(std::string_view text, std::string symbol = "UNKNOWN",
                              std::int64_t fallback_interval = 0);

/// Shortest round-trip decimal formatting, LF line endings.
std::string serialize_candle_csv(const CandleSeries& series);

CandleSeries load_candle_csv(const std::string& path, std::string symbol = {});
void save_candle_csv(const CandleSeries& series, const std::string& path);

/// Candles with timestamp <= clock.
CandleSeries slice_until(const CandleSeries& series, Timestamp clock);

/// ln(close[i+1] / close[i]).
std::vector<double> log_returns(const CandleSeries& series);

}  // namespace traderbench
