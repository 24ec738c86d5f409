#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Indicator outputs are "valid-only": element k of the result belongs to
// input index k + offset, where offset is the warm-up length documented on
// each function. Undefined warm-up positions are not emitted.
namespace traderbench::indicators {

/// offset = window - 1
std::vector<double> sma(std::span<const double> values, std::size_t window);

/// Seeded with the SMA of the first `window` values, alpha = 2/(window+1).
/// offset = window - 1
std::vector<double> ema(std::span<const double> values, std::size_t window);

/// Wilder RSI. A window with neither gains nor losses prints 50.
/// offset = window
std::vector<double> rsi(std::span<const double> closes, std::size_t window = 14);

struct MacdTriple {
    std::size_t offset = 0;  // input index of element 0
    std::vector<double> macd;
    std::vector<double> signal;
    std::vector<double> histogram;
};

/// offset = slow + signal - 2
MacdTriple macd(std::span<const double> closes, std::size_t fast = 12, std::size_t slow = 26,
                std::size_t signal = 9);

}  // namespace traderbench::indicators
