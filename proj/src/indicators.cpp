#include "traderbench/indicators.hpp"

#include <string>

#include "traderbench/error.hpp"

namespace traderbench::indicators {

namespace {

void check_window(std::size_t n, std::size_t window, const char* what) {
    if (window == 0) fail(ErrorCode::InvalidParams, std::string(what) + ": window must be positive");
    if (window > n)
        fail(ErrorCode::WindowTooLarge, std::string(what) + ": window " + std::to_string(window) +
                                            " exceeds length " + std::to_string(n));
}

}  // namespace

std::vector<double> sma(std::span<const double> values, std::size_t window) {
    check_window(values.size(), window, "sma");
    std::vector<double> out;
    out.reserve(values.size() - window + 1);
    // Direct window sums: no running-sum drift, so a constant input stays constant.
    for (std::size_t i = window - 1; i < values.size(); ++i) {
        double sum = 0.0;
        for (std::size_t k = i + 1 - window; k <= i; ++k) sum += values[k];
        out.push_back(sum / static_cast<double>(window));
    }
    return out;
}

std::vector<double> ema(std::span<const double> values, std::size_t window) {
    check_window(values.size(), window, "ema");
    const double alpha = 2.0 / (static_cast<double>(window) + 1.0);
    std::vector<double> out;
    out.reserve(values.size() - window + 1);
    double seed = 0.0;
    for (std::size_t k = 0; k < window; ++k) seed += values[k];
    double e = seed / static_cast<double>(window);
    out.push_back(e);
    for (std::size_t i = window; i < values.size(); ++i) {
        e = alpha * values[i] + (1.0 - alpha) * e;
        out.push_back(e);
    }
    return out;
}

std::vector<double> rsi(std::span<const double> closes, std::size_t window) {
    if (window == 0) fail(ErrorCode::InvalidParams, "rsi: window must be positive");
    if (closes.size() < window + 1)
        fail(ErrorCode::TooShort, "rsi: need at least window+1 closes");
    const double w = static_cast<double>(window);
    auto value = [](double avg_gain, double avg_loss) {
        if (avg_loss == 0.0) return avg_gain == 0.0 ? 50.0 : 100.0;
        return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
    };
    double gain = 0.0;
    double loss = 0.0;
    for (std::size_t i = 1; i <= window; ++i) {
        const double d = closes[i] - closes[i - 1];
        if (d > 0) gain += d;
        else loss -= d;
    }
    gain /= w;
    loss /= w;
    std::vector<double> out;
    out.reserve(closes.size() - window);
    out.push_back(value(gain, loss));
    for (std::size_t i = window + 1; i < closes.size(); ++i) {
        const double d = closes[i] - closes[i - 1];
        gain = (gain * (w - 1.0) + (d > 0 ? d : 0.0)) / w;
        loss = (loss * (w - 1.0) + (d < 0 ? -d : 0.0)) / w;
        out.push_back(value(gain, loss));
    }
    return out;
}

MacdTriple macd(std::span<const double> closes, std::size_t fast, std::size_t slow,
                std::size_t signal) {
    if (fast == 0 || signal == 0 || fast >= slow)
        fail(ErrorCode::InvalidParams, "macd: need 0 < fast < slow and signal > 0");
    if (closes.size() < slow + signal)
        fail(ErrorCode::TooShort, "macd: need at least slow+signal closes");
    const auto fast_line = ema(closes, fast);  // offset fast-1
    const auto slow_line = ema(closes, slow);  // offset slow-1
    std::vector<double> line;
    line.reserve(slow_line.size());
    for (std::size_t k = 0; k < slow_line.size(); ++k)
        line.push_back(fast_line[k + (slow - fast)] - slow_line[k]);
    const auto sig = ema(line, signal);  // offset signal-1 within line

    MacdTriple out;
    out.offset = slow + signal - 2;
    out.macd.assign(line.begin() + static_cast<std::ptrdiff_t>(signal - 1), line.end());
    out.signal = sig;
    out.histogram.reserve(sig.size());
    for (std::size_t k = 0; k < sig.size(); ++k) out.histogram.push_back(out.macd[k] - sig[k]);
    return out;
}

}  // namespace traderbench::indicators
