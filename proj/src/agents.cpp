#include "traderbench/agents.hpp"

#include <cmath>

#include "traderbench/error.hpp"
#include "traderbench/indicators.hpp"

namespace traderbench::agents {

namespace {

std::vector<double> closes_of(std::span<const Candle> window) {
    std::vector<double> out;
    out.reserve(window.size());
    for (const auto& c : window) out.push_back(c.close);
    return out;
}

double tail_mean(std::span<const Candle> window, std::size_t end, std::size_t w) {
    double sum = 0.0;
    for (std::size_t k = end + 1 - w; k <= end; ++k) sum += window[k].close;
    return sum / static_cast<double>(w);
}

// Differences within this fraction of price count as "no signal".
constexpr double kFlatBand = 1e-12;

int sign_of(double v, double scale) {
    if (std::abs(v) <= kFlatBand * scale) return 0;
    return v > 0 ? 1 : -1;
}

AgentDecision on_signal(std::span<const Candle> window, const Portfolio& pf, bool enter, bool exit) {
    AgentDecision d;
    const Timestamp now = window.back().timestamp;
    if (enter && pf.position <= 0 && pf.cash > 0) d.orders.push_back(sim::Order::buy_all(now));
    else if (exit && pf.position > 0) d.orders.push_back(sim::Order::sell_all(now));
    return d;
}

}  // namespace

AgentDecision inert_agent(std::span<const Candle>, const Portfolio&) { return {}; }

AgentDecision buyhold_agent(std::span<const Candle> window, const Portfolio& pf) {
    AgentDecision d;
    if (!window.empty() && pf.position == 0 && pf.cash > 0)
        d.orders.push_back(sim::Order::buy_all(window.back().timestamp));
    return d;
}

AgentDecision ma_cross_agent(std::span<const Candle> window, const Portfolio& pf, std::size_t fast,
                             std::size_t slow) {
    const std::size_t n = window.size();
    if (n < slow) return {};
    const double scale = window.back().close;
    const int now = sign_of(tail_mean(window, n - 1, fast) - tail_mean(window, n - 1, slow), scale);
    // Before the first defined bar the regime counts as "no signal".
    const int prev = n > slow ? sign_of(tail_mean(window, n - 2, fast) - tail_mean(window, n - 2, slow),
                                        window[n - 2].close)
                              : 0;
    return on_signal(window, pf, now > 0 && prev <= 0, now < 0 && prev >= 0);
}

AgentDecision rsi_agent(std::span<const Candle> window, const Portfolio& pf, double low, double high,
                        std::size_t period) {
    if (window.size() < period + 2) return {};
    const auto r = indicators::rsi(closes_of(window), period);
    const double now = r.back();
    const double prev = r[r.size() - 2];
    return on_signal(window, pf, prev < low && now >= low, prev > high && now <= high);
}

AgentDecision macd_agent(std::span<const Candle> window, const Portfolio& pf) {
    constexpr std::size_t fast = 12, slow = 26, signal = 9;
    if (window.size() < slow + signal + 1) return {};
    const auto m = indicators::macd(closes_of(window), fast, slow, signal);
    const double scale = window.back().close;
    const int now = sign_of(m.histogram.back(), scale);
    const int prev = sign_of(m.histogram[m.histogram.size() - 2], scale);
    return on_signal(window, pf, prev <= 0 && now > 0, prev >= 0 && now < 0);
}

namespace {

double param(const AgentSpec& spec, const char* key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

std::size_t window_param(const AgentSpec& spec, const char* key, double fallback) {
    const double v = param(spec, key, fallback);
    if (!(v >= 1) || v != std::floor(v))
        fail(ErrorCode::InvalidConfig, spec.name + "." + key + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

}  // namespace

Agent make_agent(const AgentSpec& spec) {
    Agent a;
    a.name = spec.name;
    if (spec.name == "inert") {
        a.decide = inert_agent;
    } else if (spec.name == "buyhold") {
        a.decide = buyhold_agent;
    } else if (spec.name == "ma_cross") {
        const auto fast = window_param(spec, "fast", 10);
        const auto slow = window_param(spec, "slow", 30);
        if (fast >= slow) fail(ErrorCode::InvalidConfig, "ma_cross: fast must be < slow");
        a.params = {{"fast", double(fast)}, {"slow", double(slow)}};
        a.decide = [fast, slow](std::span<const Candle> w, const Portfolio& p) {
            return ma_cross_agent(w, p, fast, slow);
        };
    } else if (spec.name == "rsi") {
        const double low = param(spec, "low", 30.0);
        const double high = param(spec, "high", 70.0);
        const auto period = window_param(spec, "period", 14);
        if (!(low >= 0 && high <= 100 && low < high))
            fail(ErrorCode::InvalidConfig, "rsi: thresholds need 0 <= low < high <= 100");
        a.params = {{"low", low}, {"high", high}, {"period", double(period)}};
        a.decide = [low, high, period](std::span<const Candle> w, const Portfolio& p) {
            return rsi_agent(w, p, low, high, period);
        };
    } else if (spec.name == "macd") {
        a.params = {{"fast", 12.0}, {"slow", 26.0}, {"signal", 9.0}};
        a.decide = macd_agent;
    } else {
        fail(ErrorCode::InvalidConfig, "unknown agent '" + spec.name + "'");
    }
    for (const auto& [k, v] : spec.params)
        if (!a.params.contains(k))
            fail(ErrorCode::InvalidConfig, spec.name + ": unknown parameter '" + k + "'");
    return a;
}

std::vector<std::string> agent_names() { return {"inert", "buyhold", "ma_cross", "rsi", "macd"}; }

}  // namespace traderbench::agents
