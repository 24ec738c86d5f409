#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "traderbench/marketdata.hpp"
#include "traderbench/tradingsim.hpp"

namespace traderbench::agents {

struct Portfolio {
    double cash = 0.0;
    double position = 0.0;
};

struct AgentDecision {
    std::vector<sim::Order> orders;
};

/// `window` is every candle up to and including the agent's clock; the
/// newest bar is window.back(). Agents never see anything later.
using DecisionFn = std::function<AgentDecision(std::span<const Candle> window, const Portfolio&)>;

struct AgentSpec {
    std::string name;  // inert, buyhold, ma_cross, rsi, macd
    std::map<std::string, double> params;
};

struct Agent {
    std::string name;
    std::map<std::string, double> params;  // resolved, defaults filled in
    DecisionFn decide;
};

AgentDecision inert_agent(std::span<const Candle> window, const Portfolio& portfolio);
AgentDecision buyhold_agent(std::span<const Candle> window, const Portfolio& portfolio);
AgentDecision ma_cross_agent(std::span<const Candle> window, const Portfolio& portfolio,
                             std::size_t fast = 10, std::size_t slow = 30);
AgentDecision rsi_agent(std::span<const Candle> window, const Portfolio& portfolio,
                        double low = 30.0, double high = 70.0, std::size_t period = 14);
AgentDecision macd_agent(std::span<const Candle> window, const Portfolio& portfolio);

/// Builds a named agent; throws InvalidConfig on an unknown name or bad
/// parameters (e.g. rsi low >= high, ma fast >= slow).
Agent make_agent(const AgentSpec& spec);

std::vector<std::string> agent_names();

}  // namespace traderbench::agents
