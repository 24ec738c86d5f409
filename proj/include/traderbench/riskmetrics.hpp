#pragma once

#include <optional>
#include <span>
#include <vector>

#include "traderbench/tradingsim.hpp"

namespace traderbench::risk {

/// Metrics over one equity curve. Undefined values are empty optionals and
/// serialize as JSON null.
struct RiskReport {
    double total_return = 0.0;
    std::optional<double> sharpe;
    std::optional<double> sortino;
    std::optional<double> var95;  // needs >= 20 returns
    double max_drawdown = 0.0;
    std::optional<double> win_rate;
    std::size_t n_trades = 0;

    bool operator==(const RiskReport&) const = default;
};

/// Standard deviations below this are treated as exactly zero.
inline constexpr double kZeroStd = 1e-14;
inline constexpr std::size_t kMinVarSamples = 20;

double total_return(std::span<const double> equity);
std::vector<double> simple_returns(std::span<const double> equity);

/// mean / sample std * sqrt(periods_per_year); risk-free rate 0.
std::optional<double> sharpe(std::span<const double> returns, double periods_per_year);

/// mean / sqrt(mean(min(r, 0)^2)) * sqrt(periods_per_year).
std::optional<double> sortino(std::span<const double> returns, double periods_per_year);

double max_drawdown(std::span<const double> equity);

/// Historical VaR: lower-interpolated (1 - confidence) quantile, reported
/// as a non-negative loss magnitude.
double hist_var(std::span<const double> returns, double confidence = 0.95);

/// pnl > 0 is a win; ties count as losses.
std::optional<double> win_rate(std::span<const sim::Trade> trades);

RiskReport risk_report(std::span<const double> equity, std::span<const sim::Trade> trades,
                       double periods_per_year);

/// 365 trading days a year scaled to the bar interval.
double periods_per_year(std::int64_t interval_seconds);

}  // namespace traderbench::risk
