#include "traderbench/riskmetrics.hpp"

#include <algorithm>
#include <cmath>

#include "traderbench/error.hpp"

namespace traderbench::risk {

namespace {

void require_positive(std::span<const double> equity) {
    for (double e : equity)
        if (!(e > 0)) fail(ErrorCode::InvalidInput, "equity values must be positive");
}

double mean(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace

double total_return(std::span<const double> equity) {
    if (equity.size() < 2) fail(ErrorCode::TooShort, "total_return needs at least 2 points");
    require_positive(equity);
    return equity.back() / equity.front() - 1.0;
}

std::vector<double> simple_returns(std::span<const double> equity) {
    std::vector<double> out;
    if (equity.size() < 2) return out;
    out.reserve(equity.size() - 1);
    for (std::size_t i = 1; i < equity.size(); ++i) out.push_back(equity[i] / equity[i - 1] - 1.0);
    return out;
}

std::optional<double> sharpe(std::span<const double> returns, double periods_per_year) {
    if (returns.size() < 2) fail(ErrorCode::TooShort, "sharpe needs at least 2 returns");
    const double m = mean(returns);
    double ss = 0.0;
    for (double r : returns) ss += (r - m) * (r - m);
    const double sd = std::sqrt(ss / static_cast<double>(returns.size() - 1));
    if (sd < kZeroStd) return std::nullopt;
    return m / sd * std::sqrt(periods_per_year);
}

std::optional<double> sortino(std::span<const double> returns, double periods_per_year) {
    if (returns.size() < 2) fail(ErrorCode::TooShort, "sortino needs at least 2 returns");
    double downside = 0.0;
    bool any_negative = false;
    for (double r : returns) {
        if (r < 0) {
            downside += r * r;
            any_negative = true;
        }
    }
    if (!any_negative) return std::nullopt;
    const double dd = std::sqrt(downside / static_cast<double>(returns.size()));
    return mean(returns) / dd * std::sqrt(periods_per_year);
}

double max_drawdown(std::span<const double> equity) {
    if (equity.empty()) fail(ErrorCode::TooShort, "max_drawdown needs at least 1 point");
    require_positive(equity);
    double peak = equity.front();
    double worst = 0.0;
    for (double e : equity) {
        peak = std::max(peak, e);
        worst = std::max(worst, (peak - e) / peak);
    }
    return worst;
}

double hist_var(std::span<const double> returns, double confidence) {
    if (returns.size() < kMinVarSamples)
        fail(ErrorCode::TooShort, "hist_var needs at least 20 returns");
    if (!(confidence > 0 && confidence < 1)) fail(ErrorCode::InvalidInput, "confidence must be in (0,1)");
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    // Lower interpolation; the epsilon absorbs representation error in (1 - c).
    const double pos = (1.0 - confidence) * static_cast<double>(sorted.size() - 1);
    const auto idx = static_cast<std::size_t>(std::floor(pos + 1e-9));
    return -std::min(sorted[std::min(idx, sorted.size() - 1)], 0.0);
}

std::optional<double> win_rate(std::span<const sim::Trade> trades) {
    if (trades.empty()) return std::nullopt;
    const auto wins = std::count_if(trades.begin(), trades.end(),
                                    [](const sim::Trade& t) { return t.pnl > 0; });
    return static_cast<double>(wins) / static_cast<double>(trades.size());
}

RiskReport risk_report(std::span<const double> equity, std::span<const sim::Trade> trades,
                       double periods_per_year) {
    if (equity.size() < 2) fail(ErrorCode::TooShort, "risk_report needs at least 2 equity points");
    RiskReport r;
    r.total_return = total_return(equity);
    const auto rets = simple_returns(equity);
    if (rets.size() >= 2) {
        r.sharpe = sharpe(rets, periods_per_year);
        r.sortino = sortino(rets, periods_per_year);
    }
    if (rets.size() >= kMinVarSamples) r.var95 = hist_var(rets, 0.95);
    r.max_drawdown = max_drawdown(equity);
    r.win_rate = win_rate(trades);
    r.n_trades = trades.size();
    return r;
}

double periods_per_year(std::int64_t interval_seconds) {
    if (interval_seconds <= 0) return 365.0;
    return 365.0 * 86400.0 / static_cast<double>(interval_seconds);
}

}  // namespace traderbench::risk
