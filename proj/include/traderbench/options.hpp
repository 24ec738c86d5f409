#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace traderbench::options {

enum class Right { Call, Put };
enum class Position { Long, Short };

std::string_view right_name(Right r) noexcept;
std::optional<Right> parse_right(std::string_view s) noexcept;
std::string_view position_name(Position p) noexcept;
std::optional<Position> parse_position(std::string_view s) noexcept;

/// European option, no dividends.
struct OptionInputs {
    double spot = 0.0;
    double strike = 0.0;
    double rate = 0.0;
    double vol = 0.0;
    double expiry_years = 0.0;
    Right right = Right::Call;
};

/// Theta is per year; vega per unit (1.00) of volatility.
struct Greeks {
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    double vega = 0.0;

    bool operator==(const Greeks&) const = default;
};

inline constexpr double kMinVol = 1e-12;
inline constexpr double kIvLow = 1e-6;
inline constexpr double kIvHigh = 5.0;
inline constexpr int kIvMaxIterations = 200;
inline constexpr double kIvPriceTolerance = 1e-8;

double norm_cdf(double x) noexcept;
double norm_pdf(double x) noexcept;

/// Below kMinVol the discounted-intrinsic limit is returned.
double bs_price(const OptionInputs& in);

/// Throws ZeroVol when vol <= kMinVol.
Greeks bs_greeks(const OptionInputs& in);

/// Bracketed bisection on [kIvLow, kIvHigh]. `in.vol` is ignored.
double implied_vol(double price, const OptionInputs& in);

struct OptionLeg {
    Right right = Right::Call;
    Position side = Position::Long;
    double strike = 0.0;
    double expiry_years = 0.0;
    double quantity = 1.0;
    double premium = 0.0;  // per contract

    bool operator==(const OptionLeg&) const = default;
};

/// Infinite sides are +infinity; max_loss is a magnitude.
struct StrategyPnL {
    double max_profit = 0.0;
    double max_loss = 0.0;
    std::vector<double> breakevens;

    bool operator==(const StrategyPnL&) const = default;
};

/// Net expiry payoff of the legs at underlying price `x`.
double strategy_payoff(std::span<const OptionLeg> legs, double x);

StrategyPnL strategy_pnl(std::span<const OptionLeg> legs);

inline constexpr double kGreekTolerance = 0.05;
inline constexpr double kGreekSmallTruth = 1e-3;
inline constexpr double kGreekAbsTolerance = 1e-4;
inline constexpr double kPnlTolerance = 0.01;

bool greek_within_tolerance(double reported, double truth) noexcept;

/// 25 points per Greek within tolerance.
double score_greeks(const Greeks& reported, const Greeks& truth);

/// Thirds: max_profit, max_loss, breakeven set.
double score_pnl(const StrategyPnL& reported, const StrategyPnL& truth);

// Batch kernels. The OpenMP versions and the serial references must agree
// bit-for-bit; each element is independent.
std::vector<double> price_batch(std::span<const OptionInputs> inputs);
std::vector<double> price_batch_serial(std::span<const OptionInputs> inputs);
std::vector<Greeks> greeks_batch(std::span<const OptionInputs> inputs);
std::vector<Greeks> greeks_batch_serial(std::span<const OptionInputs> inputs);

}  // namespace traderbench::options
