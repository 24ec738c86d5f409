#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "traderbench/error.hpp"
#include "traderbench/marketdata.hpp"

namespace traderbench::sim {

enum class Side { Buy, Sell };

std::string_view side_name(Side s) noexcept;
std::optional<Side> parse_side(std::string_view s) noexcept;

/// How an order's size is resolved. Units fills `quantity` exactly.
/// AllAvailable resolves at fill time to every unit the account can trade
/// (all cash for a buy, the whole position for a sell), which lets an
/// all-in agent trade without knowing the next open.
enum class Sizing { Units, AllAvailable };

struct Order {
    Side side = Side::Buy;
    double quantity = 0.0;  // base units; ignored for AllAvailable
    Timestamp submitted_at = 0;
    Sizing sizing = Sizing::Units;

    static Order buy_all(Timestamp at) { return {Side::Buy, 0.0, at, Sizing::AllAvailable}; }
    static Order sell_all(Timestamp at) { return {Side::Sell, 0.0, at, Sizing::AllAvailable}; }

    bool operator==(const Order&) const = default;
};

struct Fill {
    Side side = Side::Buy;
    double quantity = 0.0;
    double price = 0.0;      // after slippage
    double reference = 0.0;  // bar open the fill was priced from
    Timestamp at = 0;
    std::size_t bar = 0;

    bool operator==(const Fill&) const = default;
};

struct Rejection {
    Order order;
    ErrorCode reason;
    Timestamp at = 0;

    bool operator==(const Rejection&) const = default;
};

struct EquityPoint {
    Timestamp at = 0;
    double equity = 0.0;

    bool operator==(const EquityPoint&) const = default;
};

/// A FIFO-matched round trip. pnl is signed: (exit - entry) * quantity for
/// a long lot, (entry - exit) * quantity for a short one.
struct Trade {
    Fill entry_fill;
    Fill exit_fill;
    double quantity = 0.0;
    double pnl = 0.0;

    bool operator==(const Trade&) const = default;
};

struct SimConfig {
    double initial_cash = 10'000.0;
    double slippage_bps = 10.0;
    bool allow_short = false;
};

/// Single-episode paper-trading state. Orders queue at the current bar and
/// fill at the next bar's open with adverse proportional slippage.
class SimState {
public:
    /// Throws InvalidCash, InvalidInput (negative slippage) or SeriesTooShort.
    SimState(CandleSeries series, SimConfig config);

    /// Throws SimFinished once the last bar has been consumed.
    void submit(const Order& order);

    /// Advances one bar. Returns true once finished; a no-op afterwards.
    bool step();

    const CandleSeries& series() const noexcept { return series_; }
    const SimConfig& config() const noexcept { return config_; }
    std::size_t clock_index() const noexcept { return clock_; }
    Timestamp clock() const { return series_[clock_].timestamp; }
    bool finished() const noexcept { return clock_ + 1 >= series_.size(); }
    double cash() const noexcept { return cash_; }
    double position() const noexcept { return position_; }
    double equity() const { return cash_ + position_ * series_[clock_].close; }
    const std::vector<Order>& pending() const noexcept { return pending_; }
    const std::vector<Fill>& fills() const noexcept { return fills_; }
    const std::vector<Rejection>& rejections() const noexcept { return rejections_; }
    const std::vector<EquityPoint>& equity_curve() const noexcept { return equity_curve_; }
    const std::vector<Trade>& closed_trades() const noexcept { return trades_; }
    double total_slippage() const noexcept { return slippage_paid_; }

    /// Equity values only, in bar order.
    std::vector<double> equity_values() const;

private:
    struct Lot {
        Fill fill;
        double remaining;  // signed: > 0 long, < 0 short
    };

    void execute(const Order& order, const Candle& bar);
    void match(const Fill& fill, double signed_qty);

    CandleSeries series_;
    SimConfig config_;
    std::size_t clock_ = 0;
    double cash_ = 0.0;
    double position_ = 0.0;
    double slippage_paid_ = 0.0;
    std::vector<Order> pending_;
    std::vector<Fill> fills_;
    std::vector<Rejection> rejections_;
    std::vector<EquityPoint> equity_curve_;
    std::vector<Trade> trades_;
    std::deque<Lot> lots_;
};

SimState new_sim(const CandleSeries& series, double initial_cash, double slippage_bps);

/// FIFO round trips closed so far; an open position is not a trade.
inline const std::vector<Trade>& closed_trades(const SimState& sim) { return sim.closed_trades(); }

}  // namespace traderbench::sim
