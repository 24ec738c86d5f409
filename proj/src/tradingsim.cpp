#include "traderbench/tradingsim.hpp"

#include <cmath>

namespace traderbench::sim {

std::string_view side_name(Side s) noexcept { return s == Side::Buy ? "buy" : "sell"; }

std::optional<Side> parse_side(std::string_view s) noexcept {
    if (s == "buy") return Side::Buy;
    if (s == "sell") return Side::Sell;
    return std::nullopt;
}

SimState::SimState(CandleSeries series, SimConfig config)
    : series_(std::move(series)), config_(config) {
    if (!(config_.initial_cash > 0) || !std::isfinite(config_.initial_cash))
        fail(ErrorCode::InvalidCash, "initial_cash must be positive");
    if (!(config_.slippage_bps >= 0) || !std::isfinite(config_.slippage_bps))
        fail(ErrorCode::InvalidInput, "slippage_bps must be >= 0");
    if (series_.size() < 2) fail(ErrorCode::SeriesTooShort, "simulation needs at least 2 bars");
    cash_ = config_.initial_cash;
    equity_curve_.push_back({series_.front().timestamp, cash_});
}

SimState new_sim(const CandleSeries& series, double initial_cash, double slippage_bps) {
    return SimState(series, SimConfig{initial_cash, slippage_bps, false});
}

void SimState::submit(const Order& order) {
    if (finished()) fail(ErrorCode::SimFinished, "simulation has consumed its last bar");
    if (order.sizing == Sizing::Units && !(order.quantity > 0 && std::isfinite(order.quantity)))
        fail(ErrorCode::InvalidInput, "order quantity must be positive");
    pending_.push_back(order);
}

bool SimState::step() {
    if (finished()) return true;
    ++clock_;
    const Candle& bar = series_[clock_];
    auto queued = std::move(pending_);
    pending_.clear();
    for (const auto& order : queued) execute(order, bar);
    equity_curve_.push_back({bar.timestamp, cash_ + position_ * bar.close});
    return finished();
}

std::vector<double> SimState::equity_values() const {
    std::vector<double> out;
    out.reserve(equity_curve_.size());
    for (const auto& p : equity_curve_) out.push_back(p.equity);
    return out;
}

void SimState::execute(const Order& order, const Candle& bar) {
    const double bps = config_.slippage_bps / 10'000.0;
    const bool buy = order.side == Side::Buy;
    const double price = bar.open * (buy ? 1.0 + bps : 1.0 - bps);
    auto reject = [&](ErrorCode why) { rejections_.push_back({order, why, bar.timestamp}); };

    double qty = order.quantity;
    if (order.sizing == Sizing::AllAvailable) {
        if (buy) {
            // Buying against a short covers it; otherwise spend all cash.
            qty = position_ < 0 ? -position_ : cash_ / price;
        } else {
            qty = position_ > 0 ? position_ : 0.0;
        }
        if (!(qty > 0)) {
            reject(buy ? ErrorCode::InsufficientCash : ErrorCode::InsufficientPosition);
            return;
        }
    }

    if (buy) {
        const double cost = qty * price;
        if (cost > cash_) {
            reject(ErrorCode::InsufficientCash);
            return;
        }
        const bool spend_all = order.sizing == Sizing::AllAvailable && position_ >= 0;
        cash_ = spend_all ? 0.0 : cash_ - cost;
    } else {
        if (!config_.allow_short && qty > position_) {
            reject(ErrorCode::InsufficientPosition);
            return;
        }
        cash_ += qty * price;
    }
    const double signed_qty = buy ? qty : -qty;
    position_ += signed_qty;
    if (order.sizing == Sizing::AllAvailable && !buy) position_ = 0.0;
    slippage_paid_ += std::abs(price - bar.open) * qty;

    Fill fill{order.side, qty, price, bar.open, bar.timestamp, clock_};
    fills_.push_back(fill);
    match(fill, signed_qty);
}

void SimState::match(const Fill& fill, double signed_qty) {
    double open_qty = signed_qty;
    while (open_qty != 0.0 && !lots_.empty() && (lots_.front().remaining > 0) != (open_qty > 0)) {
        Lot& lot = lots_.front();
        const double take = std::min(std::abs(lot.remaining), std::abs(open_qty));
        const bool long_lot = lot.remaining > 0;
        Trade t;
        t.entry_fill = lot.fill;
        t.exit_fill = fill;
        t.quantity = take;
        t.pnl = long_lot ? (fill.price - lot.fill.price) * take : (lot.fill.price - fill.price) * take;
        trades_.push_back(t);
        lot.remaining += long_lot ? -take : take;
        open_qty += long_lot ? take : -take;
        // Snap float dust so a fully matched lot really closes.
        if (std::abs(lot.remaining) <= 1e-12 * take) lots_.pop_front();
        if (std::abs(open_qty) <= 1e-12 * take) open_qty = 0.0;
    }
    if (open_qty != 0.0) lots_.push_back({fill, open_qty});
}

}  // namespace traderbench::sim
