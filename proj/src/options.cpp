#include "traderbench/options.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "traderbench/error.hpp"

namespace traderbench::options {

std::string_view right_name(Right r) noexcept { return r == Right::Call ? "call" : "put"; }

std::optional<Right> parse_right(std::string_view s) noexcept {
    if (s == "call") return Right::Call;
    if (s == "put") return Right::Put;
    return std::nullopt;
}

std::string_view position_name(Position p) noexcept { return p == Position::Long ? "long" : "short"; }

std::optional<Position> parse_position(std::string_view s) noexcept {
    if (s == "long") return Position::Long;
    if (s == "short") return Position::Short;
    return std::nullopt;
}

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

void check(const OptionInputs& in) {
    const bool ok = std::isfinite(in.spot) && std::isfinite(in.strike) && std::isfinite(in.rate) &&
                    std::isfinite(in.vol) && std::isfinite(in.expiry_years) && in.spot > 0 &&
                    in.strike > 0 && in.expiry_years > 0 && in.vol >= 0;
    if (!ok) fail(ErrorCode::InvalidInput, "need spot, strike, expiry > 0 and vol >= 0 (all finite)");
}

struct D {
    double d1;
    double d2;
    double sqrt_t;
    double discount;
};

D d_terms(const OptionInputs& in) {
    const double sqrt_t = std::sqrt(in.expiry_years);
    const double sv = in.vol * sqrt_t;
    const double d1 = (std::log(in.spot / in.strike) + (in.rate + 0.5 * in.vol * in.vol) * in.expiry_years) / sv;
    return {d1, d1 - sv, sqrt_t, std::exp(-in.rate * in.expiry_years)};
}

}  // namespace

double bs_price(const OptionInputs& in) {
    check(in);
    const double pv_strike = in.strike * std::exp(-in.rate * in.expiry_years);
    if (in.vol < kMinVol) {
        const double fwd_intrinsic = in.right == Right::Call ? in.spot - pv_strike : pv_strike - in.spot;
        return std::max(fwd_intrinsic, 0.0);
    }
    const D d = d_terms(in);
    if (in.right == Right::Call) return in.spot * norm_cdf(d.d1) - pv_strike * norm_cdf(d.d2);
    return pv_strike * norm_cdf(-d.d2) - in.spot * norm_cdf(-d.d1);
}

Greeks bs_greeks(const OptionInputs& in) {
    check(in);
    if (in.vol <= kMinVol) fail(ErrorCode::ZeroVol, "greeks undefined at zero volatility");
    const D d = d_terms(in);
    const double pdf = norm_pdf(d.d1);
    Greeks g;
    g.gamma = pdf / (in.spot * in.vol * d.sqrt_t);
    g.vega = in.spot * pdf * d.sqrt_t;
    const double decay = -in.spot * pdf * in.vol / (2.0 * d.sqrt_t);
    if (in.right == Right::Call) {
        g.delta = norm_cdf(d.d1);
        g.theta = decay - in.rate * in.strike * d.discount * norm_cdf(d.d2);
    } else {
        g.delta = norm_cdf(d.d1) - 1.0;
        g.theta = decay + in.rate * in.strike * d.discount * norm_cdf(-d.d2);
    }
    return g;
}

double implied_vol(double price, const OptionInputs& in) {
    OptionInputs probe = in;
    probe.vol = kIvLow;
    check(probe);
    const double pv_strike = in.strike * std::exp(-in.rate * in.expiry_years);
    const bool call = in.right == Right::Call;
    const double lower = std::max(call ? in.spot - pv_strike : pv_strike - in.spot, 0.0);
    const double upper = call ? in.spot : pv_strike;
    if (!std::isfinite(price) || price < lower || price > upper)
        fail(ErrorCode::PriceOutOfBounds, "price outside no-arbitrage bounds [" +
                                              std::to_string(lower) + ", " + std::to_string(upper) + "]");
    auto value = [&](double vol) {
        probe.vol = vol;
        return bs_price(probe);
    };
    double lo = kIvLow;
    double hi = kIvHigh;
    if (price < value(lo) - kIvPriceTolerance || price > value(hi) + kIvPriceTolerance)
        fail(ErrorCode::NoConvergence, "price not bracketed by vol in [1e-6, 5]");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < kIvMaxIterations; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket exhausted at double precision
        if (value(mid) < price) lo = mid;
        else hi = mid;
    }
    if (std::abs(value(mid) - price) > kIvPriceTolerance)
        fail(ErrorCode::NoConvergence, "implied vol bisection did not reach tolerance");
    return mid;
}

double strategy_payoff(std::span<const OptionLeg> legs, double x) {
    double total = 0.0;
    for (const auto& leg : legs) {
        const double intrinsic =
            leg.right == Right::Call ? std::max(x - leg.strike, 0.0) : std::max(leg.strike - x, 0.0);
        const double sign = leg.side == Position::Long ? 1.0 : -1.0;
        total += sign * leg.quantity * (intrinsic - leg.premium);
    }
    return total;
}

StrategyPnL strategy_pnl(std::span<const OptionLeg> legs) {
    if (legs.empty()) fail(ErrorCode::EmptyLegs, "strategy needs at least one leg");
    for (const auto& leg : legs) {
        if (!(leg.strike > 0 && leg.expiry_years > 0 && leg.quantity > 0 && leg.premium >= 0))
            fail(ErrorCode::InvalidInput, "leg needs strike, expiry, quantity > 0 and premium >= 0");
        if (leg.expiry_years != legs.front().expiry_years)
            fail(ErrorCode::MixedExpiries, "all legs must share one expiry");
    }
    std::vector<double> kinks{0.0};
    for (const auto& leg : legs) kinks.push_back(leg.strike);
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

    std::vector<double> values;
    values.reserve(kinks.size());
    for (double k : kinks) values.push_back(strategy_payoff(legs, k));
    double tail_slope = 0.0;
    for (const auto& leg : legs)
        if (leg.right == Right::Call) tail_slope += (leg.side == Position::Long ? 1.0 : -1.0) * leg.quantity;

    constexpr double inf = std::numeric_limits<double>::infinity();
    StrategyPnL out;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.max_profit = tail_slope > 0 ? inf : *hi + 0.0;
    out.max_loss = tail_slope < 0 ? inf : -*lo + 0.0;

    auto sign = [](double v) { return (v > 0) - (v < 0); };
    for (std::size_t i = 0; i < kinks.size(); ++i) {
        const double a = values[i];
        const bool last = i + 1 == kinks.size();
        const double b = last ? a + tail_slope : values[i + 1];  // one unit right for the tail
        if (a == 0.0 && b == 0.0) continue;  // flat at zero: no isolated root
        if (a == 0.0) {
            out.breakevens.push_back(kinks[i]);
            continue;
        }
        if (last) {
            if (tail_slope != 0.0 && sign(a) != sign(tail_slope)) out.breakevens.push_back(kinks[i] - a / tail_slope);
        } else if (b != 0.0 && sign(a) != sign(b)) {
            out.breakevens.push_back(kinks[i] + (kinks[i + 1] - kinks[i]) * a / (a - b));
        }
    }
    std::sort(out.breakevens.begin(), out.breakevens.end());
    return out;
}

bool greek_within_tolerance(double reported, double truth) noexcept {
    if (!std::isfinite(reported)) return false;
    const double err = std::abs(reported - truth);
    if (std::abs(truth) < kGreekSmallTruth) return err <= kGreekAbsTolerance;
    return err <= kGreekTolerance * std::abs(truth);
}

double score_greeks(const Greeks& reported, const Greeks& truth) {
    double score = 0.0;
    if (greek_within_tolerance(reported.delta, truth.delta)) score += 25.0;
    if (greek_within_tolerance(reported.gamma, truth.gamma)) score += 25.0;
    if (greek_within_tolerance(reported.theta, truth.theta)) score += 25.0;
    if (greek_within_tolerance(reported.vega, truth.vega)) score += 25.0;
    return score;
}

namespace {

bool pnl_close(double reported, double truth) {
    if (std::isinf(truth)) return std::isinf(reported) && (reported > 0) == (truth > 0);
    if (!std::isfinite(reported)) return false;
    return std::abs(reported - truth) <= kPnlTolerance * std::max(std::abs(truth), 1e-6);
}

}  // namespace

double score_pnl(const StrategyPnL& reported, const StrategyPnL& truth) {
    double items = 0.0;
    if (pnl_close(reported.max_profit, truth.max_profit)) items += 1.0;
    if (pnl_close(reported.max_loss, truth.max_loss)) items += 1.0;

    const std::size_t denom = std::max(truth.breakevens.size(), reported.breakevens.size());
    if (denom == 0) {
        items += 1.0;
    } else {
        std::vector<bool> used(reported.breakevens.size(), false);
        std::size_t matched = 0;
        for (double b : truth.breakevens) {
            for (std::size_t j = 0; j < reported.breakevens.size(); ++j) {
                if (!used[j] && pnl_close(reported.breakevens[j], b)) {
                    used[j] = true;
                    ++matched;
                    break;
                }
            }
        }
        items += static_cast<double>(matched) / static_cast<double>(denom);
    }
    return 100.0 * items / 3.0;
}

namespace {

template <typename Out, typename Fn>
std::vector<Out> parallel_map(std::span<const OptionInputs> inputs, Fn fn) {
    std::vector<Out> out(inputs.size());
    std::exception_ptr error;
    const auto n = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(inputs[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical(tb_options_batch_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace

std::vector<double> price_batch(std::span<const OptionInputs> inputs) {
    return parallel_map<double>(inputs, [](const OptionInputs& in) { return bs_price(in); });
}

std::vector<double> price_batch_serial(std::span<const OptionInputs> inputs) {
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(bs_price(in));
    return out;
}

std::vector<Greeks> greeks_batch(std::span<const OptionInputs> inputs) {
    return parallel_map<Greeks>(inputs, [](const OptionInputs& in) { return bs_greeks(in); });
}

std::vector<Greeks> greeks_batch_serial(std::span<const OptionInputs> inputs) {
    std::vector<Greeks> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(bs_greeks(in));
    return out;
}

}  // namespace traderbench::options
