#include "traderbench/json_io.hpp"

#include <cmath>
#include <limits>

#include "traderbench/error.hpp"

namespace traderbench {

std::string canonical(const json& j) {
    // nlohmann's object type is an ordered std::map, so dump() already sorts keys.
    return j.dump();
}

json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return v;
}

namespace {

[[noreturn]] void bad(const char* field, const std::string& why) {
    fail(ErrorCode::BadArguments, std::string("field '") + field + "': " + why);
}

const json& field_of(const json& obj, const char* field) {
    if (!obj.is_object()) bad(field, "arguments must be a JSON object");
    auto it = obj.find(field);
    if (it == obj.end()) bad(field, "missing");
    return *it;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_opt(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) bad(field, "expected number or null");
    return it->get<double>();
}

template <typename T>
T get_or(const json& obj, const char* field, T fallback) {
    auto it = obj.find(field);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        bad(field, "wrong type");
    }
}

}  // namespace

double read_number_or_inf(const json& j, const char* field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    }
    bad(field, "expected number or \"inf\"");
}

double require_number(const json& obj, const char* field) {
    const json& v = field_of(obj, field);
    if (!v.is_number()) bad(field, "expected number");
    return v.get<double>();
}

std::string require_string(const json& obj, const char* field) {
    const json& v = field_of(obj, field);
    if (!v.is_string()) bad(field, "expected string");
    return v.get<std::string>();
}

std::int64_t require_integer(const json& obj, const char* field) {
    const json& v = field_of(obj, field);
    if (!v.is_number_integer()) bad(field, "expected integer");
    return v.get<std::int64_t>();
}

// --- market data -----------------------------------------------------------

json to_json(const Candle& c) {
    return {{"timestamp", c.timestamp}, {"open", c.open},   {"high", c.high},
            {"low", c.low},             {"close", c.close}, {"volume", c.volume}};
}

Candle candle_from_json(const json& j) {
    Candle c;
    c.timestamp = require_integer(j, "timestamp");
    c.open = require_number(j, "open");
    c.high = require_number(j, "high");
    c.low = require_number(j, "low");
    c.close = require_number(j, "close");
    c.volume = require_number(j, "volume");
    return c;
}

json candles_to_json(std::span<const Candle> candles) {
    json arr = json::array();
    for (const auto& c : candles) arr.push_back(to_json(c));
    return arr;
}

// --- simulation ------------------------------------------------------------

json to_json(const sim::Order& o) {
    json j = {{"side", sim::side_name(o.side)}, {"submitted_at", o.submitted_at}};
    if (o.sizing == sim::Sizing::AllAvailable) j["quantity"] = "all";
    else j["quantity"] = o.quantity;
    return j;
}

json to_json(const sim::Fill& f) {
    return {{"side", sim::side_name(f.side)}, {"quantity", f.quantity}, {"price", f.price},
            {"reference", f.reference},        {"at", f.at},             {"bar", f.bar}};
}

json to_json(const sim::Trade& t) {
    return {{"entry_fill", to_json(t.entry_fill)},
            {"exit_fill", to_json(t.exit_fill)},
            {"quantity", t.quantity},
            {"pnl", t.pnl}};
}

json to_json(const sim::Rejection& r) {
    return {{"order", to_json(r.order)}, {"reason", code_name(r.reason)}, {"at", r.at}};
}

// --- risk ------------------------------------------------------------------

json to_json(const risk::RiskReport& r) {
    return {{"total_return", r.total_return}, {"sharpe", opt(r.sharpe)},
            {"sortino", opt(r.sortino)},      {"var95", opt(r.var95)},
            {"max_drawdown", r.max_drawdown}, {"win_rate", opt(r.win_rate)},
            {"n_trades", r.n_trades}};
}

risk::RiskReport risk_report_from_json(const json& j) {
    risk::RiskReport r;
    r.total_return = require_number(j, "total_return");
    r.sharpe = read_opt(j, "sharpe");
    r.sortino = read_opt(j, "sortino");
    r.var95 = read_opt(j, "var95");
    r.max_drawdown = require_number(j, "max_drawdown");
    r.win_rate = read_opt(j, "win_rate");
    r.n_trades = static_cast<std::size_t>(require_integer(j, "n_trades"));
    return r;
}

// --- options ---------------------------------------------------------------

json to_json(const options::Greeks& g) {
    return {{"delta", g.delta},
            {"gamma", g.gamma},
            {"theta", g.theta},
            {"theta_per_day", g.theta / 365.0},
            {"vega", g.vega}};
}

options::Greeks greeks_from_json(const json& j) {
    return {require_number(j, "delta"), require_number(j, "gamma"), require_number(j, "theta"),
            require_number(j, "vega")};
}

json to_json(const options::StrategyPnL& p) {
    return {{"max_profit", number_or_inf(p.max_profit)},
            {"max_loss", number_or_inf(p.max_loss)},
            {"breakevens", p.breakevens}};
}

options::StrategyPnL strategy_pnl_from_json(const json& j) {
    options::StrategyPnL p;
    p.max_profit = read_number_or_inf(field_of(j, "max_profit"), "max_profit");
    p.max_loss = read_number_or_inf(field_of(j, "max_loss"), "max_loss");
    const json& be = field_of(j, "breakevens");
    if (!be.is_array()) bad("breakevens", "expected array");
    for (const auto& v : be) {
        if (!v.is_number()) bad("breakevens", "expected numbers");
        p.breakevens.push_back(v.get<double>());
    }
    return p;
}

json to_json(const options::OptionLeg& leg) {
    return {{"right", options::right_name(leg.right)},
            {"side", options::position_name(leg.side)},
            {"strike", leg.strike},
            {"expiry_years", leg.expiry_years},
            {"quantity", leg.quantity},
            {"premium", leg.premium}};
}

options::OptionLeg option_leg_from_json(const json& j) {
    options::OptionLeg leg;
    const auto right = options::parse_right(require_string(j, "right"));
    if (!right) bad("right", "expected \"call\" or \"put\"");
    const auto side = options::parse_position(require_string(j, "side"));
    if (!side) bad("side", "expected \"long\" or \"short\"");
    leg.right = *right;
    leg.side = *side;
    leg.strike = require_number(j, "strike");
    leg.expiry_years = require_number(j, "expiry_years");
    leg.quantity = j.contains("quantity") ? require_number(j, "quantity") : 1.0;
    leg.premium = require_number(j, "premium");
    return leg;
}

json to_json(const options::OptionInputs& in) {
    return {{"spot", in.spot},   {"strike", in.strike},           {"rate", in.rate},
            {"vol", in.vol},     {"expiry_years", in.expiry_years}, {"right", options::right_name(in.right)}};
}

options::OptionInputs option_inputs_from_json(const json& j, bool require_vol) {
    options::OptionInputs in;
    in.spot = require_number(j, "spot");
    in.strike = require_number(j, "strike");
    in.rate = require_number(j, "rate");
    if (require_vol) in.vol = require_number(j, "vol");
    in.expiry_years = require_number(j, "expiry_years");
    const auto right = options::parse_right(require_string(j, "right"));
    if (!right) bad("right", "expected \"call\" or \"put\"");
    in.right = *right;
    return in;
}

// --- transforms ------------------------------------------------------------

json to_json(const transforms::TransformParams& p) {
    return {{"noise_sigma", p.noise_sigma},
            {"spike_prob", p.spike_prob},
            {"spike_mult", p.spike_mult},
            {"trend_windows", p.trend_windows},
            {"trend_len", p.trend_len},
            {"trend_drift", p.trend_drift},
            {"breakout_count", p.breakout_count},
            {"breakout_lookback", p.breakout_lookback},
            {"breakout_overshoot", p.breakout_overshoot},
            {"injection_count", p.injection_count},
            {"injection_len", p.injection_len},
            {"injection_amp", p.injection_amp},
            {"ma_fast", p.ma_fast},
            {"ma_slow", p.ma_slow},
            {"rsi_site", p.rsi_site},
            {"macd_site", p.macd_site},
            {"rsi_window", p.rsi_window},
            {"macd_fast", p.macd_fast},
            {"macd_slow", p.macd_slow},
            {"macd_signal", p.macd_signal}};
}

transforms::TransformParams transform_params_from_json(const json& j) {
    transforms::TransformParams p;
    if (j.is_null()) return p;
    if (!j.is_object()) bad("params", "expected object");
    for (const auto& [key, _] : j.items())
        if (!to_json(p).contains(key)) bad(key.c_str(), "unknown transform parameter");
    p.noise_sigma = get_or(j, "noise_sigma", p.noise_sigma);
    p.spike_prob = get_or(j, "spike_prob", p.spike_prob);
    p.spike_mult = get_or(j, "spike_mult", p.spike_mult);
    p.trend_windows = get_or(j, "trend_windows", p.trend_windows);
    p.trend_len = get_or(j, "trend_len", p.trend_len);
    p.trend_drift = get_or(j, "trend_drift", p.trend_drift);
    p.breakout_count = get_or(j, "breakout_count", p.breakout_count);
    p.breakout_lookback = get_or(j, "breakout_lookback", p.breakout_lookback);
    p.breakout_overshoot = get_or(j, "breakout_overshoot", p.breakout_overshoot);
    p.injection_count = get_or(j, "injection_count", p.injection_count);
    p.injection_len = get_or(j, "injection_len", p.injection_len);
    p.injection_amp = get_or(j, "injection_amp", p.injection_amp);
    p.ma_fast = get_or(j, "ma_fast", p.ma_fast);
    p.ma_slow = get_or(j, "ma_slow", p.ma_slow);
    p.rsi_site = get_or(j, "rsi_site", p.rsi_site);
    p.macd_site = get_or(j, "macd_site", p.macd_site);
    p.rsi_window = get_or(j, "rsi_window", p.rsi_window);
    p.macd_fast = get_or(j, "macd_fast", p.macd_fast);
    p.macd_slow = get_or(j, "macd_slow", p.macd_slow);
    p.macd_signal = get_or(j, "macd_signal", p.macd_signal);
    return p;
}

json to_json(const transforms::TransformSpec& s) {
    return {{"kind", transforms::kind_name(s.kind)}, {"seed", s.seed}, {"params", to_json(s.params)}};
}

transforms::TransformSpec transform_spec_from_json(const json& j) {
    transforms::TransformSpec s;
    const auto kind = transforms::parse_kind(require_string(j, "kind"));
    if (!kind) bad("kind", "expected baseline|noisy|meta|adversarial");
    s.kind = *kind;
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    if (j.contains("params")) s.params = transform_params_from_json(j.at("params"));
    return s;
}

json to_json(const transforms::InjectionSite& s) {
    return {{"kind", s.kind}, {"first", s.first}, {"target", s.target}, {"magnitude", s.magnitude}};
}

// --- fixtures --------------------------------------------------------------

json to_json(const fixtures::FixtureSpec& s) {
    return {{"shape", fixtures::shape_name(s.shape)},
            {"length", s.length},
            {"seed", s.seed},
            {"base_price", s.base_price},
            {"drift", s.drift},
            {"vol", s.vol},
            {"reversion", s.reversion},
            {"interval_seconds", s.interval_seconds},
            {"start", s.start},
            {"symbol", s.symbol}};
}

fixtures::FixtureSpec fixture_spec_from_json(const json& j) {
    fixtures::FixtureSpec s;
    const auto shape = fixtures::parse_shape(require_string(j, "shape"));
    if (!shape) bad("shape", "expected trend_up|trend_down|flat|v_shape|random_walk|mean_reverting");
    s.shape = *shape;
    s.length = get_or(j, "length", s.length);
    s.seed = get_or(j, "seed", s.seed);
    s.base_price = get_or(j, "base_price", s.base_price);
    s.drift = get_or(j, "drift", s.drift);
    s.vol = get_or(j, "vol", s.vol);
    s.reversion = get_or(j, "reversion", s.reversion);
    s.interval_seconds = get_or(j, "interval_seconds", s.interval_seconds);
    s.start = get_or(j, "start", s.start);
    s.symbol = get_or(j, "symbol", s.symbol);
    return s;
}

// --- scoring ---------------------------------------------------------------

json to_json(const scoring::SectionScore& s) {
    return {{"section", scoring::section_name(s.section)},
            {"score", s.score},
            {"task_count", s.task_count},
            {"breakdown", s.breakdown}};
}

json to_json(const scoring::OverallScore& o) {
    json sections = json::array();
    for (const auto& s : o.sections) sections.push_back(to_json(s));
    return {{"sections", sections}, {"weights", o.weights}, {"overall", o.overall}};
}

}  // namespace traderbench
