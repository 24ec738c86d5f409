#pragma once

// JSON mappings for domain types. Field names are the wire/report names.
// Undefined optionals are null; infinities are the string "inf".

#include <json.hpp>

#include "traderbench/agents.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/marketdata.hpp"
#include "traderbench/options.hpp"
#include "traderbench/riskmetrics.hpp"
#include "traderbench/scoring.hpp"
#include "traderbench/tradingsim.hpp"
#include "traderbench/transforms.hpp"

namespace traderbench {

using json = nlohmann::json;

/// Sorted keys, compact. The comparison form for equality-checked payloads.
std::string canonical(const json& j);

json number_or_inf(double v);
double read_number_or_inf(const json& j, const char* field);

json to_json(const Candle& c);
Candle candle_from_json(const json& j);
json candles_to_json(std::span<const Candle> candles);

json to_json(const sim::Order& o);
json to_json(const sim::Fill& f);
json to_json(const sim::Trade& t);
json to_json(const sim::Rejection& r);

json to_json(const risk::RiskReport& r);
risk::RiskReport risk_report_from_json(const json& j);

json to_json(const options::Greeks& g);
options::Greeks greeks_from_json(const json& j);
json to_json(const options::StrategyPnL& p);
options::StrategyPnL strategy_pnl_from_json(const json& j);
json to_json(const options::OptionLeg& leg);
options::OptionLeg option_leg_from_json(const json& j);
json to_json(const options::OptionInputs& in);
/// `require_vol` = false for implied-vol requests, which carry a price instead.
options::OptionInputs option_inputs_from_json(const json& j, bool require_vol = true);

json to_json(const transforms::TransformParams& p);
transforms::TransformParams transform_params_from_json(const json& j);
json to_json(const transforms::TransformSpec& s);
transforms::TransformSpec transform_spec_from_json(const json& j);
json to_json(const transforms::InjectionSite& s);

json to_json(const fixtures::FixtureSpec& s);
fixtures::FixtureSpec fixture_spec_from_json(const json& j);

json to_json(const scoring::SectionScore& s);
json to_json(const scoring::OverallScore& o);

/// Field accessors that raise BadArguments naming the field.
double require_number(const json& obj, const char* field);
std::string require_string(const json& obj, const char* field);
std::int64_t require_integer(const json& obj, const char* field);

}  // namespace traderbench
