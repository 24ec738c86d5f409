#include "traderbench/protocol.hpp"

#include <httplib.h>

#include <algorithm>

#include "traderbench/agents.hpp"
#include "traderbench/options.hpp"
#include "traderbench/riskmetrics.hpp"
#include "traderbench/transforms.hpp"

namespace traderbench::protocol {

using traderbench::to_json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    fail(ErrorCode::BadArguments, field + ": " + why);
}

const json& args_of(const ToolCall& c) { return c.arguments; }

std::optional<std::int64_t> opt_integer(const json& j, const char* field) {
    if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
    return require_integer(j, field);
}

double number_or(const json& j, const char* field, double fallback) {
    if (!j.contains(field) || j.at(field).is_null()) return fallback;
    return require_number(j, field);
}

}  // namespace

// ---------------------------------------------------------------------------
// envelopes

json to_json(const ToolCall& c) {
    json j = {{"tool", c.tool}, {"arguments", c.arguments}};
    j["session"] = c.session.empty() ? json(nullptr) : json(c.session);
    j["clock"] = c.clock ? json(*c.clock) : json(nullptr);
    return j;
}

ToolCall tool_call_from_json(const json& j) {
    if (!j.is_object()) bad("request", "expected a JSON object");
    ToolCall c;
    c.tool = require_string(j, "tool");
    if (j.contains("arguments") && !j.at("arguments").is_null()) {
        if (!j.at("arguments").is_object()) bad("arguments", "expected an object");
        c.arguments = j.at("arguments");
    }
    if (j.contains("session") && !j.at("session").is_null()) c.session = require_string(j, "session");
    c.clock = opt_integer(j, "clock");
    return c;
}

json ok_envelope(json result) { return {{"ok", true}, {"result", std::move(result)}}; }

json error_envelope(ErrorCode code, const std::string& message) {
    return {{"ok", false}, {"error", {{"code", code_name(code)}, {"message", message}}}};
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ToolNotFound:
        case ErrorCode::SessionNotFound:
        case ErrorCode::UnknownSymbol: return 404;
        case ErrorCode::Lookahead: return 403;
        case ErrorCode::Timeout: return 504;
        case ErrorCode::Internal:
        case ErrorCode::Io: return 500;
        default: return 400;
    }
}

sim::Order order_from_json(const json& j) {
    const auto side = sim::parse_side(require_string(j, "side"));
    if (!side) bad("side", "expected \"buy\" or \"sell\"");
    sim::Order o;
    o.side = *side;
    if (!j.contains("quantity")) bad("quantity", "missing");
    const json& q = j.at("quantity");
    if (q.is_string() && q.get<std::string>() == "all") {
        o.sizing = sim::Sizing::AllAvailable;
    } else {
        o.quantity = require_number(j, "quantity");
        if (!(o.quantity > 0)) bad("quantity", "must be positive or \"all\"");
    }
    if (auto at = opt_integer(j, "submitted_at")) o.submitted_at = *at;
    return o;
}

// ---------------------------------------------------------------------------
// stores

void MarketStore::add(CandleSeries series) {
    std::unique_lock lock(mu_);
    const std::string symbol = series.symbol();
    series_.insert_or_assign(symbol, std::move(series));
}

const CandleSeries& MarketStore::get(const std::string& symbol) const {
    std::shared_lock lock(mu_);
    auto it = series_.find(symbol);
    if (it == series_.end()) fail(ErrorCode::UnknownSymbol, "unknown symbol '" + symbol + "'");
    return it->second;
}

bool MarketStore::contains(const std::string& symbol) const {
    std::shared_lock lock(mu_);
    return series_.contains(symbol);
}

std::vector<std::string> MarketStore::symbols() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [k, _] : series_) out.push_back(k);
    return out;
}

std::string SessionStore::open(CandleSeries series, sim::SimConfig config, std::string id) {
    auto slot = std::make_shared<Slot>(sim::SimState(std::move(series), config));
    std::unique_lock lock(mu_);
    if (id.empty()) {
        do id = "session-" + std::to_string(next_++);
        while (sessions_.contains(id));
    } else if (sessions_.contains(id)) {
        fail(ErrorCode::InvalidConfig, "session '" + id + "' already exists");
    }
    sessions_.emplace(id, std::move(slot));
    return id;
}

bool SessionStore::contains(const std::string& id) const {
    std::shared_lock lock(mu_);
    return sessions_.contains(id);
}

void SessionStore::close(const std::string& id) {
    std::unique_lock lock(mu_);
    if (sessions_.erase(id) == 0) fail(ErrorCode::SessionNotFound, "no session '" + id + "'");
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::SessionNotFound, "no session '" + id + "'");
    return it->second;
}

// ---------------------------------------------------------------------------
// registry

void ToolRegistry::add(std::string name, Handler handler) { tools_[std::move(name)] = std::move(handler); }

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : tools_) out.push_back(k);
    return out;
}

bool ToolRegistry::contains(const std::string& name) const { return tools_.contains(name); }

json ToolRegistry::call_result(const ToolCall& call) const {
    auto it = tools_.find(call.tool);
    if (it == tools_.end()) fail(ErrorCode::ToolNotFound, "no tool '" + call.tool + "'");
    return it->second(call);
}

json ToolRegistry::call(const ToolCall& call) const {
    try {
        return ok_envelope(call_result(call));
    } catch (const Error& e) {
        return error_envelope(e.code(), e.what());
    } catch (const json::exception& e) {
        return error_envelope(ErrorCode::BadArguments, e.what());
    } catch (const std::exception& e) {
        return error_envelope(ErrorCode::Internal, e.what());
    }
}

namespace {

json candles_between(const CandleSeries& s, Timestamp start, Timestamp last) {
    const auto& cs = s.candles();
    auto lo = std::lower_bound(cs.begin(), cs.end(), start,
                               [](const Candle& c, Timestamp t) { return c.timestamp < t; });
    auto hi = std::upper_bound(cs.begin(), cs.end(), last,
                               [](Timestamp t, const Candle& c) { return t < c.timestamp; });
    if (hi < lo) hi = lo;
    return candles_to_json(std::span<const Candle>(cs.data() + (lo - cs.begin()), static_cast<std::size_t>(hi - lo)));
}

std::vector<options::OptionLeg> legs_from(const json& args) {
    if (!args.contains("legs") || !args.at("legs").is_array()) bad("legs", "expected an array");
    std::vector<options::OptionLeg> legs;
    for (const auto& l : args.at("legs")) legs.push_back(option_leg_from_json(l));
    return legs;
}

const std::string& require_session(const ToolCall& c) {
    if (c.session.empty()) fail(ErrorCode::SessionNotFound, "tool needs a session");
    return c.session;
}

json portfolio_of(const sim::SimState& s) {
    return {{"cash", s.cash()},   {"position", s.position()}, {"equity", s.equity()},
            {"clock", s.clock()}, {"finished", s.finished()}, {"pending", s.pending().size()}};
}

}  // namespace

ToolRegistry default_registry(std::shared_ptr<MarketStore> markets, std::shared_ptr<SessionStore> sessions,
                              ToolOptions opts) {
    ToolRegistry reg;

    reg.add("market.symbols", [markets](const ToolCall&) { return json{{"symbols", markets->symbols()}}; });

    reg.add("market.get_candles", [markets, sessions, opts](const ToolCall& c) {
        const json& a = args_of(c);
        // Session-bound reads see the session's (transformed) series and can
        // never look past the session clock.
        std::optional<CandleSeries> session_series;
        std::optional<Timestamp> ceiling;
        if (!c.session.empty()) {
            sessions->with_session(c.session, [&](sim::SimState& s) {
                session_series = s.series();
                ceiling = s.clock();
            });
            if (a.contains("symbol") && require_string(a, "symbol") != session_series->symbol())
                bad("symbol", "session trades '" + session_series->symbol() + "'");
        }
        Timestamp clock;
        if (c.clock) {
            clock = *c.clock;
            if (ceiling && clock > *ceiling) {
                if (opts.strict_lookahead)
                    fail(ErrorCode::Lookahead, "clock " + std::to_string(clock) + " is past the session clock " +
                                                   std::to_string(*ceiling));
                clock = *ceiling;
            }
        } else if (ceiling) {
            clock = *ceiling;
        } else {
            bad("clock", "required for market data");
        }
        const CandleSeries& s = session_series ? *session_series : markets->get(require_string(a, "symbol"));
        const Timestamp start = opt_integer(a, "start").value_or(s.front().timestamp);
        Timestamp end = opt_integer(a, "end").value_or(clock);
        if (end > clock) {
            if (opts.strict_lookahead)
                fail(ErrorCode::Lookahead,
                     "end " + std::to_string(end) + " is past the clock " + std::to_string(clock));
            end = clock;
        }
        return json{{"symbol", s.symbol()},
                    {"interval_seconds", s.interval_seconds()},
                    {"candles", candles_between(s, start, end)}};
    });

    reg.add("options.price", [](const ToolCall& c) {
        return json{{"price", options::bs_price(option_inputs_from_json(args_of(c)))}};
    });
    reg.add("options.greeks", [](const ToolCall& c) {
        return to_json(options::bs_greeks(option_inputs_from_json(args_of(c))));
    });
    reg.add("options.implied_vol", [](const ToolCall& c) {
        const auto in = option_inputs_from_json(args_of(c), false);
        return json{{"implied_vol", options::implied_vol(require_number(args_of(c), "price"), in)}};
    });
    reg.add("options.strategy_pnl", [](const ToolCall& c) {
        const auto legs = legs_from(args_of(c));
        return to_json(options::strategy_pnl(legs));
    });

    reg.add("trading.open_session", [markets, sessions](const ToolCall& c) {
        const json& a = args_of(c);
        CandleSeries series = markets->get(require_string(a, "symbol"));
        if (a.contains("transform") && !a.at("transform").is_null())
            series = transforms::apply_transform(series, transform_spec_from_json(a.at("transform")));
        sim::SimConfig cfg;
        cfg.initial_cash = number_or(a, "initial_cash", cfg.initial_cash);
        cfg.slippage_bps = number_or(a, "slippage_bps", cfg.slippage_bps);
        if (a.contains("allow_short")) {
            if (!a.at("allow_short").is_boolean()) bad("allow_short", "expected a boolean");
            cfg.allow_short = a.at("allow_short").get<bool>();
        }
        const std::string symbol = series.symbol();
        const std::size_t bars = series.size();
        const Timestamp first = series.front().timestamp;
        const std::string id = sessions->open(std::move(series), cfg, c.session);
        return json{{"session", id}, {"symbol", symbol}, {"bars", bars}, {"clock", first}};
    });

    reg.add("trading.submit_order", [sessions](const ToolCall& c) {
        const auto order = order_from_json(args_of(c));
        return sessions->with_session(require_session(c), [&](sim::SimState& s) {
            s.submit(order);
            return json{{"accepted", true}, {"pending", s.pending().size()}};
        });
    });

    reg.add("trading.step", [sessions](const ToolCall& c) {
        return sessions->with_session(require_session(c), [&](sim::SimState& s) {
            const std::size_t fills_before = s.fills().size();
            const std::size_t rejections_before = s.rejections().size();
            s.step();
            json fills = json::array(), rejections = json::array();
            for (std::size_t i = fills_before; i < s.fills().size(); ++i) fills.push_back(to_json(s.fills()[i]));
            for (std::size_t i = rejections_before; i < s.rejections().size(); ++i)
                rejections.push_back(to_json(s.rejections()[i]));
            return json{{"clock", s.clock()},
                        {"finished", s.finished()},
                        {"fills", fills},
                        {"rejections", rejections}};
        });
    });

    reg.add("trading.portfolio", [sessions](const ToolCall& c) {
        return sessions->with_session(require_session(c), [](sim::SimState& s) { return portfolio_of(s); });
    });

    reg.add("trading.trades", [sessions](const ToolCall& c) {
        return sessions->with_session(require_session(c), [](sim::SimState& s) {
            json trades = json::array();
            for (const auto& t : s.closed_trades()) trades.push_back(to_json(t));
            return json{{"trades", trades}};
        });
    });

    reg.add("trading.risk_report", [sessions](const ToolCall& c) {
        return sessions->with_session(require_session(c), [](sim::SimState& s) {
            const auto eq = s.equity_values();
            return to_json(risk::risk_report(eq, s.closed_trades(),
                                             risk::periods_per_year(s.series().interval_seconds())));
        });
    });

    return reg;
}

// ---------------------------------------------------------------------------
// HTTP plumbing

HttpService::HttpService() : server_(std::make_unique<httplib::Server>()) {}

HttpService::~HttpService() { stop(); }

void HttpService::start(const std::string& host, int port) {
    host_ = host;
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        if (port_ <= 0) fail(ErrorCode::Io, "could not bind " + host);
    } else {
        if (!server_->bind_to_port(host, port))
            fail(ErrorCode::Io, "could not bind " + host + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void HttpService::stop() {
    if (thread_.joinable()) {
        server_->stop();
        thread_.join();
    }
}

std::string HttpService::endpoint() const { return "http://" + host_ + ":" + std::to_string(port_); }

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

ToolServer::ToolServer(std::shared_ptr<const ToolRegistry> registry, const std::string& host, int port)
    : registry_(std::move(registry)) {
    server().Post("/tools/call", [this](const httplib::Request& req, httplib::Response& res) {
        ToolCall call;
        try {
            call = tool_call_from_json(json::parse(req.body));
        } catch (const Error& e) {
            reply(res, 400, error_envelope(e.code(), e.what()));
            return;
        } catch (const json::exception& e) {
            reply(res, 400, error_envelope(ErrorCode::BadArguments, std::string("body: ") + e.what()));
            return;
        }
        const json env = registry_->call(call);
        const int status = env.at("ok").get<bool>()
                               ? 200
                               : http_status(parse_code(env.at("error").at("code").get<std::string>()));
        reply(res, status, env);
    });
    server().Get("/tools/list", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, json{{"tools", registry_->names()}});
    });
    start(host, port);
}

ToolClient::ToolClient(std::string endpoint, int timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_(timeout_seconds) {}

namespace {

httplib::Client make_client(const std::string& endpoint, int timeout) {
    httplib::Client cli(endpoint);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli;
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        fail(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
    }
}

}  // namespace

json ToolClient::call(const ToolCall& call) const {
    auto cli = make_client(endpoint_, timeout_);
    auto res = cli.Post("/tools/call", to_json(call).dump(), "application/json");
    if (!res) fail(ErrorCode::Io, "tool server unreachable at " + endpoint_ + ": " + httplib::to_string(res.error()));
    return parse_body(res->body);
}

json ToolClient::call_result(const ToolCall& c) const {
    const json env = call(c);
    if (!env.is_object() || !env.contains("ok")) fail(ErrorCode::MalformedResponse, "bad envelope");
    if (env.at("ok").get<bool>()) return env.at("result");
    const auto& err = env.at("error");
    throw Error(parse_code(err.at("code").get<std::string>()), err.at("message").get<std::string>());
}

std::vector<std::string> ToolClient::list() const {
    auto cli = make_client(endpoint_, timeout_);
    auto res = cli.Get("/tools/list");
    if (!res) fail(ErrorCode::Io, "tool server unreachable at " + endpoint_);
    return parse_body(res->body).at("tools").get<std::vector<std::string>>();
}

// ---------------------------------------------------------------------------
// task exchange

json to_json(const TaskMessage& t) {
    return {{"task_id", t.task_id},
            {"section", t.section},
            {"payload", t.payload},
            {"tool_endpoint", t.tool_endpoint},
            {"deadline_seconds", t.deadline_seconds}};
}

TaskMessage task_message_from_json(const json& j) {
    TaskMessage t;
    t.task_id = require_string(j, "task_id");
    t.section = require_string(j, "section");
    if (j.contains("payload")) t.payload = j.at("payload");
    if (j.contains("tool_endpoint")) t.tool_endpoint = require_string(j, "tool_endpoint");
    t.deadline_seconds = static_cast<int>(require_integer(j, "deadline_seconds"));
    return t;
}

json to_json(const ResponseMessage& r) {
    return {{"task_id", r.task_id}, {"answer", r.answer}, {"trace", r.trace}};
}

ResponseMessage response_message_from_json(const json& j) {
    if (!j.is_object() || !j.contains("task_id") || !j.at("task_id").is_string() || !j.contains("answer"))
        fail(ErrorCode::MalformedResponse, "response needs task_id and answer");
    ResponseMessage r;
    r.task_id = j.at("task_id").get<std::string>();
    r.answer = j.at("answer");
    if (j.contains("trace")) {
        if (!j.at("trace").is_array()) fail(ErrorCode::MalformedResponse, "trace must be an array");
        for (const auto& t : j.at("trace")) r.trace.push_back(t);
    }
    return r;
}

ResponseMessage send_task(const std::string& candidate_endpoint, const TaskMessage& task) {
    if (task.deadline_seconds <= 0)
        fail(ErrorCode::Timeout, "task " + task.task_id + ": deadline of " +
                                     std::to_string(task.deadline_seconds) + " s has already passed");
    httplib::Client cli(candidate_endpoint);
    cli.set_connection_timeout(task.deadline_seconds);
    cli.set_read_timeout(task.deadline_seconds);
    cli.set_write_timeout(task.deadline_seconds);
    auto res = cli.Post("/task", to_json(task).dump(), "application/json");
    if (!res) {
        if (res.error() == httplib::Error::Read || res.error() == httplib::Error::ConnectionTimeout)
            fail(ErrorCode::Timeout, "task " + task.task_id + ": no response within " +
                                         std::to_string(task.deadline_seconds) + " s");
        fail(ErrorCode::Io, "candidate unreachable at " + candidate_endpoint + ": " +
                                httplib::to_string(res.error()));
    }
    if (res->status != 200)
        fail(ErrorCode::MalformedResponse, "candidate answered HTTP " + std::to_string(res->status));
    auto r = response_message_from_json(parse_body(res->body));
    if (r.task_id != task.task_id)
        fail(ErrorCode::MalformedResponse, "task_id mismatch: sent " + task.task_id + ", got " + r.task_id);
    return r;
}

CandidateServer::CandidateServer(TaskHandler handler, const std::string& host, int port)
    : handler_(std::move(handler)) {
    server().Post("/task", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto task = task_message_from_json(json::parse(req.body));
            reply(res, 200, to_json(handler_(task)));
        } catch (const Error& e) {
            reply(res, http_status(e.code()), error_envelope(e.code(), e.what()));
        } catch (const std::exception& e) {
            reply(res, 400, error_envelope(ErrorCode::BadArguments, e.what()));
        }
    });
    start(host, port);
}

// ---------------------------------------------------------------------------
// scripted candidate

namespace {

class TracingClient {
public:
    explicit TracingClient(const TaskMessage& task) : client_(task.tool_endpoint, task.deadline_seconds) {}

    json call(ToolCall c) {
        const json env = client_.call(c);
        json entry = {{"tool", c.tool}, {"ok", env.value("ok", false)}};
        if (!entry["ok"].get<bool>()) entry["code"] = env.at("error").at("code");
        trace_.push_back(entry);
        if (!env.value("ok", false)) {
            const auto& err = env.at("error");
            throw Error(parse_code(err.at("code").get<std::string>()), err.at("message").get<std::string>());
        }
        return env.at("result");
    }

    std::vector<json> take_trace() { return std::move(trace_); }

private:
    ToolClient client_;
    std::vector<json> trace_;
};

json trade_session(TracingClient& tc, const json& payload, const agents::AgentSpec& fallback) {
    const std::string session = require_string(payload, "session");
    agents::AgentSpec spec = fallback;
    if (payload.contains("agent")) {
        const json& a = payload.at("agent");
        spec = {require_string(a, "name"), {}};
        if (a.contains("params"))
            for (const auto& [k, v] : a.at("params").items()) spec.params[k] = v.get<double>();
    }
    const auto agent = agents::make_agent(spec);

    std::vector<Candle> window;
    while (true) {
        const json pf = tc.call({"trading.portfolio", json::object(), session, std::nullopt});
        if (pf.at("finished").get<bool>()) break;
        const Timestamp clock = pf.at("clock").get<Timestamp>();
        // Fetch only bars not yet seen.
        json args = json::object();
        if (!window.empty()) args["start"] = window.back().timestamp + 1;
        const json got = tc.call({"market.get_candles", args, session, clock});
        for (const auto& c : got.at("candles")) window.push_back(candle_from_json(c));
        const auto d = agent.decide(window, {pf.at("cash").get<double>(), pf.at("position").get<double>()});
        for (const auto& o : d.orders) tc.call({"trading.submit_order", to_json(o), session, clock});
        tc.call({"trading.step", json::object(), session, std::nullopt});
    }
    return {{"session", session},
            {"risk_report", tc.call({"trading.risk_report", json::object(), session, std::nullopt})}};
}

json answer_options(TracingClient& tc, const json& payload) {
    const double spot = require_number(payload, "spot");
    const double rate = require_number(payload, "rate");
    const double vol = require_number(payload, "vol");
    double delta = 0, gamma = 0, theta = 0, vega = 0;
    for (const auto& leg : payload.at("legs")) {
        const auto l = option_leg_from_json(leg);
        const json in = {{"spot", spot},   {"strike", l.strike},           {"rate", rate},
                         {"vol", vol},     {"expiry_years", l.expiry_years}, {"right", options::right_name(l.right)}};
        const json g = tc.call({"options.greeks", in, {}, std::nullopt});
        const double w = (l.side == options::Position::Long ? 1.0 : -1.0) * l.quantity;
        delta += w * g.at("delta").get<double>();
        gamma += w * g.at("gamma").get<double>();
        theta += w * g.at("theta").get<double>();
        vega += w * g.at("vega").get<double>();
    }
    const json pnl = tc.call({"options.strategy_pnl", {{"legs", payload.at("legs")}}, {}, std::nullopt});
    return {{"greeks", {{"delta", delta}, {"gamma", gamma}, {"theta", theta}, {"vega", vega}}},
            {"strategy_pnl", pnl}};
}

}  // namespace

ResponseMessage scripted_candidate(const TaskMessage& task, const agents::AgentSpec& fallback) {
    TracingClient tc(task);
    ResponseMessage r;
    r.task_id = task.task_id;
    if (task.section == "crypto") r.answer = trade_session(tc, task.payload, fallback);
    else if (task.section == "options") r.answer = answer_options(tc, task.payload);
    else fail(ErrorCode::BadArguments, "section: scripted candidate cannot answer '" + task.section + "'");
    r.trace = tc.take_trace();
    return r;
}

}  // namespace traderbench::protocol
