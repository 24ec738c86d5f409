#pragma once

// Tool server and task exchange over HTTP+JSON.
//
// POST /tools/call  {tool, arguments, session, clock}
//   -> {ok: true, result} | {ok: false, error: {code, message}}
// GET  /tools/list  -> {tools: [names]}
// POST /task        TaskMessage -> ResponseMessage (candidate side)

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "traderbench/agents.hpp"
#include "traderbench/error.hpp"
#include "traderbench/json_io.hpp"
#include "traderbench/marketdata.hpp"
#include "traderbench/tradingsim.hpp"

namespace httplib {
class Server;
}

namespace traderbench::protocol {

struct ToolCall {
    std::string tool;
    json arguments = json::object();
    std::string session;  // empty when not session-bound
    std::optional<Timestamp> clock;
};

json to_json(const ToolCall& c);
/// Throws BadArguments on a malformed envelope.
ToolCall tool_call_from_json(const json& j);

json ok_envelope(json result);
json error_envelope(ErrorCode code, const std::string& message);
int http_status(ErrorCode code) noexcept;

sim::Order order_from_json(const json& j);

/// Base series by symbol. Filled before serving, read-only afterwards.
class MarketStore {
public:
    void add(CandleSeries series);
    /// Throws UnknownSymbol.
    const CandleSeries& get(const std::string& symbol) const;
    bool contains(const std::string& symbol) const;
    std::vector<std::string> symbols() const;

private:
    mutable std::shared_mutex mu_;
    std::map<std::string, CandleSeries> series_;
};

/// Sessions own one SimState each; access is serialized per session.
class SessionStore {
public:
    /// Uses `id` when given (InvalidConfig if taken); otherwise "session-N".
    std::string open(CandleSeries series, sim::SimConfig config, std::string id = {});
    bool contains(const std::string& id) const;
    void close(const std::string& id);

    /// Runs fn(SimState&) under the session's lock. Throws SessionNotFound.
    template <typename Fn>
    auto with_session(const std::string& id, Fn&& fn) {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        return fn(s->sim);
    }

private:
    struct Slot {
        explicit Slot(sim::SimState s) : sim(std::move(s)) {}
        std::mutex mu;
        sim::SimState sim;
    };
    std::shared_ptr<Slot> find(const std::string& id) const;

    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::uint64_t next_ = 1;
};

struct ToolOptions {
    bool strict_lookahead = true;  // false: truncate at the clock instead of refusing
};

/// Name -> handler table. Handlers return the bare result and throw Error.
class ToolRegistry {
public:
    using Handler = std::function<json(const ToolCall&)>;

    void add(std::string name, Handler handler);
    std::vector<std::string> names() const;
    bool contains(const std::string& name) const;

    /// Never throws; failures become error envelopes.
    json call(const ToolCall& call) const;
    /// Throws ToolNotFound or the handler's Error.
    json call_result(const ToolCall& call) const;

private:
    std::map<std::string, Handler> tools_;
};

/// market.*, options.*, trading.* over the given stores.
ToolRegistry default_registry(std::shared_ptr<MarketStore> markets,
                              std::shared_ptr<SessionStore> sessions, ToolOptions options = {});

/// Runs an HTTP server on a background thread; stops on destruction.
class HttpService {
public:
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;
    virtual ~HttpService();

    int port() const noexcept { return port_; }
    std::string endpoint() const;
    void stop();

protected:
    HttpService();
    /// Binds to host:port (0 = any free port) and starts serving. Throws Io.
    void start(const std::string& host, int port);
    httplib::Server& server() { return *server_; }

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::string host_;
    int port_ = 0;
};

class ToolServer : public HttpService {
public:
    explicit ToolServer(std::shared_ptr<const ToolRegistry> registry, const std::string& host = "127.0.0.1",
                        int port = 0);

private:
    std::shared_ptr<const ToolRegistry> registry_;
};

class ToolClient {
public:
    /// `endpoint` like "http://127.0.0.1:8080".
    explicit ToolClient(std::string endpoint, int timeout_seconds = 30);

    /// Returns the envelope. Throws Io when the server is unreachable.
    json call(const ToolCall& call) const;
    /// Unwraps the envelope; an error envelope is rethrown as Error.
    json call_result(const ToolCall& call) const;
    std::vector<std::string> list() const;

private:
    std::string endpoint_;
    int timeout_;
};

// ---------------------------------------------------------------------------
// Task exchange

struct TaskMessage {
    std::string task_id;
    std::string section;  // section name, e.g. "crypto"
    json payload = json::object();
    std::string tool_endpoint;
    int deadline_seconds = 60;
};

struct ResponseMessage {
    std::string task_id;
    json answer = json::object();
    std::vector<json> trace;  // {tool, ok[, code]} per tool call
};

json to_json(const TaskMessage& t);
TaskMessage task_message_from_json(const json& j);
json to_json(const ResponseMessage& r);
/// Throws MalformedResponse.
ResponseMessage response_message_from_json(const json& j);

/// Synchronous POST /task. Throws Timeout (including deadline <= 0),
/// MalformedResponse (bad JSON, wrong task_id) or Io.
ResponseMessage send_task(const std::string& candidate_endpoint, const TaskMessage& task);

using TaskHandler = std::function<ResponseMessage(const TaskMessage&)>;

class CandidateServer : public HttpService {
public:
    explicit CandidateServer(TaskHandler handler, const std::string& host = "127.0.0.1", int port = 0);

private:
    TaskHandler handler_;
};

/// Scripted candidate that works only through the tool endpoint.
/// crypto payload: {session[, agent: {name, params}]} -> trades the session
/// to the end with that agent (else `fallback`) and answers
/// {session, risk_report}.
/// options payload: {spot, rate, vol, legs} -> answers {greeks, strategy_pnl}
/// computed with options.* tools.
ResponseMessage scripted_candidate(const TaskMessage& task,
                                   const agents::AgentSpec& fallback = {"buyhold", {}});

}  // namespace traderbench::protocol
