#include "traderbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "traderbench/error.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/protocol.hpp"
#include "traderbench/rng.hpp"

namespace traderbench::harness {

using transforms::TransformKind;

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::InvalidConfig, what); }

std::string describe(const Error& e) { return std::string(code_name(e.code())) + ": " + e.what(); }

template <typename T>
T read_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        invalid(std::string(key) + " has the wrong type");
    }
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

agents::AgentSpec agent_spec_from(const json& j) {
    agents::AgentSpec spec;
    if (j.is_string()) {
        spec.name = j.get<std::string>();
        return spec;
    }
    spec.name = require_string(j, "name");
    if (j.contains("params")) {
        if (!j.at("params").is_object()) invalid("agent params must be an object");
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) invalid("agent param '" + k + "' must be a number");
            spec.params[k] = v.get<double>();
        }
    }
    return spec;
}

OptionsTask options_task_from(const json& j) {
    OptionsTask t;
    t.id = require_string(j, "id");
    t.spot = require_number(j, "spot");
    t.rate = j.contains("rate") ? require_number(j, "rate") : 0.0;
    t.vol = require_number(j, "vol");
    if (!j.contains("legs") || !j.at("legs").is_array()) invalid("options task " + t.id + ": legs must be an array");
    for (json leg : j.at("legs")) {
        const bool has_premium = leg.contains("premium");
        if (!has_premium) leg["premium"] = 0.0;
        auto parsed = option_leg_from_json(leg);
        if (!has_premium) parsed.premium = std::numeric_limits<double>::quiet_NaN();
        t.legs.push_back(parsed);
    }
    return priced(std::move(t));
}

json to_json(const OptionsTask& t) {
    json legs = json::array();
    for (const auto& l : t.legs) legs.push_back(traderbench::to_json(l));
    return {{"id", t.id}, {"spot", t.spot}, {"rate", t.rate}, {"vol", t.vol}, {"legs", legs}};
}

const char* responder_name(Responder r) {
    switch (r) {
        case Responder::Oracle: return "oracle";
        case Responder::Empty: return "empty";
        case Responder::Perturbed: return "perturbed";
        case Responder::Endpoint: return "endpoint";
    }
    return "oracle";
}

}  // namespace

std::vector<transforms::TransformSpec> default_transforms(std::uint64_t seed) {
    std::vector<transforms::TransformSpec> out;
    for (auto k : transforms::kAllKinds) out.push_back({k, seed, {}});
    return out;
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) invalid("config must be a JSON object");
    static const std::set<std::string> known{
        "sampling_seed", "data",      "transforms",       "agents",         "candidate_endpoint",
        "slippage_bps",  "initial_cash", "options_tasks", "quotas",         "responder",
        "stub_scores",   "deadline_seconds", "parallel",  "output_path"};
    for (const auto& [k, _] : j.items())
        if (!known.contains(k)) invalid("unknown config key '" + k + "'");

    RunConfig c;
    c.sampling_seed = read_or<std::uint64_t>(j, "sampling_seed", 42);
    if (j.contains("data")) {
        if (!j.at("data").is_array()) invalid("data must be an array");
        for (const auto& d : j.at("data")) {
            DataSource src;
            src.symbol = read_or<std::string>(d, "symbol", "");
            if (d.contains("csv")) {
                std::filesystem::path p = require_string(d, "csv");
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                src.csv_path = p.string();
            } else if (d.contains("fixture")) {
                src.fixture = fixture_spec_from_json(d.at("fixture"));
            } else {
                invalid("data entries need 'csv' or 'fixture'");
            }
            c.data.push_back(std::move(src));
        }
    }
    if (j.contains("transforms")) {
        std::set<TransformKind> seen;
        for (json t : j.at("transforms")) {
            if (!t.contains("seed")) t["seed"] = c.sampling_seed;
            auto spec = transform_spec_from_json(t);
            if (!seen.insert(spec.kind).second)
                invalid("transform '" + std::string(transforms::kind_name(spec.kind)) + "' listed twice");
            c.transforms.push_back(spec);
        }
        if (seen.size() != 4) invalid("transforms must cover baseline, noisy, meta and adversarial");
        std::sort(c.transforms.begin(), c.transforms.end(),
                  [](const auto& a, const auto& b) { return a.kind < b.kind; });
    } else {
        c.transforms = default_transforms(c.sampling_seed);
    }
    if (j.contains("agents")) {
        for (const auto& a : j.at("agents")) {
            auto spec = agent_spec_from(a);
            agents::make_agent(spec);  // validate now, not mid-run
            c.agents.push_back(std::move(spec));
        }
    }
    c.candidate_endpoint = read_or<std::string>(j, "candidate_endpoint", "");
    c.slippage_bps = read_or<double>(j, "slippage_bps", c.slippage_bps);
    c.initial_cash = read_or<double>(j, "initial_cash", c.initial_cash);
    if (!(c.initial_cash > 0)) fail(ErrorCode::InvalidCash, "initial_cash must be positive");
    if (!(c.slippage_bps >= 0)) invalid("slippage_bps must be >= 0");
    if (j.contains("options_tasks")) {
        std::set<std::string> ids;
        for (const auto& t : j.at("options_tasks")) {
            auto task = options_task_from(t);
            if (!ids.insert(task.id).second) invalid("duplicate options task id '" + task.id + "'");
            c.options_tasks.push_back(std::move(task));
        }
    }
    if (j.contains("quotas")) {
        const json& q = j.at("quotas");
        if (q.contains("crypto")) c.crypto_quota = q.at("crypto").get<std::size_t>();
        if (q.contains("options")) c.options_quota = q.at("options").get<std::size_t>();
    }
    const std::string responder = read_or<std::string>(j, "responder", "oracle");
    if (responder == "oracle") c.responder = Responder::Oracle;
    else if (responder == "empty") c.responder = Responder::Empty;
    else if (responder == "perturbed") c.responder = Responder::Perturbed;
    else if (responder == "endpoint") c.responder = Responder::Endpoint;
    else invalid("responder must be oracle, empty, perturbed or endpoint");
    if (c.responder == Responder::Endpoint && c.candidate_endpoint.empty())
        invalid("responder 'endpoint' needs candidate_endpoint");
    if (j.contains("stub_scores")) {
        c.stub_strategy_score = read_or<double>(j.at("stub_scores"), "strategy", c.stub_strategy_score);
        c.stub_risk_score = read_or<double>(j.at("stub_scores"), "risk", c.stub_risk_score);
    }
    c.deadline_seconds = read_or<int>(j, "deadline_seconds", c.deadline_seconds);
    c.parallel = read_or<bool>(j, "parallel", true);
    c.output_path = read_or<std::string>(j, "output_path", "");
    if (c.data.empty() && c.options_tasks.empty()) invalid("config has no crypto data and no options tasks");
    if (!c.data.empty() && c.agents.empty() && c.candidate_endpoint.empty())
        invalid("crypto data given but no agents or candidate_endpoint");
    return c;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_json_file(path), path.parent_path());
}

json to_json(const RunConfig& c) {
    json data = json::array();
    for (const auto& d : c.data) {
        json e = json::object();
        if (d.fixture) e["fixture"] = traderbench::to_json(*d.fixture);
        else e["csv"] = std::filesystem::path(d.csv_path).filename().string();
        if (!d.symbol.empty()) e["symbol"] = d.symbol;
        data.push_back(e);
    }
    json ts = json::array();
    for (const auto& t : c.transforms) ts.push_back(traderbench::to_json(t));
    json as = json::array();
    for (const auto& a : c.agents) as.push_back({{"name", a.name}, {"params", a.params}});
    json os = json::array();
    for (const auto& t : c.options_tasks) os.push_back(to_json(t));
    json j = {{"sampling_seed", c.sampling_seed},
              {"data", data},
              {"transforms", ts},
              {"agents", as},
              {"slippage_bps", c.slippage_bps},
              {"initial_cash", c.initial_cash},
              {"options_tasks", os},
              {"responder", responder_name(c.responder)},
              {"stub_scores", {{"strategy", c.stub_strategy_score}, {"risk", c.stub_risk_score}}}};
    j["quotas"] = {{"crypto", c.crypto_quota ? json(*c.crypto_quota) : json(nullptr)},
                   {"options", c.options_quota ? json(*c.options_quota) : json(nullptr)}};
    if (!c.candidate_endpoint.empty()) j["candidate_endpoint"] = c.candidate_endpoint;
    return j;
}

// ---------------------------------------------------------------------------
// tasks

std::vector<CandleSeries> load_series(const RunConfig& config) {
    std::vector<CandleSeries> out;
    std::set<std::string> symbols;
    for (const auto& d : config.data) {
        CandleSeries s = d.fixture ? fixtures::generate_fixture(*d.fixture) : load_candle_csv(d.csv_path);
        if (!d.symbol.empty()) s = s.renamed(d.symbol);
        if (!symbols.insert(s.symbol()).second) invalid("duplicate symbol '" + s.symbol() + "' in data");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Task> build_tasks(const RunConfig& config, std::size_t crypto_pool, std::size_t options_pool) {
    auto draw = [&](std::size_t pool, std::optional<std::size_t> quota, const char* stream) {
        const std::size_t q = quota.value_or(pool);
        if (q > pool)
            fail(ErrorCode::EmptyPool, std::string(stream) + ": quota " + std::to_string(q) +
                                           " exceeds pool of " + std::to_string(pool));
        std::vector<std::size_t> idx(pool);
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(config.sampling_seed, stream);
        for (std::size_t i = 0; i < q; ++i) std::swap(idx[i], idx[i + rng.below(pool - i)]);
        idx.resize(q);
        std::sort(idx.begin(), idx.end());
        return idx;
    };
    std::vector<Task> tasks;
    const auto series = load_series(config);
    for (std::size_t i : draw(crypto_pool, config.crypto_quota, "harness.sample.crypto"))
        tasks.push_back({"crypto/" + series.at(i).symbol(), scoring::Section::Crypto, i});
    for (std::size_t i : draw(options_pool, config.options_quota, "harness.sample.options"))
        tasks.push_back({"options/" + config.options_tasks.at(i).id, scoring::Section::Options, i});
    if (tasks.empty()) fail(ErrorCode::NoActiveSections, "no tasks drawn for any section");
    return tasks;
}

// ---------------------------------------------------------------------------
// crypto

namespace {

void finish_episode(EpisodeResult& r, const sim::SimState& st) {
    const auto eq = st.equity_values();
    r.report = risk::risk_report(eq, st.closed_trades(), risk::periods_per_year(st.series().interval_seconds()));
    r.score = scoring::crypto_condition_score(*r.report);
    r.fills = st.fills().size();
}

void record_failure(EpisodeResult& r, std::string reason) {
    r.report.reset();
    r.score = 0.0;
    r.error = std::move(reason);
}

}  // namespace

EpisodeResult run_crypto_episode(const CandleSeries& series, const transforms::TransformSpec& spec,
                                 const agents::Agent& agent, const sim::SimConfig& config) {
    EpisodeResult r;
    r.kind = spec.kind;
    try {
        auto out = transforms::apply_transform_detailed(series, spec);
        r.sites = out.sites.size();
        r.notes = std::move(out.notes);
        sim::SimState st(std::move(out.series), config);
        const std::span<const Candle> all(st.series().candles());
        while (!st.finished()) {
            agents::AgentDecision d;
            try {
                d = agent.decide(all.first(st.clock_index() + 1), {st.cash(), st.position()});
            } catch (const std::exception& e) {
                fail(ErrorCode::AgentFailure, agent.name + ": " + e.what());
            }
            for (const auto& o : d.orders) st.submit(o);
            st.step();
        }
        finish_episode(r, st);
    } catch (const Error& e) {
        record_failure(r, describe(e));
    } catch (const std::exception& e) {
        record_failure(r, std::string("INTERNAL: ") + e.what());
    }
    return r;
}

std::vector<GridCell> episode_grid(std::size_t n_agents, std::size_t n_series, std::size_t n_transforms) {
    std::vector<GridCell> cells;
    cells.reserve(n_agents * n_series * n_transforms);
    for (std::size_t a = 0; a < n_agents; ++a)
        for (std::size_t s = 0; s < n_series; ++s)
            for (std::size_t t = 0; t < n_transforms; ++t) cells.push_back({a, s, t});
    return cells;
}

std::vector<EpisodeResult> run_grid_serial(const std::vector<agents::Agent>& agents,
                                           const std::vector<CandleSeries>& series,
                                           const std::vector<transforms::TransformSpec>& specs,
                                           const sim::SimConfig& config, const std::vector<GridCell>& cells) {
    std::vector<EpisodeResult> out;
    out.reserve(cells.size());
    for (const auto& c : cells)
        out.push_back(run_crypto_episode(series.at(c.series), specs.at(c.transform), agents.at(c.agent), config));
    return out;
}

std::vector<EpisodeResult> run_grid(const std::vector<agents::Agent>& agents,
                                    const std::vector<CandleSeries>& series,
                                    const std::vector<transforms::TransformSpec>& specs,
                                    const sim::SimConfig& config, const std::vector<GridCell>& cells) {
    std::vector<EpisodeResult> out(cells.size());
    const auto n = static_cast<std::ptrdiff_t>(cells.size());
    // Episodes never throw, so no exception may escape the parallel region.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto& c = cells[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] =
            run_crypto_episode(series[c.series], specs[c.transform], agents[c.agent], config);
    }
    return out;
}

// ---------------------------------------------------------------------------
// options

OptionsTask priced(OptionsTask task) {
    for (auto& leg : task.legs) {
        if (!std::isnan(leg.premium)) continue;
        leg.premium = options::bs_price({task.spot, leg.strike, task.rate, task.vol, leg.expiry_years, leg.right});
    }
    return task;
}

OptionsTruth options_truth(const OptionsTask& task) {
    OptionsTruth t;
    for (const auto& leg : task.legs) {
        const auto g =
            options::bs_greeks({task.spot, leg.strike, task.rate, task.vol, leg.expiry_years, leg.right});
        const double w = (leg.side == options::Position::Long ? 1.0 : -1.0) * leg.quantity;
        t.greeks.delta += w * g.delta;
        t.greeks.gamma += w * g.gamma;
        t.greeks.theta += w * g.theta;
        t.greeks.vega += w * g.vega;
    }
    t.pnl = options::strategy_pnl(task.legs);
    return t;
}

json options_question(const OptionsTask& task) {
    json q = to_json(task);
    q.erase("id");
    return q;
}

namespace {

json answer_of(const OptionsTruth& t) {
    return {{"greeks", {{"delta", t.greeks.delta}, {"gamma", t.greeks.gamma}, {"theta", t.greeks.theta},
                        {"vega", t.greeks.vega}}},
            {"strategy_pnl", traderbench::to_json(t.pnl)}};
}

}  // namespace

OptionsResponder oracle_responder() {
    return [](const OptionsTask& task) { return answer_of(options_truth(task)); };
}

OptionsResponder empty_responder() {
    return [](const OptionsTask&) { return json::object(); };
}

OptionsResponder perturbed_responder(double delta_bias) {
    return [delta_bias](const OptionsTask& task) {
        auto t = options_truth(task);
        t.greeks.delta *= 1.0 + delta_bias;
        return answer_of(t);
    };
}

OptionsResponder endpoint_responder(std::string candidate_endpoint, int deadline_seconds) {
    return [endpoint = std::move(candidate_endpoint), deadline_seconds](const OptionsTask& task) {
        // Options tools are stateless, so a private in-process server suffices.
        auto registry = std::make_shared<const protocol::ToolRegistry>(protocol::default_registry(
            std::make_shared<protocol::MarketStore>(), std::make_shared<protocol::SessionStore>()));
        protocol::ToolServer tools(registry);
        protocol::TaskMessage msg{"options/" + task.id, "options", options_question(task), tools.endpoint(),
                                  deadline_seconds};
        return protocol::send_task(endpoint, msg).answer;
    };
}

OptionsResult run_options_task(const OptionsTask& task, const OptionsResponder& responder, const StubScorer& stub) {
    OptionsResult r;
    r.task_id = "options/" + task.id;
    r.stubbed = true;
    try {
        const auto truth = options_truth(task);
        json answer;
        try {
            answer = responder(task);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Timeout || e.code() == ErrorCode::MalformedResponse || e.code() == ErrorCode::Io)
                throw;
            fail(ErrorCode::MalformedAnswer, std::string("responder failed: ") + e.what());
        }
        options::Greeks greeks;
        options::StrategyPnL pnl;
        try {
            if (!answer.is_object() || !answer.contains("greeks") || !answer.contains("strategy_pnl"))
                fail(ErrorCode::MalformedAnswer, "answer needs greeks and strategy_pnl");
            greeks = greeks_from_json(answer.at("greeks"));
            pnl = strategy_pnl_from_json(answer.at("strategy_pnl"));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedAnswer) throw;
            fail(ErrorCode::MalformedAnswer, e.what());
        } catch (const json::exception& e) {
            fail(ErrorCode::MalformedAnswer, e.what());
        }
        r.subs.pnl = options::score_pnl(pnl, truth.pnl);
        r.subs.greeks = options::score_greeks(greeks, truth.greeks);
        r.subs.strategy = stub.strategy;
        r.subs.risk = stub.risk;
    } catch (const Error& e) {
        r.subs = {};
        r.error = describe(e);
    }
    return r;
}

// ---------------------------------------------------------------------------
// reporting

std::string strategy_class(const CandidateResult& c) {
    std::size_t most = 0;
    for (const auto& t : c.crypto)
        for (const auto& e : t.episodes) most = std::max(most, e.fills);
    if (most == 0) return "zero-trade";
    if (most == 1) return "one-trade";
    return "active";
}

namespace {

json episode_json(const EpisodeResult& e) {
    return {{"transform", transforms::kind_name(e.kind)},
            {"score", e.score},
            {"risk_report", e.report ? traderbench::to_json(*e.report) : json(nullptr)},
            {"fills", e.fills},
            {"injection_sites", e.sites},
            {"notes", e.notes},
            {"error", e.error.empty() ? json(nullptr) : json(e.error)}};
}

std::vector<scoring::SectionScore> sections_of(const CandidateResult& c) {
    std::vector<scoring::SectionScore> out;
    std::vector<double> crypto_scores;
    std::map<std::string, std::vector<double>> per_kind;
    for (const auto& t : c.crypto) {
        crypto_scores.push_back(t.score);
        for (const auto& e : t.episodes) per_kind[std::string(transforms::kind_name(e.kind))].push_back(e.score);
    }
    auto crypto = scoring::section_from_tasks(scoring::Section::Crypto, crypto_scores);
    for (const auto& [k, v] : per_kind) crypto.breakdown[k] = mean(v);
    out.push_back(crypto);

    std::vector<double> opt_scores, pnl, strategy, greeks, riskv;
    for (const auto& o : c.options) {
        opt_scores.push_back(scoring::options_section_score(o.subs));
        pnl.push_back(o.subs.pnl);
        strategy.push_back(o.subs.strategy);
        greeks.push_back(o.subs.greeks);
        riskv.push_back(o.subs.risk);
    }
    auto opt = scoring::section_from_tasks(scoring::Section::Options, opt_scores);
    if (opt.active())
        opt.breakdown = {{"pnl", mean(pnl)}, {"strategy", mean(strategy)}, {"greeks", mean(greeks)},
                         {"risk", mean(riskv)}};
    out.push_back(opt);
    return out;
}

}  // namespace

json candidate_report(const CandidateResult& c) {
    json crypto_tasks = json::array();
    for (const auto& t : c.crypto) {
        json eps = json::array();
        for (const auto& e : t.episodes) eps.push_back(episode_json(e));
        crypto_tasks.push_back({{"task_id", t.task_id}, {"score", t.score}, {"episodes", eps}});
    }
    json option_tasks = json::array();
    bool stubbed = false;
    for (const auto& o : c.options) {
        stubbed = stubbed || o.stubbed;
        option_tasks.push_back({{"task_id", o.task_id},
                                {"pnl", o.subs.pnl},
                                {"strategy", o.subs.strategy},
                                {"greeks", o.subs.greeks},
                                {"risk", o.subs.risk},
                                {"score", scoring::options_section_score(o.subs)},
                                {"stubbed", o.stubbed},
                                {"error", o.error.empty() ? json(nullptr) : json(o.error)}});
    }
    const auto sections = sections_of(c);
    json score;
    try {
        score = traderbench::to_json(scoring::overall(sections));
    } catch (const Error& e) {
        score = {{"error", describe(e)}};
    }
    json crypto = {{"tasks", crypto_tasks}, {"per_condition", sections[0].breakdown}};
    json opts = {{"tasks", option_tasks}, {"sub_scores", sections[1].breakdown}, {"stubbed", stubbed}};
    return {{"name", c.name},
            {"params", c.params},
            {"strategy_class", strategy_class(c)},
            {"crypto", crypto},
            {"options", opts},
            {"score", score}};
}

json run_report(const RunConfig& config, const std::vector<Task>& tasks,
                const std::vector<CandidateResult>& candidates) {
    json ts = json::array();
    for (const auto& t : tasks) ts.push_back({{"id", t.id}, {"section", scoring::section_name(t.section)}});
    json cs = json::array();
    for (const auto& c : candidates) cs.push_back(candidate_report(c));
    json env = {{"version", kVersion}, {"config", to_json(config)}};
    return {{"environment", env}, {"tasks", ts}, {"candidates", cs}};
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

std::string summary_text(const json& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1);
    out << std::left << std::setw(16) << "candidate" << std::setw(12) << "class" << std::right << std::setw(9)
        << "crypto" << std::setw(9) << "options" << std::setw(9) << "overall"
        << "   baseline/noisy/meta/adversarial\n";
    for (const auto& c : report.at("candidates")) {
        auto section = [&](const char* name) -> std::string {
            if (!c.at("score").contains("sections")) return "-";
            for (const auto& s : c.at("score").at("sections"))
                if (s.at("section") == name && s.at("task_count").get<std::size_t>() > 0) {
                    std::ostringstream v;
                    v << std::fixed << std::setprecision(1) << scoring::round1(s.at("score").get<double>());
                    return v.str();
                }
            return "-";
        };
        std::string overall = "-";
        if (c.at("score").contains("overall")) {
            std::ostringstream v;
            v << std::fixed << std::setprecision(1) << scoring::round1(c.at("score").at("overall").get<double>());
            overall = v.str();
        }
        out << std::left << std::setw(16) << c.at("name").get<std::string>() << std::setw(12)
            << c.at("strategy_class").get<std::string>() << std::right << std::setw(9) << section("crypto")
            << std::setw(9) << section("options") << std::setw(9) << overall << "   ";
        const auto& pc = c.at("crypto").at("per_condition");
        bool first = true;
        for (const char* k : {"baseline", "noisy", "meta", "adversarial"}) {
            if (!first) out << "/";
            first = false;
            if (pc.contains(k)) out << scoring::round1(pc.at(k).get<double>());
            else out << "-";
        }
        out << "\n";
    }
    if (!report.at("candidates").empty() && report.at("candidates")[0].at("options").at("stubbed").get<bool>())
        out << "options strategy/risk sub-scores are stubbed constants\n";
    return out.str();
}

namespace {

CryptoTaskResult crypto_task_result(const std::string& id, std::vector<EpisodeResult> episodes) {
    CryptoTaskResult t;
    t.task_id = id;
    scoring::ConditionScores per;
    for (const auto& e : episodes) per[e.kind] = e.score;
    t.score = scoring::crypto_section_score(per);
    t.episodes = std::move(episodes);
    return t;
}

std::vector<CryptoTaskResult> endpoint_crypto(const RunConfig& config, const std::vector<Task>& tasks,
                                              const std::vector<CandleSeries>& series, const sim::SimConfig& cfg) {
    auto markets = std::make_shared<protocol::MarketStore>();
    auto sessions = std::make_shared<protocol::SessionStore>();
    for (const auto& s : series) markets->add(s);
    auto registry = std::make_shared<const protocol::ToolRegistry>(protocol::default_registry(markets, sessions));
    protocol::ToolServer tools(registry);

    std::vector<CryptoTaskResult> out;
    for (const auto& task : tasks) {
        if (task.section != scoring::Section::Crypto) continue;
        std::vector<EpisodeResult> eps;
        for (const auto& spec : config.transforms) {
            EpisodeResult r;
            r.kind = spec.kind;
            try {
                auto transformed = transforms::apply_transform_detailed(series[task.index], spec);
                r.sites = transformed.sites.size();
                r.notes = transformed.notes;
                const std::string id = sessions->open(std::move(transformed.series), cfg);
                protocol::TaskMessage msg{task.id + "/" + std::string(transforms::kind_name(spec.kind)), "crypto",
                                          {{"session", id}}, tools.endpoint(), config.deadline_seconds};
                protocol::send_task(config.candidate_endpoint, msg);
                // Scoring reads the evaluator's own session state, not the answer.
                sessions->with_session(id, [&](sim::SimState& st) { finish_episode(r, st); });
            } catch (const Error& e) {
                record_failure(r, describe(e));
            } catch (const std::exception& e) {
                record_failure(r, std::string("INTERNAL: ") + e.what());
            }
            eps.push_back(std::move(r));
        }
        out.push_back(crypto_task_result(task.id, std::move(eps)));
    }
    return out;
}

}  // namespace

json run(const RunConfig& config) {
    const auto series = load_series(config);
    const auto tasks = build_tasks(config, series.size(), config.options_tasks.size());
    const sim::SimConfig cfg{config.initial_cash, config.slippage_bps, false};

    std::vector<std::size_t> crypto_idx, options_idx;
    std::vector<std::string> crypto_ids;
    for (const auto& t : tasks) {
        if (t.section == scoring::Section::Crypto) {
            crypto_idx.push_back(t.index);
            crypto_ids.push_back(t.id);
        } else {
            options_idx.push_back(t.index);
        }
    }

    // Options tasks are answered once and shared by every candidate.
    OptionsResponder responder;
    switch (config.responder) {
        case Responder::Oracle: responder = oracle_responder(); break;
        case Responder::Empty: responder = empty_responder(); break;
        case Responder::Perturbed: responder = perturbed_responder(); break;
        case Responder::Endpoint: responder = endpoint_responder(config.candidate_endpoint, config.deadline_seconds); break;
    }
    const StubScorer stub{config.stub_strategy_score, config.stub_risk_score};
    std::vector<OptionsResult> option_results;
    for (std::size_t i : options_idx) option_results.push_back(run_options_task(config.options_tasks[i], responder, stub));

    std::vector<agents::Agent> agent_list;
    for (const auto& spec : config.agents) agent_list.push_back(agents::make_agent(spec));
    std::vector<CandleSeries> drawn;
    for (std::size_t i : crypto_idx) drawn.push_back(series[i]);
    const auto cells = episode_grid(agent_list.size(), drawn.size(), config.transforms.size());
    const auto results = config.parallel ? run_grid(agent_list, drawn, config.transforms, cfg, cells)
                                         : run_grid_serial(agent_list, drawn, config.transforms, cfg, cells);

    std::vector<CandidateResult> candidates;
    const std::size_t per_series = config.transforms.size();
    const std::size_t per_agent = drawn.size() * per_series;
    for (std::size_t a = 0; a < agent_list.size(); ++a) {
        CandidateResult c;
        c.name = agent_list[a].name;
        c.params = agent_list[a].params;
        for (std::size_t s = 0; s < drawn.size(); ++s) {
            const auto first = results.begin() + static_cast<std::ptrdiff_t>(a * per_agent + s * per_series);
            c.crypto.push_back(crypto_task_result(
                crypto_ids[s], std::vector<EpisodeResult>(first, first + static_cast<std::ptrdiff_t>(per_series))));
        }
        c.options = option_results;
        candidates.push_back(std::move(c));
    }
    if (!config.candidate_endpoint.empty()) {
        CandidateResult c;
        c.name = "candidate";
        c.crypto = endpoint_crypto(config, tasks, series, cfg);
        c.options = option_results;
        candidates.push_back(std::move(c));
    }
    if (candidates.empty()) {
        // Options-only run with no named candidate: report the responder.
        CandidateResult c;
        c.name = responder_name(config.responder);
        c.options = option_results;
        candidates.push_back(std::move(c));
    }

    json report = run_report(config, tasks, candidates);
    if (!config.output_path.empty()) {
        std::ofstream out(config.output_path, std::ios::binary);
        if (!out) fail(ErrorCode::Io, "cannot write " + config.output_path);
        out << report_text(report);
        if (!out) fail(ErrorCode::Io, "write failed for " + config.output_path);
    }
    return report;
}

// ---------------------------------------------------------------------------
// regression

bool RegressionRow::pass() const { return std::abs(computed - published) <= tolerance + 1e-9; }

namespace {

const json& rows_of(const json& table) {
    if (!table.contains("models") || !table.at("models").is_array()) invalid("table needs a 'models' array");
    return table.at("models");
}

const json& row_for(const json& table, const std::string& model) {
    for (const auto& r : rows_of(table))
        if (r.at("model") == model) return r;
    invalid("model '" + model + "' missing from table");
}

}  // namespace

std::vector<RegressionRow> regress_crypto(const json& appendix_b, const json& table5) {
    std::vector<RegressionRow> out;
    for (const auto& r : rows_of(appendix_b)) {
        const std::string model = r.at("model");
        const scoring::ConditionScores per{{TransformKind::Baseline, require_number(r, "baseline")},
                                           {TransformKind::Noisy, require_number(r, "noisy")},
                                           {TransformKind::Meta, require_number(r, "meta")},
                                           {TransformKind::Adversarial, require_number(r, "adversarial")}};
        out.push_back({model, "crypto", scoring::crypto_section_score(per),
                       require_number(row_for(table5, model), "crypto"), 0.05});
    }
    return out;
}

std::vector<RegressionRow> regress_options(const json& appendix_a, const json& table5) {
    std::vector<RegressionRow> out;
    for (const auto& r : rows_of(appendix_a)) {
        const std::string model = r.at("model");
        const scoring::OptionsSubScores subs{require_number(r, "pnl"), require_number(r, "strategy"),
                                             require_number(r, "greeks"), require_number(r, "risk")};
        out.push_back({model, "options", scoring::options_section_score(subs),
                       require_number(row_for(table5, model), "options"), 0.05});
    }
    return out;
}

std::vector<RegressionRow> regress_overall(const json& table5) {
    std::vector<RegressionRow> out;
    for (const auto& r : rows_of(table5)) {
        std::vector<scoring::SectionScore> sections;
        for (auto s : scoring::kAllSections)
            sections.push_back({s, require_number(r, std::string(scoring::section_name(s)).c_str()), 1, {}});
        out.push_back({r.at("model"), "overall", scoring::overall(sections).overall, require_number(r, "overall"), 0.1});
    }
    return out;
}

}  // namespace traderbench::harness
