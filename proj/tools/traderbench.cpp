// traderbench command line.
//
//   traderbench run --config run.json [--seed N] [--out report.json]
//   traderbench transform --kind noisy --seed 42 --in a.csv --out b.csv
//   traderbench score --fixtures appendixB.json [--table table5.json]
//   traderbench fixtures emit --spec spec.json --out f.csv
//   traderbench serve --csv a.csv [--fixture spec.json] [--port 8080]
//   traderbench candidate [--port 8081] [--agent ma_cross]

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "traderbench/error.hpp"
#include "traderbench/fixtures.hpp"
#include "traderbench/harness.hpp"
#include "traderbench/protocol.hpp"
#include "traderbench/transforms.hpp"

namespace fs = std::filesystem;
using namespace traderbench;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void wait_for_signal() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    out << text;
    if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out,
            bool quiet) {
    json j = harness::read_json_file(config_path);
    if (seed) j["sampling_seed"] = *seed;
    auto config = harness::parse_run_config(j, fs::path(config_path).parent_path());
    if (!out.empty()) config.output_path = out;
    const json report = harness::run(config);
    if (config.output_path.empty()) std::cout << harness::report_text(report);
    else if (!quiet) std::cout << harness::summary_text(report);
    return 0;
}

int cmd_transform(const std::string& kind, std::uint64_t seed, const std::string& in, const std::string& out,
                  const std::string& params, const std::string& sites_out) {
    json spec = {{"kind", kind}, {"seed", seed}};
    if (!params.empty()) {
        try {
            spec["params"] = json::parse(params);
        } catch (const json::exception& e) {
            fail(ErrorCode::InvalidParams, std::string("--params is not JSON: ") + e.what());
        }
    }
    const auto series = load_candle_csv(in);
    const auto outcome = transforms::apply_transform_detailed(series, transform_spec_from_json(spec));
    save_candle_csv(outcome.series, out);
    for (const auto& n : outcome.notes) std::cerr << "note: " << n << "\n";
    if (!sites_out.empty()) {
        json sites = json::array();
        for (const auto& s : outcome.sites) sites.push_back(to_json(s));
        write_text(sites_out, json{{"sites", sites}, {"notes", outcome.notes}}.dump(2) + "\n");
    }
    return 0;
}

void print_rows(const std::vector<harness::RegressionRow>& rows, std::size_t& failures) {
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(16) << r.model << std::setw(9) << r.column << std::right << std::fixed
                  << std::setprecision(3) << std::setw(9) << r.computed << std::setprecision(1) << std::setw(7)
                  << r.published << "  " << (r.pass() ? "ok" : "MISMATCH") << "\n";
        if (!r.pass()) ++failures;
    }
}

int cmd_score(const std::string& fixtures_path, std::string table_path, bool strict) {
    const json rows = harness::read_json_file(fixtures_path);
    if (table_path.empty()) {
        const auto sibling = fs::path(fixtures_path).parent_path() / "table5.json";
        if (fs::exists(sibling)) table_path = sibling.string();
    }
    if (!rows.contains("models") || rows.at("models").empty())
        fail(ErrorCode::InvalidConfig, fixtures_path + ": expected {\"models\": [...]}");
    const json& first = rows.at("models")[0];
    const bool crypto = first.contains("baseline");
    const bool opts = first.contains("pnl");
    const bool overall = first.contains("overall");
    if (!crypto && !opts && !overall)
        fail(ErrorCode::InvalidConfig, fixtures_path + ": rows need condition, sub-score or section columns");

    std::size_t failures = 0;
    if (overall) {
        print_rows(harness::regress_overall(rows), failures);
    } else if (table_path.empty()) {
        // No published column to compare with: print computed scores only.
        for (const auto& r : rows.at("models")) {
            double v = 0;
            if (crypto)
                v = scoring::crypto_section_score({{transforms::TransformKind::Baseline, require_number(r, "baseline")},
                                                   {transforms::TransformKind::Noisy, require_number(r, "noisy")},
                                                   {transforms::TransformKind::Meta, require_number(r, "meta")},
                                                   {transforms::TransformKind::Adversarial,
                                                    require_number(r, "adversarial")}});
            else
                v = scoring::options_section_score({require_number(r, "pnl"), require_number(r, "strategy"),
                                                    require_number(r, "greeks"), require_number(r, "risk")});
            std::cout << std::left << std::setw(16) << r.at("model").get<std::string>() << std::fixed
                      << std::setprecision(3) << v << "\n";
        }
    } else {
        const json table = harness::read_json_file(table_path);
        print_rows(crypto ? harness::regress_crypto(rows, table) : harness::regress_options(rows, table), failures);
    }
    if (failures) std::cerr << failures << " row(s) outside tolerance\n";
    return strict && failures ? 3 : 0;
}

int cmd_fixture_emit(const std::string& spec_path, const std::string& out) {
    const auto series = fixtures::generate_fixture(fixture_spec_from_json(harness::read_json_file(spec_path)));
    save_candle_csv(series, out);
    return 0;
}

int cmd_serve(const std::vector<std::string>& csvs, const std::vector<std::string>& fixture_specs,
              const std::string& host, int port, bool permissive) {
    auto markets = std::make_shared<protocol::MarketStore>();
    for (const auto& p : csvs) markets->add(load_candle_csv(p));
    for (const auto& p : fixture_specs)
        markets->add(fixtures::generate_fixture(fixture_spec_from_json(harness::read_json_file(p))));
    auto sessions = std::make_shared<protocol::SessionStore>();
    auto registry = std::make_shared<const protocol::ToolRegistry>(
        protocol::default_registry(markets, sessions, {.strict_lookahead = !permissive}));
    protocol::ToolServer server(registry, host, port);
    std::cout << "tools at " << server.endpoint() << std::endl;
    wait_for_signal();
    return 0;
}

int cmd_candidate(const std::string& host, int port, const std::string& agent) {
    const agents::AgentSpec fallback{agent, {}};
    agents::make_agent(fallback);
    protocol::CandidateServer server(
        [fallback](const protocol::TaskMessage& t) { return protocol::scripted_candidate(t, fallback); }, host, port);
    std::cout << "candidate at " << server.endpoint() << std::endl;
    wait_for_signal();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traderbench: trading and options evaluation harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", harness::kVersion);

    auto* run = app.add_subcommand("run", "run a benchmark config and write the report");
    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    run->add_option("--config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "override sampling_seed (and default transform seeds)");
    run->add_option("--out", out_path, "report path (default: print report to stdout)");
    run->add_flag("--quiet", quiet, "no summary table");

    auto* transform = app.add_subcommand("transform", "apply one perturbation to a candle CSV");
    std::string kind, in_path, params, sites_path;
    std::uint64_t tseed = 42;
    transform->add_option("--kind", kind, "baseline|noisy|meta|adversarial")->required();
    transform->add_option("--seed", tseed);
    transform->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
    transform->add_option("--out", out_path)->required();
    transform->add_option("--params", params, "JSON object of transform parameters");
    transform->add_option("--sites", sites_path, "write injection sites and notes as JSON");

    auto* score = app.add_subcommand("score", "recompute published aggregates from per-row scores");
    std::string fixtures_path, table_path;
    bool strict = false;
    score->add_option("--fixtures", fixtures_path, "appendix table JSON")->required()->check(CLI::ExistingFile);
    score->add_option("--table", table_path, "published section table (default: sibling table5.json)");
    score->add_flag("--strict", strict, "exit 3 when a row is outside tolerance");

    auto* fixtures_cmd = app.add_subcommand("fixtures", "synthetic series");
    fixtures_cmd->require_subcommand(1);
    auto* emit = fixtures_cmd->add_subcommand("emit", "write a fixture to CSV");
    std::string spec_path;
    emit->add_option("--spec", spec_path, "fixture spec JSON")->required()->check(CLI::ExistingFile);
    emit->add_option("--out", out_path)->required();

    auto* serve = app.add_subcommand("serve", "serve the tool surface over HTTP");
    std::vector<std::string> csvs, fixture_specs;
    std::string host = "127.0.0.1";
    int port = 8080;
    bool permissive = false;
    serve->add_option("--csv", csvs)->check(CLI::ExistingFile);
    serve->add_option("--fixture", fixture_specs)->check(CLI::ExistingFile);
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->add_flag("--permissive", permissive, "truncate lookahead reads instead of refusing them");

    auto* candidate = app.add_subcommand("candidate", "run the scripted candidate service");
    std::string agent = "buyhold";
    int cport = 8081;
    candidate->add_option("--host", host);
    candidate->add_option("--port", cport);
    candidate->add_option("--agent", agent, "agent used when a task names none");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, seed, out_path, quiet);
        if (*transform) return cmd_transform(kind, tseed, in_path, out_path, params, sites_path);
        if (*score) return cmd_score(fixtures_path, table_path, strict);
        if (*emit) return cmd_fixture_emit(spec_path, out_path);
        if (*serve) return cmd_serve(csvs, fixture_specs, host, port, permissive);
        if (*candidate) return cmd_candidate(host, cport, agent);
    } catch (const Error& e) {
        std::cerr << code_name(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "INTERNAL: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
