#include "seqsel/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqsel/advisor_service.hpp"
#include "seqsel/oracle.hpp"
#include "seqsel/problems.hpp"
#include "seqsel/stop_engine.hpp"
#include "seqsel/tables.hpp"

namespace seqsel {

using nlohmann::json;

namespace {

// Invalid input from the user: reported with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemFlags {
    std::string problem;
    std::string spec;
    std::optional<int> n;
    std::optional<int> k;
    std::vector<double> p;
    std::string horizon;
    std::optional<int> n_max;
    std::optional<double> alpha;
    std::optional<double> geom_p;
    std::optional<double> epsilon;
    std::string reward;
    bool zero_at_horizon = false;
    std::string observation_law;

    void attach(CLI::App& app) {
        app.add_option("--problem", problem, "problem id (classical, gusein_zade, postdoc, ..., or P1..P12)");
        app.add_option("--spec", spec, "problem JSON, @file, or - for stdin");
        app.add_option("--n", n, "number of observations");
        app.add_option("--k", k, "k parameter");
        app.add_option("--p", p, "success probabilities (comma separated)")->delimiter(',');
        app.add_option("--horizon", horizon, "horizon type (fixed, uniform, pettitt, zib_mixture, u_shaped, geometric) or JSON");
        app.add_option("--n-max", n_max, "largest horizon value");
        app.add_option("--alpha", alpha, "Pettitt hazard exponent");
        app.add_option("--geom-p", geom_p, "geometric horizon parameter");
        app.add_option("--epsilon", epsilon, "truncation tolerance for infinite horizons");
        app.add_option("--reward", reward, "reward type or JSON for the generic rank problem");
        app.add_flag("--zero-at-horizon", zero_at_horizon, "credit 0 for a stop at the last observation");
        app.add_option("--observation-law", observation_law, "observation law for moser");
    }
};

std::string read_source(const std::string& s) {
    if (s == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    if (!s.empty() && s[0] == '@') {
        std::ifstream in(s.substr(1));
        if (!in) throw UsageError("cannot read " + s.substr(1));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return s;
}

json parse_json_arg(const std::string& text, const char* what) {
    try {
        return json::parse(read_source(text));
    } catch (const json::exception& e) {
        throw UsageError(std::string(what) + " is not valid JSON: " + e.what());
    }
}

std::string canonical_id(const std::string& raw) {
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"gusein", "gusein_zade"}, {"squared", "squared_rank"}, {"expected_rank", "chow"},
        {"secretary", "classical"}, {"odds", "bruss"},
    };
    for (const auto& [a, id] : aliases)
        if (raw == a) return id;
    for (const auto& d : catalog())
        if (raw == d.tag) return d.id;
    return raw;
}

json horizon_from_flags(const ProblemFlags& f) {
    if (f.horizon.empty()) return nullptr;
    if (f.horizon.front() == '{' || f.horizon.front() == '@') return parse_json_arg(f.horizon, "--horizon");
    json h = {{"type", f.horizon}};
    if (f.horizon == "fixed") {
        if (!f.n) throw UsageError("--horizon fixed needs --n");
        h["n"] = *f.n;
    } else if (f.horizon == "uniform" || f.horizon == "pettitt") {
        if (!f.n_max) throw UsageError("--horizon " + f.horizon + " needs --n-max");
        h["N_max"] = *f.n_max;
        if (f.horizon == "pettitt") {
            if (!f.alpha) throw UsageError("--horizon pettitt needs --alpha");
            h["alpha"] = *f.alpha;
        }
    } else if (f.horizon == "geometric") {
        if (!f.geom_p) throw UsageError("--horizon geometric needs --geom-p");
        h["p"] = *f.geom_p;
    }
    if (f.epsilon) h["epsilon"] = *f.epsilon;
    return h;
}

ProblemInstance problem_from_flags(const ProblemFlags& f) {
    json j;
    if (!f.spec.empty()) {
        j = parse_json_arg(f.spec, "--spec");
    } else {
        if (f.problem.empty()) throw UsageError("either --problem or --spec is required");
        j = {{"id", canonical_id(f.problem)}};
        json params = json::object();
        if (f.n) params["n"] = *f.n;
        if (f.k) params["k"] = *f.k;
        if (!f.p.empty()) params["p"] = f.p;
        if (f.zero_at_horizon) params["zero_at_horizon"] = true;
        if (!f.observation_law.empty()) params["observation_law"] = f.observation_law;
        if (!f.reward.empty()) {
            json r = f.reward.front() == '{' ? parse_json_arg(f.reward, "--reward") : json{{"type", f.reward}};
            if (f.k && !r.contains("k")) r["k"] = *f.k;
            params["reward"] = r;
        }
        j["params"] = params;
        const json h = horizon_from_flags(f);
        if (!h.is_null()) j["horizon"] = h;
    }
    try {
        return ProblemInstance::from_json(j);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const json::exception& e) {
        throw UsageError(e.what());
    }
}

Solution solve_or_usage(const ProblemInstance& p, SolveOptions opt = {}) {
    try {
        return solve(p, opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::out_of_range& e) {
        throw UsageError(e.what());
    }
}

std::uint64_t parse_seed(const std::string& s) {
    if (s.empty()) throw UsageError("seed must not be empty");
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
        v = std::stoull(hex ? s.substr(2) : s, &pos, hex ? 16 : 10);
        if (hex) pos += 2;
    } catch (const std::exception&) {
        throw UsageError("bad seed \"" + s + "\": expected a decimal or 0x-prefixed integer");
    }
    if (pos != s.size() || s[0] == '-' || s[0] == '+')
        throw UsageError("bad seed \"" + s + "\": expected a decimal or 0x-prefixed integer");
    return v;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

int cmd_solve(const ProblemFlags& f, bool no_thresholds, std::ostream& out) {
    const Solution s = solve_or_usage(problem_from_flags(f));
    out << s.to_json(!no_thresholds).dump(2) << '\n';
    return 0;
}

int cmd_table(int id, std::optional<long long> cap, bool check, bool allow_large, std::ostream& out, std::ostream& err) {
    if (id < 1 || id > kTableCount) throw UsageError("--id must lie in 1..8");
    if (cap && *cap < 0) throw UsageError("--cap must be >= 0");
    const TableOutput t = build_table({id, cap, allow_large});
    if (t.rows.empty()) {
        err << "warning: size cap below the smallest table entry; no rows emitted\n";
    } else {
        if (!t.skipped.empty()) {
            err << "skipped " << t.skipped.size() << " entries:";
            for (const auto& s : t.skipped) err << "\n  " << s;
            err << '\n';
        }
        t.write_csv(out);
    }
    if (!check) return 0;
    const TableCheck c = check_table(t);
    for (const auto& m : c.messages) err << m << '\n';
    err << "check: compared " << c.compared << ", mismatches " << c.mismatches << ", errata " << c.errata
        << ", truncated " << c.truncated << '\n';
    return c.ok() ? 0 : 1;
}

int cmd_region(const ProblemFlags& f, const std::string& format, std::optional<int> max_rank, std::ostream& out,
               std::ostream& err) {
    const ProblemInstance p = problem_from_flags(f);
    if (!p.is_rank_problem()) throw UsageError("region: \"" + p.id + "\" is not a rank problem");
    const Solution s = solve_or_usage(p);
    if (!s.policy || !s.policy->has_rank_rows()) throw UsageError("region: solution has no rank rows");
    const int k = max_rank ? *max_rank : default_region_rank(p, s.policy->nu);
    if (k < 1) throw UsageError("--max-rank must be >= 1");
    const StoppingRegion reg = stopping_region(*s.policy, k);
    if (format == "json") {
        out << region_json(*s.policy, reg).dump() << '\n';
        return 0;
    }
    write_region_csv(*s.policy, reg, out);
    for (int r = 1; r <= reg.max_rank; ++r) {
        err << "rank " << r << ":";
        if (reg.islands[r - 1].empty()) err << " none";
        for (std::size_t i = 0; i < reg.islands[r - 1].size(); ++i) {
            const Island& is = reg.islands[r - 1][i];
            err << (i ? ", " : " ") << is.first << '-' << is.last;
        }
        err << '\n';
    }
    return 0;
}

int cmd_simulate(const ProblemFlags& f, long long trials, const std::string& seed_flag, int threads, std::ostream& out) {
    if (trials < 1) throw UsageError("--trials must be >= 1");
    std::uint64_t seed = 1;
    if (!seed_flag.empty())
        seed = parse_seed(seed_flag);
    else if (const char* env = std::getenv("SEQSEL_SEED"))
        seed = parse_seed(env);
    const ProblemInstance p = problem_from_flags(f);
    if (!p.is_rank_problem()) throw UsageError("simulate: \"" + p.id + "\" is not a rank problem");
    const Solution s = solve_or_usage(p);
    if (!s.policy || !s.policy->has_rank_rows()) throw UsageError("simulate: solution has no rank rows");
    const ThresholdPolicy& policy = *s.policy;
    const HorizonSpec h = p.resolved_horizon();
    const SimulationReport rep = simulate(
        [&policy](int t, int r) { return decide(policy, t, r) == Decision::Stop; }, *p.reward(), h, trials, seed, threads);
    json j = rep.to_json();
    j["problem"] = p.to_json();
    j["engine_value"] = policy.value;
    if (rep.std_error && *rep.std_error > 0.0) j["z"] = (rep.mean - policy.value) / *rep.std_error;
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_serve(const std::string& host, int port, double ttl, double budget, const std::string& snapshot,
              std::ostream& out, std::ostream& err) {
    if (port < 0 || port > 65535) throw UsageError("--port must lie in 0..65535");
    if (!(ttl > 0.0) || !(budget > 0.0)) throw UsageError("--session-ttl and --budget must be positive");
    AdvisorConfig cfg;
    cfg.session_ttl = std::chrono::milliseconds(static_cast<long long>(ttl * 1000.0));
    cfg.solve_budget = std::chrono::milliseconds(static_cast<long long>(budget * 1000.0));
    if (!snapshot.empty()) cfg.snapshot_path = snapshot;
    Advisor advisor(cfg);
    if (advisor.replay_errors() > 0) err << "warning: skipped " << advisor.replay_errors() << " snapshot lines\n";
    AdvisorServer server(advisor);
    const int bound = server.bind(host, port);
    g_interrupted = false;
    auto previous = std::signal(SIGINT, on_sigint);
    std::signal(SIGTERM, on_sigint);
    server.start();
    out << "listening on " << host << ':' << bound << std::endl;
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    advisor.flush();
    std::signal(SIGINT, previous);
    err << "shutdown\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Optimal stopping and sequential selection solver", "seqsel");
    app.require_subcommand(1);

    ProblemFlags solve_flags, region_flags, sim_flags;
    bool no_thresholds = false;
    auto* solve_cmd = app.add_subcommand("solve", "solve a catalog problem and print the solution JSON");
    solve_flags.attach(*solve_cmd);
    solve_cmd->add_flag("--no-thresholds", no_thresholds, "omit the threshold array");

    int table_id = 0;
    std::optional<long long> cap;
    bool check = false, allow_large = false;
    auto* table_cmd = app.add_subcommand("table", "reproduce a reference table as CSV");
    table_cmd->add_option("--id", table_id, "table id 1..8")->required();
    table_cmd->add_option("--cap", cap, "largest n / N_max to compute");
    table_cmd->add_flag("--check", check, "compare against the embedded reference values");
    table_cmd->add_flag("--allow-large", allow_large, "lift the default size caps");

    std::string format = "csv";
    std::optional<int> max_rank;
    auto* region_cmd = app.add_subcommand("region", "export the stopping region of a rank problem");
    region_flags.attach(*region_cmd);
    region_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    region_cmd->add_option("--max-rank", max_rank, "largest relative rank shown");

    long long trials = 100000;
    std::string seed;
    int threads = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo check of the optimal policy");
    sim_flags.attach(*sim_cmd);
    sim_cmd->add_option("--trials", trials, "number of trials");
    sim_cmd->add_option("--seed", seed, "seed (decimal or 0x hex); falls back to SEQSEL_SEED");
    sim_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::string host = "127.0.0.1", snapshot;
    int port = 8080;
    double ttl = 1800.0, budget = 10.0;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP advisory service");
    serve_cmd->add_option("--host", host, "bind address");
    serve_cmd->add_option("--port", port, "port (0 picks a free one)");
    serve_cmd->add_option("--session-ttl", ttl, "idle session lifetime in seconds");
    serve_cmd->add_option("--budget", budget, "solve time budget in seconds");
    serve_cmd->add_option("--snapshot", snapshot, "append-only JSON-lines snapshot file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*solve_cmd) return cmd_solve(solve_flags, no_thresholds, out);
        if (*table_cmd) return cmd_table(table_id, cap, check, allow_large, out, err);
        if (*region_cmd) return cmd_region(region_flags, format, max_rank, out, err);
        if (*sim_cmd) return cmd_simulate(sim_flags, trials, seed, threads, out);
        if (*serve_cmd) return cmd_serve(host, port, ttl, budget, snapshot, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace seqsel
