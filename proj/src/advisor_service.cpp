#include "seqsel/advisor_service.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <random>

#include "httplib.h"
#include "seqsel/rng.hpp"
#include "seqsel/stop_engine.hpp"

namespace seqsel {

using nlohmann::json;

namespace {

enum class SessionKind { Rank, Multi, Value };

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

ApiError bad_request(const std::string& msg) { return ApiError(400, "bad_request", msg); }

int body_int(const json& body, const char* key) {
    if (!body.contains(key) || !body.at(key).is_number_integer())
        throw bad_request(std::string("observe: integer \"") + key + "\" required");
    return body.at(key).get<int>();
}

bool body_flag(const json& body, const char* key) {
    if (!body.contains(key)) return false;
    if (!body.at(key).is_boolean()) throw bad_request(std::string("observe: \"") + key + "\" must be a boolean");
    return body.at(key).get<bool>();
}

}  // namespace

std::string to_string(SessionState s) {
    switch (s) {
        case SessionState::Active: return "active";
        case SessionState::Stopped: return "stopped";
        case SessionState::Exhausted: return "exhausted";
    }
    return "active";
}

struct Advisor::Session {
    std::string id;
    json spec;
    ProblemInstance problem;
    std::shared_ptr<const Solution> solution;
    SessionKind kind = SessionKind::Rank;
    bool random_horizon = false;
    int nu = 0;
    std::vector<double> sigma;

    std::mutex mutex;
    int t = 1;
    json history = json::array();
    SessionState state = SessionState::Active;
    std::optional<int> stopped_at;
    int remaining = 1;
    std::vector<int> selected;
    Clock::time_point last_access;

    json state_json() const {
        json j = {{"id", id},
                  {"t", t},
                  {"nu", nu},
                  {"history", history},
                  {"state", to_string(state)},
                  {"stopped_at", stopped_at ? json(*stopped_at) : json(nullptr)}};
        if (kind == SessionKind::Multi) {
            j["remaining"] = remaining;
            j["selected"] = selected;
        }
        return j;
    }
};

Advisor::Advisor(AdvisorConfig config) : config_(std::move(config)) {
    std::random_device rd;
    id_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    if (config_.snapshot_path) {
        replay(*config_.snapshot_path);
        log_.open(*config_.snapshot_path, std::ios::app);
        if (!log_) throw std::runtime_error("advisor: cannot open snapshot file " + *config_.snapshot_path);
    }
}

Advisor::~Advisor() { flush(); }

Clock::time_point Advisor::now() const { return config_.clock ? config_.clock() : Clock::now(); }

std::string Advisor::new_id() {
    SplitMix64 sm(id_state_);
    const std::uint64_t a = sm.next(), b = sm.next();
    id_state_ = sm.next();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b));
    return buf;
}

void Advisor::log(const json& line) {
    if (!config_.snapshot_path) return;
    std::lock_guard<std::mutex> lk(log_mutex_);
    log_ << line.dump() << '\n';
    log_.flush();
}

void Advisor::flush() {
    std::lock_guard<std::mutex> lk(log_mutex_);
    if (log_.is_open()) log_.flush();
}

void Advisor::replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string op = j.at("op").get<std::string>();
            const std::string id = j.at("id").get<std::string>();
            if (op == "create") {
                sessions_[id] = build_session(id, j.at("problem"), false);
            } else if (op == "observe") {
                auto it = sessions_.find(id);
                if (it == sessions_.end()) throw std::runtime_error("unknown session");
                apply_observe(*it->second, j.at("body"));
            } else if (op == "expire") {
                sessions_.erase(id);
            } else {
                throw std::runtime_error("unknown op");
            }
        } catch (const std::exception&) {
            ++replay_errors_;
        }
    }
    const auto t = now();
    for (auto& [id, s] : sessions_) s->last_access = t;
}

std::size_t Advisor::expire() {
    const auto t = now();
    std::vector<std::string> gone;
    {
        std::lock_guard<std::mutex> lk(mutex_);
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            if (t - it->second->last_access > config_.session_ttl) {
                gone.push_back(it->first);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (const auto& id : gone) log({{"op", "expire"}, {"id", id}});
    return gone.size();
}

std::size_t Advisor::session_count() const {
    std::lock_guard<std::mutex> lk(mutex_);
    return sessions_.size();
}

std::shared_ptr<Advisor::Session> Advisor::find(const std::string& id) {
    expire();
    std::lock_guard<std::mutex> lk(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError(404, "not_found", "unknown session " + id);
    return it->second;
}

json Advisor::list_problems() const { return catalog_json(); }

std::shared_ptr<Advisor::Session> Advisor::build_session(const std::string& id, const json& spec, bool budgeted) {
    ProblemInstance problem;
    HorizonSpec horizon = HorizonSpec::fixed(1);
    try {
        problem = ProblemInstance::from_json(spec);
        horizon = problem.resolved_horizon();
    } catch (const std::exception& e) {
        throw bad_request(e.what());
    }

    std::shared_ptr<const Solution> solution;
    try {
        if (budgeted) {
            auto task = std::make_shared<std::packaged_task<Solution()>>([problem] { return solve(problem); });
            auto fut = task->get_future();
            std::thread([task] { (*task)(); }).detach();
            if (fut.wait_for(config_.solve_budget) != std::future_status::ready)
                throw ApiError(422, "budget_exceeded", "solve exceeded the configured time budget");
            solution = std::make_shared<const Solution>(fut.get());
        } else {
            solution = std::make_shared<const Solution>(solve(problem));
        }
    } catch (const ApiError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw bad_request(e.what());
    } catch (const std::out_of_range& e) {
        throw bad_request(e.what());
    } catch (const std::exception& e) {
        throw ApiError(422, "unsolvable", e.what());
    }

    auto s = std::make_shared<Session>();
    s->id = id;
    s->spec = problem.to_json();
    s->problem = std::move(problem);
    s->solution = solution;
    s->random_horizon = horizon.is_random();
    if (solution->multi) {
        s->kind = SessionKind::Multi;
        s->nu = solution->multi->n();
        s->remaining = solution->multi->k();
    } else if (solution->policy && solution->policy->has_rank_rows()) {
        s->kind = SessionKind::Rank;
        s->nu = solution->policy->nu;
    } else if (solution->policy) {
        s->kind = SessionKind::Value;
        s->nu = solution->policy->nu;
        if (s->problem.id == "moser") s->sigma = horizon.tail_sums();
    } else {
        throw ApiError(422, "unsupported", "problem has no sequential policy");
    }
    s->last_access = now();
    return s;
}

json Advisor::create_session(const json& spec) {
    expire();
    std::string id;
    {
        std::lock_guard<std::mutex> lk(mutex_);
        id = new_id();
    }
    auto s = build_session(id, spec, true);
    const Solution& sol = *s->solution;
    json out = {{"id", id},
                {"problem", s->spec},
                {"nu", s->nu},
                {"value", sol.value},
                {"engine_value", sol.engine_value},
                {"orientation", sol.orientation},
                {"diagnostics", sol.diagnostics}};
    switch (s->kind) {
        case SessionKind::Rank: {
            out["kind"] = "rank";
            out["policy"] = sol.policy->to_json();
            const auto reg = stopping_region(*sol.policy, default_region_rank(s->problem, s->nu));
            out["region"] = region_json(*sol.policy, reg);
            break;
        }
        case SessionKind::Value:
            out["kind"] = "value";
            out["policy"] = sol.policy->to_json();
            break;
        case SessionKind::Multi: {
            out["kind"] = "multi";
            const auto& m = *sol.multi;
            json thr = json::array();
            for (int rem = 1; rem <= m.k(); ++rem) {
                json row = json::array();
                for (int t = 1; t <= m.n(); ++t) row.push_back(opt_json(m.threshold(t, rem)));
                thr.push_back({{"remaining", rem}, {"thresholds", row}});
            }
            out["policy"] = {{"n", m.n()}, {"k", m.k()}, {"value", sol.value}, {"thresholds", thr}};
            break;
        }
    }
    out["session"] = s->state_json();
    {
        std::lock_guard<std::mutex> lk(mutex_);
        sessions_[id] = s;
    }
    log({{"op", "create"}, {"id", id}, {"problem", s->spec}});
    return out;
}

json Advisor::apply_observe(Session& s, const json& body) {
    if (!body.is_object()) throw bad_request("observe: JSON object body required");
    if (s.state != SessionState::Active)
        throw ApiError(409, "terminal_session", "session is " + to_string(s.state));
    const bool accept = body_flag(body, "accept");
    const bool dry_run = body_flag(body, "dry_run");
    const int t = s.t;

    if (body.contains("r") && body.at("r").is_number_integer() && body.at("r").get<int>() == 0) {
        if (!s.random_horizon) throw bad_request("observe: r = 0 (termination) is only valid on a random horizon");
        if (!dry_run) s.state = SessionState::Exhausted;
        return {{"t", t}, {"r", 0}, {"terminated", true}, {"reward", 0.0}, {"dry_run", dry_run},
                {"session", s.state_json()}};
    }

    json out = {{"t", t}, {"dry_run", dry_run}, {"accepted", false}};
    double y = 0.0;
    std::optional<double> threshold;
    std::optional<double> to_go;
    bool stop = false;
    json record;

    if (s.kind == SessionKind::Rank || s.kind == SessionKind::Multi) {
        const int r = body_int(body, "r");
        if (r < 1 || r > t) throw bad_request("observe: r must lie in 1..t (t = " + std::to_string(t) + ")");
        out["r"] = r;
        record = r;
        if (s.kind == SessionKind::Rank) {
            const ThresholdPolicy& p = *s.solution->policy;
            y = p.U(t, r);
            threshold = p.threshold_at(t);
            to_go = threshold;
            stop = decide(p, t, r) == Decision::Stop;
        } else {
            const MultiChoicePolicy& m = *s.solution->multi;
            y = m.job_value(t, r);
            threshold = m.threshold(t, s.remaining);
            stop = m.select(t, y, s.remaining);
            out["remaining"] = s.remaining;
        }
    } else {
        const ThresholdPolicy& p = *s.solution->policy;
        if (body.contains("y") && body.at("y").is_number()) {
            y = body.at("y").get<double>();
        } else if (s.problem.id == "bruss" && body.contains("success") && body.at("success").is_boolean()) {
            y = body.at("success").get<bool>() ? p.supports[t - 1].atoms().back() : 0.0;
        } else if (!s.sigma.empty() && body.contains("x") && body.at("x").is_number()) {
            const double x = body.at("x").get<double>();
            if (!(x >= 0.0 && x <= 1.0)) throw bad_request("observe: x must lie in [0, 1]");
            y = s.sigma[t - 1] * (x - 0.5);
        } else {
            throw bad_request("observe: numeric \"y\" required for this problem");
        }
        if (!std::isfinite(y)) throw bad_request("observe: y must be finite");
        record = y;
        threshold = p.threshold_at(t);
        to_go = threshold;
        stop = !threshold || exceeds_threshold(y, *threshold);
    }

    out["advice"] = stop ? "stop" : "continue";
    out["y"] = y;
    out["threshold"] = opt_json(threshold);
    out["value_to_go_if_continue"] = opt_json(to_go);
    out["stop_value_estimate"] = y;

    if (!dry_run) {
        s.history.push_back(record);
        if (s.kind == SessionKind::Multi) {
            if (accept) {
                s.selected.push_back(t);
                if (--s.remaining == 0) {
                    s.state = SessionState::Stopped;
                    s.stopped_at = t;
                }
            }
            if (s.state == SessionState::Active && ++s.t > s.nu) s.state = SessionState::Exhausted;
        } else if (accept) {
            s.state = SessionState::Stopped;
            s.stopped_at = t;
        } else if (++s.t > s.nu) {
            s.state = SessionState::Exhausted;
        }
        out["accepted"] = accept;
    }
    out["session"] = s.state_json();
    return out;
}

json Advisor::observe(const std::string& id, const json& body) {
    auto s = find(id);
    std::lock_guard<std::mutex> lk(s->mutex);
    s->last_access = now();
    json out = apply_observe(*s, body);
    if (!out.value("dry_run", false)) log({{"op", "observe"}, {"id", id}, {"body", body}});
    return out;
}

json Advisor::region(const std::string& id, std::optional<int> max_rank) {
    auto s = find(id);
    std::lock_guard<std::mutex> lk(s->mutex);
    s->last_access = now();
    if (s->kind != SessionKind::Rank) throw bad_request("region: not a rank problem");
    const int k = max_rank ? *max_rank : default_region_rank(s->problem, s->nu);
    if (k < 1) throw bad_request("region: max_rank must be >= 1");
    const ThresholdPolicy& p = *s->solution->policy;
    return region_json(p, stopping_region(p, k));
}

json Advisor::state(const std::string& id) {
    auto s = find(id);
    std::lock_guard<std::mutex> lk(s->mutex);
    s->last_access = now();
    return s->state_json();
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        send_json(res, 200, f());
    } catch (const ApiError& e) {
        send_json(res, e.status(), e.to_json());
    } catch (const json::exception& e) {
        send_json(res, 400, {{"code", "bad_request"}, {"message", e.what()}});
    } catch (const std::exception& e) {
        send_json(res, 500, {{"code", "internal"}, {"message", e.what()}});
    }
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::exception&) {
        throw ApiError(400, "bad_request", "request body is not valid JSON");
    }
}

}  // namespace

AdvisorServer::AdvisorServer(Advisor& advisor) : advisor_(advisor), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });
    srv.Get("/problems", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { return advisor_.list_problems(); });
    });
    srv.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return advisor_.create_session(parse_body(req)); });
    });
    srv.Post(R"(/sessions/([0-9a-zA-Z]+)/observe)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return advisor_.observe(req.matches[1], parse_body(req)); });
    });
    srv.Get(R"(/sessions/([0-9a-zA-Z]+)/region)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::optional<int> k;
            if (req.has_param("max_rank")) {
                try {
                    k = std::stoi(req.get_param_value("max_rank"));
                } catch (const std::exception&) {
                    throw ApiError(400, "bad_request", "max_rank must be an integer");
                }
            }
            return advisor_.region(req.matches[1], k);
        });
    });
    srv.Get(R"(/sessions/([0-9a-zA-Z]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return advisor_.state(req.matches[1]); });
    });
    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) send_json(res, res.status, {{"code", "http_" + std::to_string(res.status)}, {"message", "no such route"}});
    });
}

AdvisorServer::~AdvisorServer() { stop(); }

int AdvisorServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        if (port_ < 0) throw std::runtime_error("serve: could not bind an ephemeral port");
    } else {
        if (!server_->bind_to_port(host, port)) throw std::runtime_error("serve: port " + std::to_string(port) + " is busy");
        port_ = port;
    }
    return port_;
}

void AdvisorServer::listen() { server_->listen_after_bind(); }

void AdvisorServer::start() {
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void AdvisorServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
    advisor_.flush();
}

}  // namespace seqsel
