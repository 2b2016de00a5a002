#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "seqsel/problems.hpp"

namespace httplib {
class Server;
}

namespace seqsel {

// An error carrying its HTTP status and a short machine-readable code.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}
    int status() const { return status_; }
    const std::string& code() const { return code_; }
    nlohmann::json to_json() const { return {{"code", code_}, {"message", what()}}; }

private:
    int status_;
    std::string code_;
};

using Clock = std::chrono::steady_clock;

struct AdvisorConfig {
    std::chrono::milliseconds session_ttl{std::chrono::minutes(30)};
    std::chrono::milliseconds solve_budget{std::chrono::seconds(10)};
    // Append-only JSON-lines log replayed on construction.
    std::optional<std::string> snapshot_path;
    std::function<Clock::time_point()> clock;
};

enum class SessionState { Active, Stopped, Exhausted };

std::string to_string(SessionState s);

class Advisor {
public:
    explicit Advisor(AdvisorConfig config = {});
    ~Advisor();
    Advisor(const Advisor&) = delete;
    Advisor& operator=(const Advisor&) = delete;

    nlohmann::json list_problems() const;
    nlohmann::json create_session(const nlohmann::json& spec);
    // Body: {r, accept = false, dry_run = false}; non-rank problems take y (or success / x).
    nlohmann::json observe(const std::string& id, const nlohmann::json& body);
    nlohmann::json region(const std::string& id, std::optional<int> max_rank = std::nullopt);
    nlohmann::json state(const std::string& id);

    std::size_t expire();
    std::size_t session_count() const;
    void flush();
    // Lines skipped during snapshot replay.
    std::size_t replay_errors() const { return replay_errors_; }

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id);
    std::string new_id();
    Clock::time_point now() const;
    void log(const nlohmann::json& line);
    void replay(const std::string& path);
    std::shared_ptr<Session> build_session(const std::string& id, const nlohmann::json& spec, bool budgeted);
    nlohmann::json apply_observe(Session& s, const nlohmann::json& body);

    AdvisorConfig config_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::mutex log_mutex_;
    std::ofstream log_;
    std::size_t replay_errors_ = 0;
    std::uint64_t id_state_;
};

// HTTP front end over an Advisor.
class AdvisorServer {
public:
    explicit AdvisorServer(Advisor& advisor);
    ~AdvisorServer();

    // Binds to host:port (port 0 picks a free one); throws std::runtime_error if busy.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void listen();
    void start();
    void stop();
    int port() const { return port_; }

private:
    Advisor& advisor_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace seqsel
