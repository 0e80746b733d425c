#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cosmo/interface/workspace.hpp"

namespace cosmo::interface {

enum class JobKind { Train, Simulate, Discover };
enum class JobStatus { Queued, Running, Done, Failed };

std::string_view name(JobKind k);
std::string_view name(JobStatus s);

struct JobRecord {
    std::string id;
    JobKind kind = JobKind::Train;
    JobStatus status = JobStatus::Queued;
    double progress = 0.0;
    std::string result;  // set iff done, e.g. "/reports/<id>"
    std::string error;   // set iff failed
    unsigned attempt = 1;

    bool terminal() const noexcept { return status == JobStatus::Done || status == JobStatus::Failed; }
    nlohmann::json to_json() const;
    static JobRecord from_json(const nlohmann::json& j);
};

using ProgressFn = std::function<void(double)>;
// Returns the result reference.
using JobTask = std::function<std::string(const ProgressFn&)>;

// Single-process queue with a fixed set of worker threads. Records are
// persisted under jobs/ on every status change; jobs found queued or running
// at start-up were interrupted and are marked failed.
class JobQueue {
public:
    JobQueue(const Workspace& ws, std::size_t workers = 2);
    ~JobQueue();
    JobQueue(const JobQueue&) = delete;
    JobQueue& operator=(const JobQueue&) = delete;

    // Known ids are returned as they are, except failed ones, which are
    // queued again as a new attempt.
    JobRecord submit(const std::string& id, JobKind kind, JobTask task);
    std::optional<JobRecord> get(const std::string& id) const;
    // Blocks until the job is terminal or the timeout expires.
    std::optional<JobRecord> wait(const std::string& id, std::chrono::milliseconds timeout) const;

private:
    struct Pending {
        std::string id;
        JobTask task;
    };

    void work(std::stop_token stop);
    void update(const std::string& id, const std::function<void(JobRecord&)>& change, bool persist);

    const Workspace& ws_;
    mutable std::mutex mutex_;
    mutable std::condition_variable_any changed_;
    std::map<std::string, JobRecord> records_;
    std::deque<Pending> pending_;
    std::vector<std::jthread> workers_;
};

} // namespace cosmo::interface
