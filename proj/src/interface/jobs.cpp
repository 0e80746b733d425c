#include "cosmo/interface/jobs.hpp"

#include <algorithm>
#include <exception>

namespace cosmo::interface {

std::string_view name(JobKind k) {
    switch (k) {
    case JobKind::Train: return "train";
    case JobKind::Simulate: return "simulate";
    case JobKind::Discover: return "discover";
    }
    return "?";
}

std::string_view name(JobStatus s) {
    switch (s) {
    case JobStatus::Queued: return "queued";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
    }
    return "?";
}

nlohmann::json JobRecord::to_json() const {
    return {{"id", id},
            {"kind", name(kind)},
            {"status", name(status)},
            {"progress", progress},
            {"result", status == JobStatus::Done ? nlohmann::json(result) : nlohmann::json(nullptr)},
            {"error", status == JobStatus::Failed ? nlohmann::json(error) : nlohmann::json(nullptr)},
            {"attempt", attempt}};
}

JobRecord JobRecord::from_json(const nlohmann::json& j) {
    JobRecord r;
    r.id = j.at("id").get<std::string>();
    auto kind = j.at("kind").get<std::string>();
    for (auto k : {JobKind::Train, JobKind::Simulate, JobKind::Discover})
        if (name(k) == kind) r.kind = k;
    auto status = j.at("status").get<std::string>();
    for (auto s : {JobStatus::Queued, JobStatus::Running, JobStatus::Done, JobStatus::Failed})
        if (name(s) == status) r.status = s;
    r.progress = j.value("progress", 0.0);
    if (j.contains("result") && j["result"].is_string()) r.result = j["result"].get<std::string>();
    if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
    r.attempt = j.value("attempt", 1u);
    return r;
}

JobQueue::JobQueue(const Workspace& ws, std::size_t workers) : ws_(ws) {
    for (const auto& file : ws_.list("jobs")) {
        if (!file.ends_with(".json")) continue;
        JobRecord r;
        try {
            r = JobRecord::from_json(nlohmann::json::parse(ws_.get("jobs", file)));
        } catch (const std::exception&) {
            continue;
        }
        if (!r.terminal()) {
            r.status = JobStatus::Failed;
            r.error = "interrupted by a service restart";
            ws_.put("jobs", r.id + ".json", r.to_json().dump(2));
        }
        records_[r.id] = r;
    }
    for (std::size_t i = 0; i < std::max<std::size_t>(workers, 1); ++i)
        workers_.emplace_back([this](std::stop_token stop) { work(stop); });
}

JobQueue::~JobQueue() {
    for (auto& w : workers_) w.request_stop();
    changed_.notify_all();
    workers_.clear();
}

JobRecord JobQueue::submit(const std::string& id, JobKind kind, JobTask task) {
    std::unique_lock lock(mutex_);
    unsigned attempt = 1;
    if (auto it = records_.find(id); it != records_.end()) {
        if (it->second.status != JobStatus::Failed) return it->second;
        attempt = it->second.attempt + 1;
    }
    JobRecord r{id, kind, JobStatus::Queued, 0.0, {}, {}, attempt};
    records_[id] = r;
    ws_.put("jobs", id + ".json", r.to_json().dump(2));
    pending_.push_back({id, std::move(task)});
    changed_.notify_all();
    return r;
}

std::optional<JobRecord> JobQueue::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::optional<JobRecord> JobQueue::wait(const std::string& id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    changed_.wait_for(lock, timeout, [&] {
        auto it = records_.find(id);
        return it == records_.end() || it->second.terminal();
    });
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void JobQueue::update(const std::string& id, const std::function<void(JobRecord&)>& change, bool persist) {
    std::lock_guard lock(mutex_);
    auto& r = records_.at(id);
    change(r);
    if (persist) ws_.put("jobs", id + ".json", r.to_json().dump(2));
    changed_.notify_all();
}

void JobQueue::work(std::stop_token stop) {
    while (true) {
        Pending job;
        {
            std::unique_lock lock(mutex_);
            if (!changed_.wait(lock, stop, [&] { return !pending_.empty(); })) return;
            job = std::move(pending_.front());
            pending_.pop_front();
        }
        update(job.id, [](JobRecord& r) { r.status = JobStatus::Running; }, true);
        try {
            auto result = job.task([&](double p) {
                update(job.id, [p](JobRecord& r) { r.progress = std::clamp(p, 0.0, 1.0); }, false);
            });
            update(job.id,
                   [&](JobRecord& r) {
                       r.status = JobStatus::Done;
                       r.progress = 1.0;
                       r.result = result;
                   },
                   true);
        } catch (const std::exception& e) {
            std::string what = e.what();
            update(job.id,
                   [&](JobRecord& r) {
                       r.status = JobStatus::Failed;
                       r.error = what;
                   },
                   true);
        }
    }
}

} // namespace cosmo::interface
