#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "cosmo/condnet/checkpoint.hpp"
#include "cosmo/eventlog/event_log.hpp"
#include "cosmo/interface/jobs.hpp"
#include "cosmo/interface/workspace.hpp"

namespace cosmo::interface {

struct ServiceOptions {
    std::filesystem::path workspace = "cosmo-workspace";
    std::size_t workers = 2;
};

// "host:port" or "host" (port 8080); COSMO_ADDR when set.
struct Address {
    std::string host = "127.0.0.1";
    int port = 8080;
};
Address parse_address(const std::string& text);

// HTTP/JSON front end over the pipeline and a workspace.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws on failure.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void run();
    void stop();

    const Workspace& workspace() const;
    JobQueue& jobs();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Artifact access shared with the command line.
eventlog::EventLog load_log(const Workspace& ws, const std::string& id);
condnet::Checkpoint load_checkpoint(const Workspace& ws, const std::string& id);

} // namespace cosmo::interface
