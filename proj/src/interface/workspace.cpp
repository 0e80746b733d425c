#include "cosmo/interface/workspace.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace cosmo::interface {

namespace {

constexpr std::string_view kKinds[] = {"uploads", "logs", "universes", "checkpoints", "reports", "jobs"};

bool safe_name(std::string_view name) {
    if (name.empty() || name == "." || name == "..") return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) return false;
    return true;
}

} // namespace

Workspace::Workspace(std::filesystem::path root) : root_(std::move(root)) {
    for (auto kind : kKinds) std::filesystem::create_directories(root_ / kind);
}

std::filesystem::path Workspace::file(std::string_view kind, std::string_view name) const {
    if (!safe_name(kind) || !safe_name(name)) throw ValidationError("invalid id \"" + std::string(name) + "\"");
    return root_ / kind / name;
}

bool Workspace::contains(std::string_view kind, std::string_view name) const {
    return safe_name(name) && std::filesystem::exists(file(kind, name));
}

void Workspace::put(std::string_view kind, std::string_view name, std::string_view bytes) const {
    write_file(file(kind, name), bytes);
}

std::string Workspace::get(std::string_view kind, std::string_view name) const {
    if (!contains(kind, name)) throw NotFound("unknown " + std::string(kind) + " entry \"" + std::string(name) + "\"");
    return read_file(file(kind, name));
}

std::vector<std::string> Workspace::list(std::string_view kind) const {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(root_ / kind))
        if (e.is_regular_file()) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    static std::atomic<unsigned> counter{0};
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "-" +
           std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace cosmo::interface
