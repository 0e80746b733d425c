#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo/error.hpp"

namespace cosmo::interface {

// Unknown artifact or job id.
class NotFound : public DataError {
public:
    using DataError::DataError;
};

// Directory tree holding every artifact under its content-addressed id:
// uploads/ logs/ universes/ checkpoints/ reports/ jobs/.
class Workspace {
public:
    explicit Workspace(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    // root/kind/name; throws ValidationError on names that could escape it.
    std::filesystem::path file(std::string_view kind, std::string_view name) const;
    bool contains(std::string_view kind, std::string_view name) const;

    // Writes to a temporary sibling and renames it into place.
    void put(std::string_view kind, std::string_view name, std::string_view bytes) const;
    // Throws NotFound.
    std::string get(std::string_view kind, std::string_view name) const;
    std::vector<std::string> list(std::string_view kind) const;

private:
    std::filesystem::path root_;
};

// Reads a whole file; throws DataError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
// Atomic replace via a temporary sibling.
void write_file(const std::filesystem::path& path, std::string_view bytes);

} // namespace cosmo::interface
