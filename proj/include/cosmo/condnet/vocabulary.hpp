#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cosmo/eventlog/event_log.hpp"

namespace cosmo::condnet {

// Activity <-> token index. Indices 0..2 are reserved.
class Vocabulary {
public:
    static constexpr int PAD = 0;
    static constexpr int BOS = 1;
    static constexpr int EOS = 2;
    static constexpr int kReserved = 3;

    Vocabulary() = default;
    // Labels are sorted and deduplicated; token of labels[i] is i + 3.
    explicit Vocabulary(std::vector<std::string> labels);
    static Vocabulary fit(const eventlog::EventLog& log);

    std::size_t size() const noexcept { return labels_.size() + kReserved; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    // -1 when unknown.
    int index(const std::string& label) const;
    // Unknown labels map to PAD and bump `unknown`.
    int encode(const std::string& label, std::size_t& unknown) const;
    // "<pad>", "<bos>", "<eos>" for reserved tokens.
    const std::string& label(int token) const;

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

    friend bool operator==(const Vocabulary& x, const Vocabulary& y) { return x.labels_ == y.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
};

} // namespace cosmo::condnet
