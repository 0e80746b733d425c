#include "cosmo/condnet/vocabulary.hpp"

#include <algorithm>
#include <array>

#include "cosmo/error.hpp"

namespace cosmo::condnet {

namespace {
const std::array<std::string, 3> kReservedNames{"<pad>", "<bos>", "<eos>"};
}

Vocabulary::Vocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], static_cast<int>(i) + kReserved);
}

Vocabulary Vocabulary::fit(const eventlog::EventLog& log) {
    return Vocabulary({log.activity_set.begin(), log.activity_set.end()});
}

int Vocabulary::index(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

int Vocabulary::encode(const std::string& label, std::size_t& unknown) const {
    int i = index(label);
    if (i >= 0) return i;
    ++unknown;
    return PAD;
}

const std::string& Vocabulary::label(int token) const {
    if (token < 0 || static_cast<std::size_t>(token) >= size())
        throw std::out_of_range("token " + std::to_string(token) + " outside vocabulary");
    if (token < kReserved) return kReservedNames[static_cast<std::size_t>(token)];
    return labels_[static_cast<std::size_t>(token - kReserved)];
}

nlohmann::json Vocabulary::to_json() const { return labels_; }

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw SchemaError("vocabulary must be a JSON array of labels");
    return Vocabulary(j.get<std::vector<std::string>>());
}

} // namespace cosmo::condnet
