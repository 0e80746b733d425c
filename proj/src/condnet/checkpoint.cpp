#include "cosmo/condnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cosmo/error.hpp"
#include "cosmo/hash.hpp"

namespace cosmo::condnet {

namespace {

constexpr std::string_view kMagic = "COSMOCK1";
constexpr std::size_t kDigest = 32;

template <class T>
void put(std::string& out, T v) {
    static_assert(std::is_integral_v<T> || std::is_floating_point_v<T>);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    auto bits = std::bit_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <class T>
T get(std::string_view in, std::size_t& pos) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    if (pos + sizeof(T) > in.size()) throw CheckpointError("checkpoint truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += sizeof(T);
    return std::bit_cast<T>(bits);
}

} // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
    const auto& net = ck.net;
    nlohmann::json tensors = nlohmann::json::array();
    std::size_t offset = 0;
    net.params().for_each([&](const std::string& name, const MatrixXd& t) {
        tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"offset", offset}});
        offset += static_cast<std::size_t>(t.size());
    });
    nlohmann::json pool = nlohmann::json::array();
    for (const auto& b : ck.base_pool)
        pool.push_back({{"case_id", b.case_id}, {"first_activity", b.first_activity}, {"bits", b.bits}});
    nlohmann::json meta = {{"shape", net.shape().to_json()},
                           {"vocabulary", net.vocabulary().to_json()},
                           {"exec_normalizer", net.exec_normalizer().to_json()},
                           {"remaining_normalizer", net.remaining_normalizer().to_json()},
                           {"universe", ck.universe.to_json()},
                           {"universe_fingerprint", ck.universe.fingerprint()},
                           {"min_support", ck.universe.min_support()},
                           {"source_fingerprint", ck.universe.source_fingerprint()},
                           {"length_cap", ck.length_cap},
                           {"train_config", ck.train_config},
                           {"tensors", tensors},
                           {"base_pool", pool}};
    std::string text = meta.dump();
    std::string out(kMagic);
    put(out, kCheckpointVersion);
    put(out, static_cast<std::uint64_t>(text.size()));
    out += text;
    net.params().for_each([&](const std::string&, const MatrixXd& t) {
        // column-major, as Eigen stores it
        for (Eigen::Index i = 0; i < t.size(); ++i) put(out, t.data()[i]);
    });
    auto digest = sha256(out);
    out.append(reinterpret_cast<const char*>(digest.data()), digest.size());
    return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
    if (bytes.size() < kMagic.size() + 12 + kDigest || bytes.substr(0, kMagic.size()) != kMagic)
        throw CheckpointError("not a checkpoint file (bad magic or truncated)");
    auto body = bytes.substr(0, bytes.size() - kDigest);
    auto digest = sha256(body);
    if (std::memcmp(digest.data(), bytes.data() + body.size(), kDigest) != 0)
        throw CheckpointError("checkpoint checksum mismatch (corrupted or truncated file)");
    std::size_t pos = kMagic.size();
    auto version = get<std::uint32_t>(body, pos);
    if (version != kCheckpointVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                              std::to_string(kCheckpointVersion) + ")");
    auto meta_len = get<std::uint64_t>(body, pos);
    if (meta_len > body.size() - pos) throw CheckpointError("checkpoint metadata truncated");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(body.substr(pos, meta_len));
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("checkpoint metadata unreadable: ") + e.what());
    }
    pos += meta_len;
    try {
        NetShape shape = NetShape::from_json(meta.at("shape"));
        Parameters params = Parameters::zeros(shape);
        std::size_t data_start = pos;
        const auto& table = meta.at("tensors");
        std::size_t i = 0;
        params.for_each([&](const std::string& name, MatrixXd& t) {
            if (i >= table.size() || table[i].at("name") != name ||
                table[i].at("rows").get<Eigen::Index>() != t.rows() || table[i].at("cols").get<Eigen::Index>() != t.cols())
                throw CheckpointError("tensor table does not match the network shape at " + name);
            std::size_t p = data_start + 8 * table[i].at("offset").get<std::size_t>();
            for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = get<double>(body, p);
            pos = std::max(pos, p);
            ++i;
        });
        if (i != table.size()) throw CheckpointError("tensor table has extra entries");
        if (pos != body.size()) throw CheckpointError("checkpoint has trailing bytes");

        Checkpoint ck{ConditionedNet(shape, Vocabulary::from_json(meta.at("vocabulary")),
                                     TimeNormalizer::from_json(meta.at("exec_normalizer")),
                                     TimeNormalizer::from_json(meta.at("remaining_normalizer")), std::move(params)),
                      {}, meta.at("length_cap").get<std::size_t>(), meta.value("train_config", nlohmann::json::object()),
                      {}};
        auto u = declare::ConstraintUniverse::from_json(meta.at("universe"));
        ck.universe = declare::ConstraintUniverse(u.instances(), meta.value("min_support", 0.0),
                                                  meta.value("source_fingerprint", std::string()));
        if (ck.universe.fingerprint() != meta.at("universe_fingerprint").get<std::string>())
            throw CheckpointError("stored universe does not match its fingerprint");
        if (ck.universe.size() != shape.m) throw CheckpointError("universe size differs from the condition width");
        for (const auto& b : meta.at("base_pool"))
            ck.base_pool.push_back({b.at("case_id").get<std::string>(), b.at("first_activity").get<std::string>(),
                                    b.at("bits").get<std::vector<std::uint8_t>>()});
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("checkpoint metadata malformed: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
    auto bytes = serialize_checkpoint(ck);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_checkpoint(buf.str());
}

void require_universe(const Checkpoint& ck, const declare::ConstraintUniverse& u) {
    if (u.fingerprint() != ck.universe.fingerprint())
        throw FingerprintMismatch("universe " + u.fingerprint() + " (" + std::to_string(u.size()) +
                                  " constraints) does not match the checkpoint's universe " +
                                  ck.universe.fingerprint() + " (" + std::to_string(ck.universe.size()) + ")");
}

} // namespace cosmo::condnet
