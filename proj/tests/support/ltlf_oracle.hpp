#pragma once

// Brute-force reference semantics for the DECLARE templates, written
// directly as quantified statements over trace positions. Deliberately
// shares no code with the library's evaluator or monitors.

#include <string>
#include <vector>

namespace cosmo::testing {

inline int oracle_count(const std::vector<int>& t, int x) {
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] == x) n++;
    return n;
}

inline bool oracle_eval(const std::string& tmpl, int a, int b, const std::vector<int>& t) {
    const auto n = t.size();
    auto exists_after = [&](std::size_t i, int x) {
        for (std::size_t j = i + 1; j < n; ++j)
            if (t[j] == x) return true;
        return false;
    };
    if (tmpl == "Existence") return oracle_count(t, a) >= 1;
    if (tmpl == "Absence") return oracle_count(t, a) == 0;
    if (tmpl == "Exactly1") return oracle_count(t, a) == 1;
    if (tmpl == "Choice") return oracle_count(t, a) > 0 || oracle_count(t, b) > 0;
    if (tmpl == "ExclusiveChoice") {
        bool ha = oracle_count(t, a) > 0, hb = oracle_count(t, b) > 0;
        return (ha || hb) && !(ha && hb);
    }
    if (tmpl == "Response") {
        for (std::size_t i = 0; i < n; ++i)
            if (t[i] == a && !exists_after(i, b)) return false;
        return true;
    }
    if (tmpl == "Precedence") {
        for (std::size_t j = 0; j < n; ++j) {
            if (t[j] != b) continue;
            bool before = false;
            for (std::size_t i = 0; i < j; ++i)
                if (t[i] == a) before = true;
            if (!before) return false;
        }
        return true;
    }
    if (tmpl == "AlternateResponse") {
        for (std::size_t i = 0; i < n; ++i) {
            if (t[i] != a) continue;
            // some j > i with t[j] == b and no a strictly between i and j
            bool ok = false;
            for (std::size_t j = i + 1; j < n && !ok; ++j) {
                if (t[j] != b) continue;
                bool clean = true;
                for (std::size_t k = i + 1; k < j; ++k)
                    if (t[k] == a) clean = false;
                ok = clean;
            }
            if (!ok) return false;
        }
        return true;
    }
    if (tmpl == "ChainResponse") {
        for (std::size_t i = 0; i < n; ++i)
            if (t[i] == a && !(i + 1 < n && t[i + 1] == b)) return false;
        return true;
    }
    if (tmpl == "NotCoExistence") return !(oracle_count(t, a) > 0 && oracle_count(t, b) > 0);
    if (tmpl == "NotSuccession") {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (t[i] == a && t[j] == b) return false;
        return true;
    }
    if (tmpl == "NotChainSuccession") {
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (t[i] == a && t[i + 1] == b) return false;
        return true;
    }
    return false;
}

// All non-empty traces over {0..k-1} up to max_len, shortest first.
inline std::vector<std::vector<int>> enumerate_traces(int k, int max_len) {
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> layer{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& p : layer)
            for (int s = 0; s < k; ++s) {
                auto q = p;
                q.push_back(s);
                next.push_back(q);
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

} // namespace cosmo::testing
