#include "cosmo/declare/evaluate.hpp"

namespace cosmo::declare {
namespace {

int count(std::span<const int> trace, int x) {
    int n = 0;
    for (int v : trace) n += v == x;
    return n;
}

bool response(std::span<const int> trace, int a, int b) {
    bool pending = false;
    for (int v : trace) {
        if (v == a) pending = true;
        else if (v == b) pending = false;
    }
    return !pending;
}

bool precedence(std::span<const int> trace, int a, int b) {
    for (int v : trace) {
        if (v == a) return true;
        if (v == b) return false;
    }
    return true;
}

bool alternate_response(std::span<const int> trace, int a, int b) {
    bool pending = false;
    for (int v : trace) {
        if (v == a) {
            if (pending) return false;
            pending = true;
        } else if (v == b) {
            pending = false;
        }
    }
    return !pending;
}

bool chain_response(std::span<const int> trace, int a, int b) {
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i] == a && (i + 1 == trace.size() || trace[i + 1] != b)) return false;
    return true;
}

bool not_succession(std::span<const int> trace, int a, int b) {
    bool seen_a = false;
    for (int v : trace) {
        if (v == b && seen_a) return false;
        if (v == a) seen_a = true;
    }
    return true;
}

bool not_chain_succession(std::span<const int> trace, int a, int b) {
    for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        if (trace[i] == a && trace[i + 1] == b) return false;
    return true;
}

} // namespace

bool evaluate(Template t, int a, int b, std::span<const int> trace) {
    switch (t) {
    case Template::Existence: return count(trace, a) >= 1;
    case Template::Absence: return count(trace, a) == 0;
    case Template::Exactly1: return count(trace, a) == 1;
    case Template::Choice: return count(trace, a) >= 1 || count(trace, b) >= 1;
    case Template::ExclusiveChoice: return (count(trace, a) >= 1) != (count(trace, b) >= 1);
    case Template::Response: return response(trace, a, b);
    case Template::Precedence: return precedence(trace, a, b);
    case Template::AlternateResponse: return alternate_response(trace, a, b);
    case Template::ChainResponse: return chain_response(trace, a, b);
    case Template::NotCoExistence: return !(count(trace, a) >= 1 && count(trace, b) >= 1);
    case Template::NotSuccession: return not_succession(trace, a, b);
    case Template::NotChainSuccession: return not_chain_succession(trace, a, b);
    }
    return false;
}

} // namespace cosmo::declare
