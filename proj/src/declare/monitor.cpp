#include "cosmo/declare/monitor.hpp"

namespace cosmo::declare {
namespace {

// Bit flags for the "seen" family.
constexpr MonitorState kSeenA = 1;
constexpr MonitorState kSeenB = 2;
constexpr MonitorState kViolated = 4;

} // namespace

MonitorState monitor_step(Template t, MonitorState s, int a, int b, int x) {
    switch (t) {
    case Template::Existence:
    case Template::Absence:
    case Template::Exactly1:
        // count of a, saturating at 2
        return x == a && s < 2 ? static_cast<MonitorState>(s + 1) : s;
    case Template::Choice:
    case Template::ExclusiveChoice:
    case Template::NotCoExistence:
        if (x == a) return s | kSeenA;
        if (x == b) return s | kSeenB;
        return s;
    case Template::Response:
        // 0: nothing pending, 1: an a awaits a b
        if (x == a) return 1;
        if (x == b) return 0;
        return s;
    case Template::Precedence:
        // 0: no a yet, 1: a seen (satisfied for good), 2: violated
        if (s == 0 && x == a) return 1;
        if (s == 0 && x == b) return 2;
        return s;
    case Template::AlternateResponse:
        // 0: idle, 1: pending, 2: violated
        if (s == 2) return 2;
        if (x == a) return s == 1 ? 2 : 1;
        if (x == b) return 0;
        return s;
    case Template::ChainResponse:
        // 0: ok, 1: previous symbol was a, 2: violated
        if (s == 2) return 2;
        if (s == 1) return x == b ? 0 : 2;
        return x == a ? 1 : 0;
    case Template::NotSuccession:
        if (s & kViolated) return s;
        if (x == b && (s & kSeenA)) return kViolated;
        return x == a ? static_cast<MonitorState>(s | kSeenA) : s;
    case Template::NotChainSuccession:
        // 0: idle, 1: previous symbol was a, 2: violated
        if (s == 2) return 2;
        if (s == 1 && x == b) return 2;
        return x == a ? 1 : 0;
    }
    return s;
}

bool monitor_accepts(Template t, MonitorState s) {
    switch (t) {
    case Template::Existence: return s >= 1;
    case Template::Absence: return s == 0;
    case Template::Exactly1: return s == 1;
    case Template::Choice: return s != 0;
    case Template::ExclusiveChoice: return s == kSeenA || s == kSeenB;
    case Template::NotCoExistence: return s != (kSeenA | kSeenB);
    case Template::Response: return s == 0;
    case Template::Precedence: return s != 2;
    case Template::AlternateResponse: return s == 0;
    case Template::ChainResponse: return s == 0;
    case Template::NotSuccession: return !(s & kViolated);
    case Template::NotChainSuccession: return s != 2;
    }
    return false;
}

} // namespace cosmo::declare
