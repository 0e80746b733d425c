#pragma once

#include <cstdint>

#include "cosmo/declare/templates.hpp"

namespace cosmo::declare {

// Deterministic finite automaton per grounded template. States are small
// integers; every template starts in state 0. Reading the trace left to
// right and testing accepting() on the final state decides satisfaction.
using MonitorState = std::uint8_t;

MonitorState monitor_step(Template t, MonitorState s, int a, int b, int symbol);
bool monitor_accepts(Template t, MonitorState s);

} // namespace cosmo::declare
