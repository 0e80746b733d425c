#pragma once

#include <span>

#include "cosmo/declare/templates.hpp"

namespace cosmo::declare {

// Finite-trace satisfaction of a template grounded on activity ids `a`, `b`
// (b is ignored for unary templates) over an id-encoded trace. Relation
// templates without activations are vacuously satisfied.
//
//   Existence(a)          count(a) >= 1
//   Absence(a)            count(a) == 0
//   Exactly1(a)           count(a) == 1
//   Choice(a,b)           a or b occurs
//   ExclusiveChoice(a,b)  exactly one of a, b occurs
//   Response(a,b)         every a is followed later by some b
//   Precedence(a,b)       no b before the first a
//   AlternateResponse(a,b) every a is followed by a b before the next a
//   ChainResponse(a,b)    every a is immediately followed by b
//   NotCoExistence(a,b)   not both a and b occur
//   NotSuccession(a,b)    no b after any a
//   NotChainSuccession(a,b) no a immediately followed by b
bool evaluate(Template t, int a, int b, std::span<const int> trace);

} // namespace cosmo::declare
