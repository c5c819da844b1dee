#pragma once

#include <string>

#include "fearbif/simulator.hpp"

namespace fearbif::app {

/// Parses an initial-history expression in x and t.
///
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := ('+' | '-') factor | number | 'x' | 't' | 'cos' '(' expr ')' | '(' expr ')'
///
/// Numbers are plain decimals with an optional exponent. Anything else is a
/// ValidationError that names the offending position.
[[nodiscard]] HistoryFn parse_history(const std::string& text);

}  // namespace fearbif::app
