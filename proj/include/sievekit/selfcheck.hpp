#pragma once

#include <iosfwd>

namespace sievekit::selfcheck {

/// Replays the full verification battery against the published values,
/// printing one PASS/FAIL line per criterion. Returns true iff all pass.
bool run_all(std::ostream& out, unsigned threads = 0);

}  // namespace sievekit::selfcheck
