#pragma once

#include <iosfwd>

namespace cachelb {

// Small exhaustive oracle checks (geometry vs BFS, Voronoi vs brute-force
// argmin, nearest-replica minimality, search-route agreement, pmf
// normalisation). Writes one line per check; returns true if all pass.
bool run_selftest(std::ostream& log);

}  // namespace cachelb
