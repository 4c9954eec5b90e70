#pragma once

#include <vector>

#include "hbar/filtered_complex.hpp"

namespace hbar {

/// Every face-closed set of simplices of the 3-simplex on vertices 0..3 with
/// at most max_simplices members, in a fixed order.
std::vector<SimplicialComplex> tetrahedron_subcomplexes(std::size_t max_simplices);

/// Random face-closed complex inside the full simplex on `vertices` vertices,
/// with at most max_generators simplices. Each simplex gets the max action of
/// its faces plus a dyadic increment that is zero with probability 1/3, so
/// the filtration is general (not lower-star) and has ties.
FilteredComplexF2 random_filtered_complex(Rng& rng, int vertices, std::size_t max_generators);

/// Octahedral sphere with height values giving a minimum, a saddle, a local
/// maximum and a global maximum at 0, 1, 2, 3.
FilteredComplexF2 sphere_morse_complex();

/// Triangle boundary with vertex values (0, 1, 0.5).
FilteredComplexF2 circle_complex();

}  // namespace hbar
