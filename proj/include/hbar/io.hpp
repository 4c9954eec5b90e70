#pragma once

#include <string>
#include <variant>

#include "hbar/dynamics.hpp"
#include "hbar/filtered_complex.hpp"
#include "hbar/integral_geometry.hpp"
#include "hbar/novikov.hpp"
#include "hbar/toric.hpp"

namespace hbar {

/// Whole file as a string; throws Error naming the path.
std::string read_file(const std::string& path);
/// Writes to path.tmp and renames, so a failed run leaves no partial file.
void write_file(const std::string& path, const std::string& text);

/// {coefficients: "F2" | "Novikov-F2", generators: [{id, action, degree?}],
///  boundary: [{from, to, exponents?}]}. A boundary entry puts `to` (times
/// Σ T^a over exponents for Novikov) into ∂(from). Parse errors report
/// line and column; field errors name the entry.
using ComplexInput = std::variant<FilteredComplexF2, NovikovComplex>;
ComplexInput complex_from_json(const std::string& text);

/// {kind: "doubling", degree?} | {kind: "rotation", alpha} |
/// {kind: "linear_torus", matrix: [[a, b], [c, d]]} | {kind: "shift", alphabet?} |
/// {kind: "custom_grid", degree, table: [...]}.
DynamicalSystem system_from_json(const std::string& text);

/// {kind: "power", c, p, lo?, hi?} | {kind: "poly", coeffs, lo?, hi?} |
/// {kind: "table", slopes, lo?, hi?} | {kind: "poly2", coeffs, rect}.
ConvexProfile profile_from_json(const std::string& text);

/// {a: [...]}.
EllipsoidSpec ellipsoid_from_json(const std::string& text);

/// {kind: "lines", r} | {kind: "translation", r, core: [[x, y], ...]} |
/// {kind: "cylinder_graph", d, r, segments?}.
Tomograph tomograph_from_json(const std::string& text);

/// One of the toric model specs above, or {kind: "flat_torus", v1, v2}.
using ToricModel = std::variant<ConvexProfile, EllipsoidSpec, LatticeBasis>;
ToricModel toric_model_from_json(const std::string& text);

}  // namespace hbar
