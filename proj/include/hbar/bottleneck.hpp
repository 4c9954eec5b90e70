#pragma once

#include "hbar/barcode.hpp"

namespace hbar {

/// Bottleneck distance between barcodes. Infinite bars match only infinite
/// bars (cost |start difference|); a mismatch in their count gives +inf.
/// A finite bar may also be matched to the diagonal at cost length/2.
double bottleneck_distance(const Barcode& a, const Barcode& b);

}  // namespace hbar
