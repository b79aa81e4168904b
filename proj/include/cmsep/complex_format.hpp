#pragma once

#include <string>
#include <string_view>

#include "cmsep/lattice.hpp"

namespace cmsep {

/// "a+bi" / "a-bi" with the shortest round-trip decimal for each part.
std::string format_complex(cplx z);

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i" (decimal or exponent floats,
/// surrounding blanks allowed). Throws InputError on anything else.
cplx parse_complex(std::string_view text);

/// Shortest round-trip decimal of a double.
std::string format_double(double x);

}  // namespace cmsep
