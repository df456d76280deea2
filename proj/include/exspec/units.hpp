// units.hpp — Unit conventions: energies in eV, times in fs.

#pragma once

namespace exspec::units {

// Reduced Planck constant in eV·fs. All propagators convert an energy E (eV)
// to an angular frequency E/hbar (rad/fs).
inline constexpr double hbar = 0.6582119569;

} // namespace exspec::units
