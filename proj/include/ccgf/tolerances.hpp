#pragma once

namespace ccgf {

// Shared numerical tolerances. kAlgebraTol doubles as the eigenvalue floor for
// pseudo-inverses and as the positivity cutoff, so the positivity test and the
// square-root domain agree by construction.
inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kCommutationTol = 1e-10;
inline constexpr double kVerdictTol = 1e-9;

}  // namespace ccgf
