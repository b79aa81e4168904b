#pragma once

// Slow reference evaluators built from the classical lattice sum and product
//
//   wp(z)    = 1/z^2 + sum' [1/(z-w)^2 - 1/w^2]
//   zeta(z)  = 1/z   + sum' [1/(z-w) + 1/w + z/w^2]
//   sigma(z) = z prod' (1 - z/w) exp(z/w + z^2/(2w^2))
//
// over w = m*omega1 + n*omega2. Each row n is summed over all m in closed form
// with the partial-fraction identities for pi*cot and pi^2*csc^2; rows are then
// added for |n| <= cutoff. The row terms decay like |q|^(2|n|) (q the nome), so
// the truncation error after `cutoff` rows is O(exp(2*pi*|Im u|) |q|^(2(cutoff+1)))
// with u = z/omega1; oracle_truncation_bound returns a computable upper estimate.
//
// These share no code with the q-series evaluators in lattice.hpp.

#include "cmsep/lattice.hpp"

namespace cmsep {

cplx oracle_wp(cplx z, const PeriodLattice& lat, int cutoff);
cplx oracle_wzeta(cplx z, const PeriodLattice& lat, int cutoff);
cplx oracle_wsigma(cplx z, const PeriodLattice& lat, int cutoff);
cplx oracle_log_wsigma(cplx z, const PeriodLattice& lat, int cutoff);

enum class OracleKind { wp, zeta, log_sigma };

/// Upper estimate of the absolute truncation error of the given oracle at `cutoff`
/// (for log_sigma: of log sigma, i.e. the relative error of sigma).
double oracle_truncation_bound(OracleKind kind, cplx z, const PeriodLattice& lat, int cutoff);

}  // namespace cmsep
