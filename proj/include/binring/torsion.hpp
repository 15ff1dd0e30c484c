#pragma once

#include "binring/linalg.hpp"

namespace binring {

/* Z[A^D] / J^{t+1} as an abelian group, where J is the augmentation ideal
 * of the group algebra of the dual group (realized concretely on the same
 * invariant factors).  The free rank is always 1: the augmentation splits
 * off Z.  "not-finite" when A has free rank. */
FgAbGroup psi(const FgAbGroup& a, int t);

/* (J / J^{t+1})^D: the Pontryagin dual of the torsion part of psi. */
FgAbGroup phi(const FgAbGroup& a, int t);

/* The class of O_K / (pi^t) for K = Q_p(zeta_p) and pi = zeta_p - 1:
 * the cokernel of multiplication by (x-1)^t on Z[x]/(1 + x + ... + x^{p-1}).
 * Independent check for phi(Z/p, t).  "not-prime" guarded. */
FgAbGroup cyclotomic_phi_oracle(const Int& p, int t);

}  // namespace binring
