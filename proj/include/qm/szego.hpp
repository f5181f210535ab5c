#pragma once

#include <vector>

#include "qm/quotient.hpp"

namespace qm {

// A_{E,m}: compression of toeplitz(P^E, m) to GE_m, in the level's basis.
Mat ae_operator(const GradedQuotient& q, int m);

// V_{E,a} = A_{m+1}^{1/2} T_{E,a} A_m^{-1/2} with T_{E,a} the compressed
// shift weighted by sqrt(n_m / n_{m+1}); reports ||sum V^* V - 1|| per m.
Report ve_isometry_check(const GradedQuotient& q, int mMax);

// D_m = varsigma^(m)(A^{-1/2}(P - A)A^{-1/2}) read on the fiber at each
// point, and least-squares fits of m D_m = a1 + a2/m. Also reports the
// variant scaled by c_{E,m} and phi^E_m([S_E^*, S_E]).
Report hidden_szego(const GradedQuotient& q, int mMin, int mMax, const std::vector<Vec>& points);

// Least-squares a1, a2 for m y_m = a1 + a2 / m.
std::pair<double, double> fit_first_order(const std::vector<int>& ms, const std::vector<double>& ys);

}  // namespace qm
