#pragma once

#include "qm/bundles.hpp"

namespace qm {

// Ratios dim GF_m / dim GE_m over [mMin, mMax], the PSD certificates
// jmath^E_{l,m}(P_{F,l}) <= P_{F,m} for mMin <= m <= l <= mMax, and trace
// intertwining. F must be a quotient of E (ranges nested); otherwise
// ContainmentViolation.
Report guo_check(const GradedQuotient& E, const GradedQuotient& F, int mMin, int mMax);

// Reduced Hilbert polynomials chi/rank of E and F compared for m >> 0:
// PASS iff chi_F/rank_F >= chi_E/rank_E eventually (F does not destabilize E).
Report gieseker_table(const GradedQuotient& E, const GradedQuotient& F, int mMin, int mMax);
Report gieseker_table(const ModelPtr& model, const BundleSpec& E, const BundleSpec& F, int mMin, int mMax);

}  // namespace qm
