#pragma once

#include <vector>

#include "qm/report.hpp"
#include "qm/space.hpp"

namespace qm {

struct ShiftBlock {
    int alpha = 0;  // 0-based variable index
    int m = 0;
    Mat matrix;     // n_{m+1} x n_m
};

std::vector<ShiftBlock> shift_blocks(const ModelPtr& model, int m);

// || sum_a S_a S_a^* - 1 || on GH_{m+1}.
double row_identity_residual(const ModelPtr& model, int m);
// || sum_a S_a^* S_a - (n_{m+1}/n_m) 1 || on GH_m.
double orbit_residual(const ModelPtr& model, int m);

Report orbit_certificate(const ModelPtr& model, int mMax, double tol = 1e-9);

// Phi_*(X) restricted to level m, where X acts on GH_{m+1}.
Mat phi_star(const ModelPtr& model, const Mat& xNext, int m);
// Phi_*^r(1) p_m.
Mat phi_star_power(const ModelPtr& model, int r, int m);

// Psi(X) p_m = (n_m / n_{m+1}) sum_a S_a^* X S_a. Valid only for orbit
// models; requires a passing certificate up to m unless overridden.
Mat psi_map(const ModelPtr& model, const Mat& xNext, int m, bool override = false);

struct DefectOperator {
    int p = 0;
    int m = 0;
    Mat matrix;
    cplx trace;
    double expectedTrace = 0.0;  // sum_r (-1)^r C(p,r) n_{m+r}
};
DefectOperator defect_operator(const ModelPtr& model, int p, int m);

// Smallest q with max_m ||B_q p_m|| < tol, together with ||B_{q-1} p_m||.
Report q_isometry_scan(const ModelPtr& model, int mMax, double tol = 1e-9);

Report schatten_report(const ModelPtr& model, int mMax, const std::vector<int>& pGrid);

}  // namespace qm
