#pragma once
//
// Dense complex linear algebra on discrete boundary operators. Norms, GMRES
// and the numerical range are taken in the discrete L2(Gamma) inner product
// <u, v> = sum_j w_j u_j conj(v_j).
//

#include "hbie/assembly.hpp"

#include <utility>
#include <vector>

namespace hbie {

struct GmresReport {
    CVector solution;
    int iterations = 0;
    double final_relative_residual = 0.0;
    bool converged = false;
    // Relative residual after 0, 1, ..., iterations Krylov steps.
    std::vector<double> residual_history;
};

struct FitResult {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
};

// LU with partial pivoting. Throws SingularMatrix when a pivot falls below
// 1e-14 ||A||.
CMatrix solve_dense(const CMatrix& A, const CMatrix& B);
BoundaryFunction solve_dense(const DiscreteOperator& A, const BoundaryFunction& b);

// A^{-1}, same singularity test.
CMatrix inverse(const CMatrix& A);

// Unrestarted GMRES (Arnoldi with modified Gram-Schmidt and Givens
// rotations), zero initial guess. tol in (0, 1e-2].
GmresReport gmres(const CMatrix& A, const CVector& b, double tol = 1e-8, int max_iterations = 2000);
// The same in the weighted inner product of the operator's grid.
GmresReport gmres(const DiscreteOperator& A, const CVector& b, double tol = 1e-8, int max_iterations = 2000);

// sigma_max / sigma_min of W^{1/2} A W^{-1/2}; +inf when sigma_min = 0.
double condition_number(const DiscreteOperator& A);

// Singular values of W^{1/2} A W^{-1/2}, descending.
RVector weighted_singular_values(const DiscreteOperator& A);

// max over theta_samples equispaced theta of lambda_min(Re(e^{i theta} A~)),
// A~ = W^{1/2} A W^{-1/2}. A value <= 0 means 0 is (to grid resolution) in
// the numerical range: not coercive at this discretization.
double coercivity_constant(const CMatrix& A_weighted, int theta_samples = 720);
double coercivity_constant(const DiscreteOperator& A, int theta_samples = 720);

// Least squares fit of ln value = exponent ln k + log_prefactor.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& pairs);

} // namespace hbie
