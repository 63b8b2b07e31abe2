#pragma once
//
// Nystrom discretization of the Helmholtz layer operators on a boundary grid
// (Kress product quadrature for the logarithmic singularities), and the
// discrete L2 / weighted Sobolev norms used to measure them.
//
// A matrix acts on nodal values: (A phi)(x_i) ~ sum_j A(i, j) phi(x_j).
//

#include "hbie/geom.hpp"
#include "hbie/specfun.hpp"

#include <Eigen/Dense>

namespace hbie {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Fractional tags are defined through Fourier multipliers and only exist on
// the circle.
enum class SpaceTag { L2, H1k, Hhalf_k, Hminushalf_k };

const char* space_name(SpaceTag tag);
double space_order(SpaceTag tag);

struct DiscreteOperator {
    CMatrix matrix;
    BoundaryGrid grid;
    SpaceTag source = SpaceTag::L2;
    SpaceTag target = SpaceTag::L2;
};

struct BoundaryFunction {
    CVector values;
    BoundaryGrid grid;
};

struct LayerOperators {
    DiscreteOperator S, D, Dadj, H;
};

// The quadrature runs on a grid `refinement` times finer than the one the
// operator acts on. The speed-weighted density |x'| phi is carried there by
// trigonometric interpolation and the results are sampled back at the coarse
// nodes. With refinement 1 the top few Fourier modes alias (the Nyquist mode
// badly, through d/dt); with 2 every mode of the coarse grid is integrated to
// the accuracy of the fine rule. Products of assembled operators still alias
// at the coarse level, which caps Calderon identities on non-circles near
// k^2 N^-3.
struct AssemblyOptions {
    int refinement = 2;
    bool hypersingular = true;
};

// S_k, D_k, D'_k and H_k (Maue form) at real k > 0. H is left empty when
// options.hypersingular is false.
LayerOperators assemble_layer_operators(double k, const BoundaryGrid& grid,
                                        const AssemblyOptions& options = {});

// Single layer with kernel (i/4) H_0(kappa |x - y|) for complex kappa in the
// closed first quadrant; kappa = i k gives S_{ik}.
DiscreteOperator assemble_single_layer(cplx kappa, const BoundaryGrid& grid,
                                       const AssemblyOptions& options = {});

// Laplace single layer, kernel -(1/2pi) ln |x - y|.
DiscreteOperator assemble_laplace_single_layer(const BoundaryGrid& grid,
                                               const AssemblyOptions& options = {});

// Trigonometric interpolation from `coarse` nodes to `fine` nodes of the
// same curve (fine.N a multiple of coarse.N); Nyquist mode taken as cosine.
RMatrix interpolation_matrix(int coarse_N, int fine_N);

// d/dt on trigonometric interpolants of degree < N/2 (Nyquist mode dropped).
RMatrix spectral_derivative_matrix(int N);

// Surface gradient d/ds = (1/|x'|) d/dt as a matrix.
RMatrix surface_derivative_matrix(const BoundaryGrid& grid);

// sigma_max(W^{1/2} A W^{-1/2}); source and target must be L2.
double l2_operator_norm(const DiscreteOperator& A);

// s = 0: weighted trapezoid L2 norm; s = 1: (||f'||^2 + k^2 ||f||^2)^{1/2}
// with spectral differentiation; fractional s in [-1, 1] on the circle only.
double sobolev_norm(const BoundaryFunction& f, double s, double k);

// sigma_max(T_to A T_from^{-1}): Fourier multipliers (n^2/a^2 + k^2)^{s/2}
// on the circle, Cholesky factor of the H^1_k Gram matrix elsewhere.
double graded_operator_norm(const DiscreteOperator& A, SpaceTag from, SpaceTag to, double k);

// Samples of e^{i n t} on the grid nodes.
CVector fourier_mode(const BoundaryGrid& grid, int n);

} // namespace hbie
