#pragma once
//
// Combined-field operators, Calderon projectors and the boundary maps built
// from them.
//
//   A'      = 1/2 I + D' - i eta S
//   B       = H + i eta (1/2 I - D)
//   B~      = R H + i eta (1/2 I - D)
//   Pi_-/+  = 1/2 I -/+ [[D, -S], [H, -D']]
//   P_DtN = A'^{-1} B,  P_NtD = B^{-1} A',  P_ItD = S A'^{-1}
//

#include "hbie/assembly.hpp"

#include <functional>
#include <optional>

namespace hbie {

// eta(x) = a(x) k + i b(x).
struct EtaSpec {
    std::function<double(const Vec2&)> a;
    std::function<double(const Vec2&)> b;
    std::string description;

    static EtaSpec constant(double a, double b);
    CVector evaluate(double k, const BoundaryGrid& grid) const;
    // Constant value a k + i b if a and b are constant, else nullopt.
    std::optional<cplx> constant_value(double k) const;

private:
    std::optional<std::pair<double, double>> constant_;
};

enum class RegularizerKind { S0, Sik, Identity };

struct Regularizer {
    RegularizerKind kind;
    DiscreteOperator op;
};

// S0: Laplace single layer; Sik: S at wavenumber ik; Identity: test use.
Regularizer make_regularizer(RegularizerKind kind, double k, const BoundaryGrid& grid,
                             const AssemblyOptions& options = {});

DiscreteOperator build_combined_A(const LayerOperators& L, double k, const EtaSpec& eta);
DiscreteOperator build_combined_A(double k, const EtaSpec& eta, const BoundaryGrid& grid);
DiscreteOperator build_combined_B(const LayerOperators& L, double k, const EtaSpec& eta);
DiscreteOperator build_combined_B(double k, const EtaSpec& eta, const BoundaryGrid& grid);
// Warns on stderr and proceeds when R is numerically singular.
DiscreteOperator build_combined_Btilde(const LayerOperators& L, double k, const EtaSpec& eta,
                                       const Regularizer& R);
DiscreteOperator build_combined_Btilde(double k, const EtaSpec& eta, const Regularizer& R,
                                       const BoundaryGrid& grid);

struct CalderonProjectors {
    CMatrix minus, plus;  // 2N x 2N, acting on (Dirichlet, Neumann) stacked
    BoundaryGrid grid;
};

CalderonProjectors calderon_projectors(const LayerOperators& L);
CalderonProjectors calderon_projectors(double k, const BoundaryGrid& grid);

// ||P||_{L2 x L2} with the weights of the grid on both blocks.
double block_l2_norm(const CMatrix& P, const BoundaryGrid& grid);

// Throw SingularMatrix when A' (resp. B) has condition estimate > 1e12.
DiscreteOperator dtn_map(const LayerOperators& L, double k, const EtaSpec& eta);
DiscreteOperator dtn_map(double k, const EtaSpec& eta, const BoundaryGrid& grid);
DiscreteOperator ntd_map(const LayerOperators& L, double k, const EtaSpec& eta);
DiscreteOperator ntd_map(double k, const EtaSpec& eta, const BoundaryGrid& grid);
DiscreteOperator itd_map(const LayerOperators& L, double k, const EtaSpec& eta);
DiscreteOperator itd_map(double k, const EtaSpec& eta, const BoundaryGrid& grid);

// S^{-1} (-1/2 I + D): valid away from interior Dirichlet eigenvalues.
DiscreteOperator dtn_map_single_layer(const LayerOperators& L);

struct DecompositionResiduals {
    double resA = 0.0;
    double resB = 0.0;
    // Matrix-level B~ residual needs the regularized ItD map, which is only
    // available mode-wise; filled on the circle from mode symbols.
    std::optional<double> resBtilde;
    int n_max_used = 0;
};

// Weighted L2 norms of
//   A'^{-1} - [I - (P_DtN - i eta) P_ItD]
//   B^{-1}  - [P_NtD - (I - i eta P_NtD) P_ItD]
// computed from independent solves (A'^{-1} by LU, maps by their own
// definitions). R, when given, must live on a circle.
DecompositionResiduals decomposition_residuals(double k, const EtaSpec& eta, const BoundaryGrid& grid,
                                               const std::optional<Regularizer>& R = std::nullopt);

// Mode-level residuals on the circle of the given radius, constant eta:
//   max_|n|<=n_max |1/a'_n - (1 - (p_n - i eta) q_n)|, etc.
// With regularizer S0 or Sik the B~ identity is included. Modes whose Y_n
// overflows are skipped; n_max_used reports the last mode checked.
DecompositionResiduals mode_decomposition_residuals(double k, double radius, cplx eta, int n_max,
                                                    std::optional<RegularizerKind> R = std::nullopt);

// Sound-soft scattering of e^{i k x . d}, d = (cos alpha, sin alpha), by the
// direct formulation A' (du/dn) = du_i/dn - i eta u_i; du/dn is the normal
// derivative of the total field.
CVector plane_wave_rhs(double k, const EtaSpec& eta, const BoundaryGrid& grid, double alpha);

// u_inf(theta) = -e^{i pi/4} / sqrt(8 pi k) int e^{-i k xhat . y} du/dn(y) ds(y),
// normalized so u_s ~ e^{i k r} r^{-1/2} u_inf.
cplx far_field_from_neumann(const BoundaryFunction& dudn, double k, double theta);

} // namespace hbie
