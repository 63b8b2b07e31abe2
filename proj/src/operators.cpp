#include "hbie/operators.hpp"

#include "hbie/disk_oracle.hpp"
#include "hbie/errors.hpp"
#include "hbie/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hbie {

namespace {

DiscreteOperator make_op(CMatrix m, const BoundaryGrid& grid, SpaceTag from = SpaceTag::L2,
                         SpaceTag to = SpaceTag::L2)
{
    return {std::move(m), grid, from, to};
}

CMatrix identity(const BoundaryGrid& g)
{
    return CMatrix::Identity(g.N, g.N);
}

// LU solve of A X = B; throws when the reciprocal condition estimate falls
// below 1e-12.
CMatrix checked_solve(const CMatrix& A, const CMatrix& B, const char* what)
{
    Eigen::PartialPivLU<CMatrix> lu(A);
    if (!(lu.rcond() >= 1e-12))
        throw SingularMatrix(std::string(what) + ": operator numerically singular (condition > 1e12)");
    return lu.solve(B);
}

LayerOperators layers(double k, const BoundaryGrid& grid, bool hypersingular)
{
    AssemblyOptions o;
    o.hypersingular = hypersingular;
    return assemble_layer_operators(k, grid, o);
}

const BoundaryGrid& grid_of(const LayerOperators& L)
{
    return L.S.grid;
}

double circle_radius(const BoundaryGrid& g)
{
    return g.curve.radius();
}

} // namespace

EtaSpec EtaSpec::constant(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidParameter("eta: coefficients must be finite");
    EtaSpec e;
    e.a = [a](const Vec2&) { return a; };
    e.b = [b](const Vec2&) { return b; };
    std::ostringstream os;
    os << "a=" << a << ",b=" << b;
    e.description = os.str();
    e.constant_ = std::make_pair(a, b);
    return e;
}

CVector EtaSpec::evaluate(double k, const BoundaryGrid& grid) const
{
    if (!a || !b)
        throw InvalidParameter("eta: coefficient functions not set");
    CVector v(grid.N);
    for (int j = 0; j < grid.N; ++j)
        v[j] = a(grid.points[j]) * k + kI * b(grid.points[j]);
    return v;
}

std::optional<cplx> EtaSpec::constant_value(double k) const
{
    if (!constant_)
        return std::nullopt;
    return constant_->first * k + kI * constant_->second;
}

Regularizer make_regularizer(RegularizerKind kind, double k, const BoundaryGrid& grid,
                             const AssemblyOptions& options)
{
    switch (kind) {
    case RegularizerKind::S0:
        return {kind, assemble_laplace_single_layer(grid, options)};
    case RegularizerKind::Sik:
        return {kind, assemble_single_layer(kI * k, grid, options)};
    case RegularizerKind::Identity:
        return {kind, make_op(identity(grid), grid)};
    }
    throw InvalidParameter("unknown regularizer");
}

DiscreteOperator build_combined_A(const LayerOperators& L, double k, const EtaSpec& eta)
{
    const BoundaryGrid& g = grid_of(L);
    const CVector e = eta.evaluate(k, g);
    CMatrix A = 0.5 * identity(g) + L.Dadj.matrix - kI * (e.asDiagonal() * L.S.matrix);
    return make_op(std::move(A), g);
}

DiscreteOperator build_combined_A(double k, const EtaSpec& eta, const BoundaryGrid& grid)
{
    return build_combined_A(layers(k, grid, false), k, eta);
}

DiscreteOperator build_combined_B(const LayerOperators& L, double k, const EtaSpec& eta)
{
    const BoundaryGrid& g = grid_of(L);
    if (L.H.matrix.size() == 0)
        throw InvalidParameter("build_combined_B: hypersingular operator not assembled");
    const CVector e = eta.evaluate(k, g);
    CMatrix B = L.H.matrix + kI * (e.asDiagonal() * (0.5 * identity(g) - L.D.matrix));
    return make_op(std::move(B), g, SpaceTag::H1k, SpaceTag::L2);
}

DiscreteOperator build_combined_B(double k, const EtaSpec& eta, const BoundaryGrid& grid)
{
    return build_combined_B(layers(k, grid, true), k, eta);
}

DiscreteOperator build_combined_Btilde(const LayerOperators& L, double k, const EtaSpec& eta,
                                       const Regularizer& R)
{
    const BoundaryGrid& g = grid_of(L);
    if (L.H.matrix.size() == 0)
        throw InvalidParameter("build_combined_Btilde: hypersingular operator not assembled");
    if (R.op.matrix.rows() != g.N || R.op.matrix.cols() != g.N)
        throw InvalidParameter("build_combined_Btilde: regularizer size mismatch");
    Eigen::PartialPivLU<CMatrix> lu(R.op.matrix);
    if (!(lu.rcond() >= 1e-12))
        std::fprintf(stderr, "warning: regularizer numerically singular (rcond %.3e)\n", lu.rcond());
    const CVector e = eta.evaluate(k, g);
    CMatrix B = R.op.matrix * L.H.matrix + kI * (e.asDiagonal() * (0.5 * identity(g) - L.D.matrix));
    return make_op(std::move(B), g, SpaceTag::H1k, SpaceTag::L2);
}

DiscreteOperator build_combined_Btilde(double k, const EtaSpec& eta, const Regularizer& R,
                                       const BoundaryGrid& grid)
{
    return build_combined_Btilde(layers(k, grid, true), k, eta, R);
}

CalderonProjectors calderon_projectors(const LayerOperators& L)
{
    const BoundaryGrid& g = grid_of(L);
    if (L.H.matrix.size() == 0)
        throw InvalidParameter("calderon_projectors: hypersingular operator not assembled");
    const int N = g.N;
    CMatrix M(2 * N, 2 * N);
    M.topLeftCorner(N, N) = L.D.matrix;
    M.topRightCorner(N, N) = -L.S.matrix;
    M.bottomLeftCorner(N, N) = L.H.matrix;
    M.bottomRightCorner(N, N) = -L.Dadj.matrix;
    const CMatrix half = 0.5 * CMatrix::Identity(2 * N, 2 * N);
    CalderonProjectors P{half - M, CMatrix(), g};
    P.plus = CMatrix::Identity(2 * N, 2 * N) - P.minus;
    return P;
}

CalderonProjectors calderon_projectors(double k, const BoundaryGrid& grid)
{
    return calderon_projectors(layers(k, grid, true));
}

double block_l2_norm(const CMatrix& P, const BoundaryGrid& grid)
{
    const int N = grid.N;
    if (P.rows() != 2 * N || P.cols() != 2 * N)
        throw InvalidParameter("block_l2_norm: expected a 2N x 2N matrix");
    RVector sw(2 * N);
    for (int j = 0; j < N; ++j)
        sw[j] = sw[j + N] = std::sqrt(grid.weights[j]);
    const CMatrix W = sw.asDiagonal() * P * sw.cwiseInverse().asDiagonal();
    Eigen::BDCSVD<CMatrix> svd(W);
    return svd.singularValues()[0];
}

DiscreteOperator dtn_map(const LayerOperators& L, double k, const EtaSpec& eta)
{
    const DiscreteOperator A = build_combined_A(L, k, eta);
    const DiscreteOperator B = build_combined_B(L, k, eta);
    return make_op(checked_solve(A.matrix, B.matrix, "dtn_map"), grid_of(L), SpaceTag::H1k, SpaceTag::L2);
}

DiscreteOperator dtn_map(double k, const EtaSpec& eta, const BoundaryGrid& grid)
{
    return dtn_map(layers(k, grid, true), k, eta);
}

DiscreteOperator ntd_map(const LayerOperators& L, double k, const EtaSpec& eta)
{
    const DiscreteOperator A = build_combined_A(L, k, eta);
    const DiscreteOperator B = build_combined_B(L, k, eta);
    return make_op(checked_solve(B.matrix, A.matrix, "ntd_map"), grid_of(L), SpaceTag::L2, SpaceTag::H1k);
}

DiscreteOperator ntd_map(double k, const EtaSpec& eta, const BoundaryGrid& grid)
{
    return ntd_map(layers(k, grid, true), k, eta);
}

DiscreteOperator itd_map(const LayerOperators& L, double k, const EtaSpec& eta)
{
    const DiscreteOperator A = build_combined_A(L, k, eta);
    // S A'^{-1} = (A'^T \ S^T)^T.
    const CMatrix X = checked_solve(A.matrix.transpose(), L.S.matrix.transpose(), "itd_map");
    return make_op(X.transpose(), grid_of(L));
}

DiscreteOperator itd_map(double k, const EtaSpec& eta, const BoundaryGrid& grid)
{
    return itd_map(layers(k, grid, false), k, eta);
}

DiscreteOperator dtn_map_single_layer(const LayerOperators& L)
{
    const BoundaryGrid& g = grid_of(L);
    const CMatrix rhs = -0.5 * identity(g) + L.D.matrix;
    return make_op(checked_solve(L.S.matrix, rhs, "dtn_map_single_layer"), g, SpaceTag::H1k, SpaceTag::L2);
}

DecompositionResiduals decomposition_residuals(double k, const EtaSpec& eta, const BoundaryGrid& grid,
                                               const std::optional<Regularizer>& R)
{
    const LayerOperators L = layers(k, grid, true);
    const CMatrix I = identity(grid);
    const CVector e = eta.evaluate(k, grid);

    const DiscreteOperator A = build_combined_A(L, k, eta);
    const DiscreteOperator B = build_combined_B(L, k, eta);
    const CMatrix Ainv = inverse(A.matrix);
    const CMatrix Binv = inverse(B.matrix);
    const CMatrix dtn = dtn_map(L, k, eta).matrix;
    const CMatrix ntd = ntd_map(L, k, eta).matrix;
    const CMatrix itd = itd_map(L, k, eta).matrix;

    DecompositionResiduals r;
    const CMatrix ra = Ainv - (I - (dtn - kI * CMatrix(e.asDiagonal())) * itd);
    r.resA = l2_operator_norm(make_op(ra, grid));
    const CMatrix rb = Binv - (ntd - (I - kI * (ntd * e.asDiagonal())) * itd);
    r.resB = l2_operator_norm(make_op(rb, grid));

    if (R) {
        if (!grid.curve.is_circle())
            throw UnsupportedSpace("decomposition_residuals: regularized ItD map exists mode-wise on circles only");
        const auto eta0 = eta.constant_value(k);
        if (!eta0)
            throw UnsupportedSpace("decomposition_residuals: B~ residual needs constant eta");
        const DecompositionResiduals m =
            mode_decomposition_residuals(k, circle_radius(grid), *eta0, grid.N / 2, R->kind);
        r.resBtilde = m.resBtilde;
    }
    return r;
}

DecompositionResiduals mode_decomposition_residuals(double k, double radius, cplx eta, int n_max,
                                                    std::optional<RegularizerKind> R)
{
    const ModeTable t = mode_table(k, radius, eta, n_max);
    std::vector<cplx> r_sym;
    if (R) {
        switch (*R) {
        case RegularizerKind::S0: {
            const auto s0 = laplace_single_layer_symbols(radius, n_max);
            r_sym.assign(s0.begin(), s0.end());
            break;
        }
        case RegularizerKind::Sik:
            r_sym = single_layer_symbols(kI * k, radius, n_max);
            break;
        case RegularizerKind::Identity:
            r_sym.assign(static_cast<std::size_t>(n_max) + 1, 1.0);
            break;
        }
    }

    DecompositionResiduals out;
    double resBt = 0.0;
    const double z = k * radius;
    for (int n = 0; n <= n_max; ++n) {
        // Maps from direct Bessel and Hankel values, not from the ratio table.
        BesselEval be;
        try {
            be = bessel(n, z);
        } catch (const OverflowError&) {
            break;
        }
        out.n_max_used = n;
        const cplx H = be.J + kI * be.Y, Hp = be.Jprime + kI * be.Yprime;
        const cplx p = k * Hp / H;
        const cplx q = be.J / (k * be.Jprime - kI * eta * be.J);

        out.resA = std::max(out.resA, std::abs(1.0 / t.aprime[n] - (1.0 - (p - kI * eta) * q)));
        const cplx ntd = 1.0 / p;
        out.resB = std::max(out.resB, std::abs(1.0 / t.b[n] - (ntd - (1.0 - kI * eta * ntd) * q)));
        if (R) {
            const cplx rn = r_sym[n];
            const cplx bt = rn * t.h[n] + kI * eta * (0.5 - t.d[n]);
            const cplx qr = be.J / (rn * k * be.Jprime - kI * eta * be.J);
            const cplx ntd_r = ntd / rn;
            resBt = std::max(resBt, std::abs(1.0 / bt - (ntd_r - (1.0 - kI * eta * ntd_r) * qr)));
        }
    }
    if (R)
        out.resBtilde = resBt;
    return out;
}

CVector plane_wave_rhs(double k, const EtaSpec& eta, const BoundaryGrid& grid, double alpha)
{
    const CVector e = eta.evaluate(k, grid);
    const double c = std::cos(alpha), s = std::sin(alpha);
    CVector f(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const Vec2& x = grid.points[j];
        const Vec2& n = grid.normals[j];
        const cplx ui = std::exp(kI * (k * (c * x[0] + s * x[1])));
        f[j] = kI * k * (n[0] * c + n[1] * s) * ui - kI * e[j] * ui;
    }
    return f;
}

cplx far_field_from_neumann(const BoundaryFunction& dudn, double k, double theta)
{
    const BoundaryGrid& g = dudn.grid;
    const double c = std::cos(theta), s = std::sin(theta);
    cplx sum = 0.0;
    for (int j = 0; j < g.N; ++j)
        sum += g.weights[j] * std::exp(-kI * (k * (c * g.points[j][0] + s * g.points[j][1]))) * dudn.values[j];
    return -std::exp(kI * (kPi / 4)) / std::sqrt(8 * kPi * k) * sum;
}

} // namespace hbie
