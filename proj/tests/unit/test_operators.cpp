#include "doctest.h"

#include "hbie/disk_oracle.hpp"
#include "hbie/errors.hpp"
#include "hbie/linalg.hpp"
#include "hbie/operators.hpp"

#include <cmath>

using namespace hbie;

namespace {

double mode_error(const CMatrix& A, const BoundaryGrid& g, int n, cplx sym)
{
    const CVector e = fourier_mode(g, n);
    return (A * e - sym * e).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("EtaSpec")
{
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 16);
    const EtaSpec c = EtaSpec::constant(1.0, 2.0);
    REQUIRE(c.constant_value(3.0).has_value());
    CHECK(*c.constant_value(3.0) == cplx(3.0, 2.0));
    CHECK(c.evaluate(3.0, g)[5] == cplx(3.0, 2.0));
    EtaSpec v;
    v.a = [](const Vec2& x) { return 1.0 + x[0]; };
    v.b = [](const Vec2&) { return 0.0; };
    CHECK_FALSE(v.constant_value(2.0).has_value());
    CHECK(v.evaluate(2.0, g)[0] == cplx(4.0, 0.0));
}

TEST_CASE("combined operators on the circle act by a'_n and b_n")
{
    const double k = 7.0;
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 256);
    const LayerOperators L = assemble_layer_operators(k, g);
    for (const cplx eta : {cplx(k, 0), cplx(-k, 0), cplx(k, 1)}) {
        const EtaSpec es = EtaSpec::constant(eta.real() / k, eta.imag());
        const DiscreteOperator A = build_combined_A(L, k, es), B = build_combined_B(L, k, es);
        const ModeTable t = mode_table(k, 1.0, eta, 12);
        for (int n = 0; n <= 12; ++n) {
            CHECK(mode_error(A.matrix, g, n, t.aprime[n]) < 1e-9);
            CHECK(mode_error(B.matrix, g, n, t.b[n]) < 1e-8);
        }
        CHECK(A.source == SpaceTag::L2);
        CHECK(B.source == SpaceTag::H1k);
    }
}

TEST_CASE("B~ with the identity regularizer is B")
{
    const BoundaryGrid g = boundary_grid(Curve::kite(), 64);
    const LayerOperators L = assemble_layer_operators(2.0, g);
    const EtaSpec es = EtaSpec::constant(1.0, 0.0);
    const Regularizer R = make_regularizer(RegularizerKind::Identity, 2.0, g);
    CHECK((build_combined_Btilde(L, 2.0, es, R).matrix - build_combined_B(L, 2.0, es).matrix).norm() < 1e-13);
}

TEST_CASE("Calderon projectors are complementary idempotents on the circle")
{
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 256);
    const CalderonProjectors P = calderon_projectors(5.0, g);
    const int n2 = 2 * g.N;
    CHECK((P.minus + P.plus - CMatrix::Identity(n2, n2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(block_l2_norm(P.minus * P.minus - P.minus, g) < 1e-8);
    CHECK(block_l2_norm(P.minus * P.plus, g) < 1e-8);
}

TEST_CASE("Calderon projector on the kite")
{
    const BoundaryGrid g = boundary_grid(Curve::kite(), 256);
    const CalderonProjectors P = calderon_projectors(3.0, g);
    const int n2 = 2 * g.N;
    CHECK((P.minus + P.plus - CMatrix::Identity(n2, n2)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(block_l2_norm(P.minus * P.minus - P.minus, g) < 1e-4);
}

TEST_CASE("exterior Cauchy data lie in the range of Pi_+")
{
    // u = H_1(k r) e^{i t} radiates; (u, du/dn) on the kite
    const double k = 4.0;
    const BoundaryGrid g = boundary_grid(Curve::kite(), 256);
    const CalderonProjectors P = calderon_projectors(k, g);
    CVector c(2 * g.N);
    const Vec2 src{0.1, 0.05};
    for (int j = 0; j < g.N; ++j) {
        const double dx = g.points[j][0] - src[0], dy = g.points[j][1] - src[1];
        const double r = std::hypot(dx, dy), th = std::atan2(dy, dx);
        const HankelEval h = hankel1(1, k * r);
        const cplx e = std::exp(kI * th);
        // grad (H_1(kr) e^{i th}) = k H_1' e^{i th} rhat + (i / r) H_1 e^{i th} thetahat
        const cplx gr = k * h.Hprime * e, gt = kI / r * h.H * e;
        const Vec2 rh{dx / r, dy / r}, th_{-dy / r, dx / r};
        const Vec2& n = g.normals[j];
        c[j] = h.H * e;
        c[g.N + j] = gr * (rh[0] * n[0] + rh[1] * n[1]) + gt * (th_[0] * n[0] + th_[1] * n[1]);
    }
    const CVector r = P.minus * c;
    CHECK(r.norm() / c.norm() < 1e-6);
}

TEST_CASE("boundary maps on the circle")
{
    const double k = 6.0;
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 128);
    const LayerOperators L = assemble_layer_operators(k, g);
    const EtaSpec es = EtaSpec::constant(1.0, 0.0);
    const ModeTable t = mode_table(k, 1.0, k, 10);
    const DiscreteOperator dtn = dtn_map(L, k, es), ntd = ntd_map(L, k, es), itd = itd_map(L, k, es);
    const DiscreteOperator dsl = dtn_map_single_layer(L);
    for (int n = 0; n <= 10; ++n) {
        CHECK(mode_error(dtn.matrix, g, n, t.p[n]) < 1e-7);
        CHECK(mode_error(dsl.matrix, g, n, t.p[n]) < 1e-7);
        CHECK(mode_error(ntd.matrix, g, n, 1.0 / t.p[n]) < 1e-9);
        CHECK(mode_error(itd.matrix, g, n, t.q[n]) < 1e-9);
    }
}

TEST_CASE("mode-level decomposition residuals")
{
    const double k = 10.0;
    for (const cplx eta : {cplx(k, 0), cplx(-k, 0), cplx(k, 1)}) {
        const DecompositionResiduals r = mode_decomposition_residuals(k, 1.0, eta, 40);
        CHECK(r.resA < 1e-10);
        CHECK(r.resB < 1e-10);
        CHECK(r.n_max_used == 40);
        CHECK_FALSE(r.resBtilde.has_value());
    }
    for (auto R : {RegularizerKind::S0, RegularizerKind::Sik}) {
        const DecompositionResiduals r = mode_decomposition_residuals(k, 0.8, k, 40, R);
        REQUIRE(r.resBtilde.has_value());
        CHECK(*r.resBtilde < 1e-8);
    }
}

TEST_CASE("matrix-level decomposition residuals on the circle")
{
    const double k = 5.0;
    const BoundaryGrid g = boundary_grid(Curve::circle(0.8), 128);
    const Regularizer R = make_regularizer(RegularizerKind::S0, k, g);
    const DecompositionResiduals r = decomposition_residuals(k, EtaSpec::constant(1.0, 0.0), g, R);
    CHECK(r.resA < 1e-8);
    CHECK(r.resB < 1e-8);
    REQUIRE(r.resBtilde.has_value());
    CHECK(*r.resBtilde < 1e-8);
}

TEST_CASE("plane wave scattering by the unit circle")
{
    const double k = 5.0, alpha = 0.4;
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 128);
    const EtaSpec es = EtaSpec::constant(1.0, 0.0);
    const DiscreteOperator A = build_combined_A(k, es, g);
    const BoundaryFunction dudn = solve_dense(A, BoundaryFunction{plane_wave_rhs(k, es, g, alpha), g});
    const MieSolution mie(k, 1.0, alpha);
    for (int j = 0; j < g.N; j += 7)
        CHECK(std::abs(dudn.values[j] - mie.neumann(g.t[j])) < 1e-10);
    for (double th : {0.0, 1.0, 2.5, 4.0})
        CHECK(std::abs(far_field_from_neumann(dudn, k, th) - mie.far_field(th)) < 1e-10);
}

TEST_CASE("solves reject a singular A")
{
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 32);
    const DiscreteOperator Z{CMatrix::Zero(32, 32), g};
    CHECK_THROWS_AS(solve_dense(Z, BoundaryFunction{CVector::Ones(32), g}), SingularMatrix);
}
