#include "hbie/assembly.hpp"

#include "hbie/errors.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace hbie {

namespace {

constexpr double kInvFourPi = 1.0 / (4.0 * kPi);

// R_m of Kress: sum_j R_{|i-j|} f(t_j) integrates ln(4 sin^2((t_i - t)/2)) f(t).
std::vector<double> log_weights(int N)
{
    const int n = N / 2;
    std::vector<double> R(N);
    for (int m = 0; m < N; ++m) {
        double sum = 0.0;
        for (int l = 1; l < n; ++l)
            sum += std::cos(l * m * kPi / n) / l;
        R[m] = -2.0 * kPi / n * sum - kPi / (static_cast<double>(n) * n) * ((m % 2 == 0) ? 1.0 : -1.0);
    }
    return R;
}

// ln(4 sin^2((t_i - t_j)/2)) for i != j, indexed by (i - j) mod N.
std::vector<double> log_kernel(int N)
{
    std::vector<double> L(N, 0.0);
    for (int m = 1; m < N; ++m) {
        const double s = std::sin(kPi * m / N);
        L[m] = std::log(4.0 * s * s);
    }
    return L;
}

double distance(const Vec2& a, const Vec2& b)
{
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

void check_grid_wavenumber(double k)
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw InvalidParameter("assembly: k must be positive and finite");
}

void check_finite(const CMatrix& m, const char* what)
{
    if (!m.allFinite())
        throw Error(std::string("assembly: non-finite entry in ") + what);
}

// Row/column scale by the square roots of the quadrature weights.
CMatrix weighted_similarity(const DiscreteOperator& A)
{
    const int N = A.grid.N;
    RVector sw(N);
    for (int j = 0; j < N; ++j)
        sw[j] = std::sqrt(A.grid.weights[j]);
    return sw.asDiagonal() * A.matrix * sw.cwiseInverse().asDiagonal();
}

double largest_singular_value(const CMatrix& m)
{
    Eigen::BDCSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

int mode_index(int j, int N)
{
    return j < N / 2 ? j : j - N;
}

// Unitary DFT: (U f)_p = N^{-1/2} sum_j f_j e^{-i n_p t_j}, n_p = mode_index(p).
CMatrix unitary_dft(const BoundaryGrid& grid)
{
    const int N = grid.N;
    CMatrix U(N, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (int p = 0; p < N; ++p) {
        const int n = mode_index(p, N);
        for (int j = 0; j < N; ++j) {
            const long long phase = (static_cast<long long>(n) * j) % N;
            const double angle = -2.0 * kPi * static_cast<double>(phase) / N;
            U(p, j) = scale * cplx(std::cos(angle), std::sin(angle));
        }
    }
    return U;
}

RVector circle_multiplier(const BoundaryGrid& grid, double s, double k)
{
    const int N = grid.N;
    const double a = grid.curve.radius();
    RVector m(N);
    for (int p = 0; p < N; ++p) {
        const double n = mode_index(p, N);
        m[p] = std::pow(n * n / (a * a) + k * k, 0.5 * s);
    }
    return m;
}

// The derivative matrix annihilates the Nyquist mode c (-1)^j; in the H^1
// seminorm it is given frequency N/2 like on the circle:
// |c|^2 (N/2)^2 sum_j w_j / |x'_j|^2, with c = (1/N) sum_j (-1)^j f_j.
double nyquist_weight(const BoundaryGrid& grid)
{
    double s = 0.0;
    for (int j = 0; j < grid.N; ++j)
        s += grid.weights[j] / (grid.speeds[j] * grid.speeds[j]);
    return 0.25 * s;
}

// Upper factor U with ||f||_{H^1_k}^2 = ||U f||^2 on a general grid.
RMatrix h1_factor(const BoundaryGrid& grid, double k)
{
    const int N = grid.N;
    const RMatrix Ds = surface_derivative_matrix(grid);
    RVector w(N), alt(N);
    for (int j = 0; j < N; ++j) {
        w[j] = grid.weights[j];
        alt[j] = (j % 2 == 0) ? 1.0 : -1.0;
    }
    RMatrix G = Ds.transpose() * w.asDiagonal() * Ds;
    G += nyquist_weight(grid) * alt * alt.transpose();
    G.diagonal() += k * k * w;
    Eigen::LLT<RMatrix> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error("graded_operator_norm: H1 Gram matrix is not positive definite");
    return llt.matrixU();
}

} // namespace

const char* space_name(SpaceTag tag)
{
    switch (tag) {
    case SpaceTag::L2:
        return "L2";
    case SpaceTag::H1k:
        return "H1k";
    case SpaceTag::Hhalf_k:
        return "Hhalf_k";
    case SpaceTag::Hminushalf_k:
        return "Hminushalf_k";
    }
    return "?";
}

double space_order(SpaceTag tag)
{
    switch (tag) {
    case SpaceTag::L2:
        return 0.0;
    case SpaceTag::H1k:
        return 1.0;
    case SpaceTag::Hhalf_k:
        return 0.5;
    case SpaceTag::Hminushalf_k:
        return -0.5;
    }
    return 0.0;
}

RMatrix spectral_derivative_matrix(int N)
{
    if (N < 2 || N % 2 != 0)
        throw InvalidParameter("spectral_derivative_matrix: N must be even");
    const double h = 2.0 * kPi / N;
    std::vector<double> col(N, 0.0);
    for (int m = 1; m < N; ++m)
        col[m] = 0.5 * ((m % 2 == 0) ? 1.0 : -1.0) / std::tan(0.5 * m * h);
    RMatrix D(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            D(i, j) = col[(i - j + N) % N];
    return D;
}

RMatrix surface_derivative_matrix(const BoundaryGrid& grid)
{
    RMatrix D = spectral_derivative_matrix(grid.N);
    for (int i = 0; i < grid.N; ++i)
        D.row(i) /= grid.speeds[i];
    return D;
}

CVector fourier_mode(const BoundaryGrid& grid, int n)
{
    CVector v(grid.N);
    for (int j = 0; j < grid.N; ++j)
        v[j] = std::exp(kI * (static_cast<double>(n) * grid.t[j]));
    return v;
}

RMatrix interpolation_matrix(int coarse_N, int fine_N)
{
    if (coarse_N < 2 || coarse_N % 2 != 0 || fine_N % coarse_N != 0)
        throw InvalidParameter("interpolation_matrix: fine_N must be a multiple of an even coarse_N");
    const int r = fine_N / coarse_N;
    RMatrix E(fine_N, coarse_N);
    for (int l = 0; l < fine_N; ++l)
        for (int j = 0; j < coarse_N; ++j) {
            // offset in units of the fine spacing
            const int m = ((l - r * j) % fine_N + fine_N) % fine_N;
            if (m == 0) {
                E(l, j) = 1.0;
            } else if (m % r == 0) {
                E(l, j) = 0.0;
            } else {
                const double theta = 2.0 * kPi * m / fine_N;
                E(l, j) = std::sin(0.5 * coarse_N * theta) / (coarse_N * std::tan(0.5 * theta));
            }
        }
    return E;
}

namespace {

struct Refined {
    BoundaryGrid fine;
    int r;
    RMatrix E;  // coarse -> fine trigonometric interpolation
    RVector coarse_speed, fine_speed;
};

Refined refine(const BoundaryGrid& grid, int refinement)
{
    if (refinement < 1)
        throw InvalidParameter("assembly: refinement must be >= 1");
    if (static_cast<long long>(grid.N) * refinement > 16384)
        throw InvalidParameter("assembly: refined grid exceeds 16384 nodes");
    Refined out{refinement == 1 ? grid : boundary_grid(grid.curve, grid.N * refinement), refinement, {}, {}, {}};
    out.E = refinement == 1 ? RMatrix::Identity(grid.N, grid.N) : interpolation_matrix(grid.N, grid.N * refinement);
    out.coarse_speed = Eigen::Map<const RVector>(grid.speeds.data(), grid.N);
    out.fine_speed = Eigen::Map<const RVector>(out.fine.speeds.data(), out.fine.N);
    return out;
}

template <class M>
M sample_rows(const M& fine, const Refined& ref)
{
    M out(ref.fine.N / ref.r, fine.cols());
    for (Eigen::Index p = 0; p < out.rows(); ++p)
        out.row(p) = fine.row(p * ref.r);
    return out;
}

// Every kernel here carries the speed |x'(tau)| of the source point. The
// interpolated quantity is the speed-weighted density |x'| phi, so that the
// variable speed multiplies nodal values on the coarse grid; interpolating
// phi itself and multiplying on the fine grid pushes the top coarse modes
// out of band, and sampling folds them back.
CMatrix coarsen(const CMatrix& fine, const Refined& ref)
{
    const CMatrix rows = sample_rows(fine, ref) * ref.fine_speed.cwiseInverse().asDiagonal();
    return (rows * ref.E) * ref.coarse_speed.asDiagonal();
}

// Kress product-quadrature matrices of S, D and D' on grid g. D and Da may
// be null.
void helmholtz_matrices(double k, const BoundaryGrid& g, CMatrix& S, CMatrix* D, CMatrix* Da)
{
    const int N = g.N;
    const double h = kPi / (N / 2);
    const std::vector<double> R = log_weights(N);
    const std::vector<double> Lg = log_kernel(N);
    S.resize(N, N);
    if (D)
        D->resize(N, N);
    if (Da)
        Da->resize(N, N);

    auto diagonal = [&](int i) {
        const double si = g.speeds[i];
        const Vec2& ti = g.d1[i];
        const Vec2& ai = g.d2[i];
        const cplx m2(-kEulerGamma / (2.0 * kPi) - std::log(0.5 * k * si) / (2.0 * kPi), 0.25);
        S(i, i) = R[0] * (-kInvFourPi * si) + h * m2 * si;
        const double l2 = (ti[1] * ai[0] - ti[0] * ai[1]) * kInvFourPi / (si * si);
        if (D)
            (*D)(i, i) = h * l2;
        if (Da)
            (*Da)(i, i) = h * l2;
    };
    auto entry = [&](int i, int j, double r, const CylinderPair& c) {
        const int m = (i - j + N) % N;
        const Vec2& xi = g.points[i];
        const Vec2& xj = g.points[j];
        const double si = g.speeds[i], sj = g.speeds[j];
        const double lg = Lg[m];

        const cplx ms = 0.25 * kI * c.H0 * sj;
        const double ms1 = -kInvFourPi * c.J0.real() * sj;
        S(i, j) = R[m] * ms1 + h * (ms - ms1 * lg);

        if (D) {
            // (x_i - x_j) . (x2'(t_j), -x1'(t_j))
            const Vec2& tj = g.d1[j];
            const double cd = (xi[0] - xj[0]) * tj[1] - (xi[1] - xj[1]) * tj[0];
            const cplx ld = 0.25 * kI * k * c.H1 / r * cd;
            const double ld1 = -k * kInvFourPi * c.J1.real() / r * cd;
            (*D)(i, j) = R[m] * ld1 + h * (ld - ld1 * lg);
        }
        if (Da) {
            // (x_j - x_i) . (x2'(t_i), -x1'(t_i)) |x'(t_j)| / |x'(t_i)|
            const Vec2& ti = g.d1[i];
            const double ca = ((xj[0] - xi[0]) * ti[1] - (xj[1] - xi[1]) * ti[0]) * sj / si;
            const cplx la = 0.25 * kI * k * c.H1 / r * ca;
            const double la1 = -k * kInvFourPi * c.J1.real() / r * ca;
            (*Da)(i, j) = R[m] * la1 + h * (la - la1 * lg);
        }
    };

    // Kernel values depend on |x_i - x_j| only: one evaluation per pair.
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < N; ++i) {
        diagonal(i);
        for (int j = i + 1; j < N; ++j) {
            const double r = distance(g.points[i], g.points[j]);
            const CylinderPair c = cylinder01(cplx(k * r, 0.0));
            entry(i, j, r, c);
            entry(j, i, r, c);
        }
    }
}

} // namespace

LayerOperators assemble_layer_operators(double k, const BoundaryGrid& grid, const AssemblyOptions& options)
{
    check_grid_wavenumber(k);
    const Refined ref = refine(grid, options.refinement);
    const BoundaryGrid& g = ref.fine;
    const int Nf = g.N;

    CMatrix Sf, Df, Daf;
    helmholtz_matrices(k, g, Sf, &Df, &Daf);
    CMatrix S = coarsen(Sf, ref);
    CMatrix D = coarsen(Df, ref);
    CMatrix Da = coarsen(Daf, ref);
    CMatrix Hm;
    if (options.hypersingular) {
        // Maue: H = d/ds S d/ds + k^2 (n_x . n_y) S. With S = S~ diag(|x'|)
        // and d/ds = diag(1/|x'|) d/dt the speeds cancel in the first term;
        // the second is split as k^2 S - (k^2/2) |n_x - n_y|^2 S, whose
        // remainder kernel vanishes to second order on the diagonal.
        const RMatrix Dt = spectral_derivative_matrix(Nf);
        const CMatrix St = Sf * ref.fine_speed.cwiseInverse().asDiagonal();
        const RMatrix DtE = Dt * ref.E;
        const RMatrix Dt_rows = sample_rows(Dt, ref);
        Hm = ref.coarse_speed.cwiseInverse().asDiagonal() * ((Dt_rows * St) * DtE);
        CMatrix Sn(Nf, Nf);
        for (int i = 0; i < Nf; ++i)
            for (int j = 0; j < Nf; ++j) {
                const double d0 = g.normals[i][0] - g.normals[j][0];
                const double d1 = g.normals[i][1] - g.normals[j][1];
                Sn(i, j) = 0.5 * (d0 * d0 + d1 * d1) * Sf(i, j);
            }
        Hm += (k * k) * (S - coarsen(Sn, ref));
        check_finite(Hm, "H");
    }

    check_finite(S, "S");
    check_finite(D, "D");
    check_finite(Da, "D'");
    LayerOperators out{
        {std::move(S), grid, SpaceTag::L2, SpaceTag::L2},
        {std::move(D), grid, SpaceTag::L2, SpaceTag::L2},
        {std::move(Da), grid, SpaceTag::L2, SpaceTag::L2},
        {std::move(Hm), grid, SpaceTag::H1k, SpaceTag::L2},
    };
    return out;
}

DiscreteOperator assemble_single_layer(cplx kappa, const BoundaryGrid& grid, const AssemblyOptions& options)
{
    if (!(kappa.real() >= 0.0) || !(kappa.imag() >= 0.0) || std::abs(kappa) == 0.0)
        throw InvalidParameter("assemble_single_layer: kappa must be nonzero in the closed first quadrant");
    const Refined ref = refine(grid, options.refinement);
    const BoundaryGrid& g = ref.fine;
    const int N = g.N;
    const double h = kPi / (N / 2);
    const std::vector<double> R = log_weights(N);
    const std::vector<double> Lg = log_kernel(N);
    CMatrix S(N, N);

#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < N; ++i) {
        const double si = g.speeds[i];
        const cplx m2 = 0.25 * kI - kEulerGamma / (2.0 * kPi) - std::log(0.5 * kappa * si) / (2.0 * kPi);
        S(i, i) = R[0] * (-kInvFourPi * si) + h * m2 * si;
        for (int j = i + 1; j < N; ++j) {
            const int m = j - i;
            const double r = distance(g.points[i], g.points[j]);
            const CylinderPair c = cylinder01(kappa * r);
            // m and N - m share weights and log kernel values.
            const cplx ms = 0.25 * kI * c.H0;
            const cplx ms1 = -kInvFourPi * c.J0;
            const cplx v = R[m] * ms1 + h * (ms - ms1 * Lg[m]);
            S(i, j) = v * g.speeds[j];
            S(j, i) = v * si;
        }
    }
    S = coarsen(S, ref);
    check_finite(S, "S");
    return {std::move(S), grid, SpaceTag::L2, SpaceTag::L2};
}

DiscreteOperator assemble_laplace_single_layer(const BoundaryGrid& grid, const AssemblyOptions& options)
{
    const Refined ref = refine(grid, options.refinement);
    const BoundaryGrid& g = ref.fine;
    const int N = g.N;
    const double h = kPi / (N / 2);
    const std::vector<double> R = log_weights(N);
    CMatrix S(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            const int m = (i - j + N) % N;
            const double sj = g.speeds[j];
            double m2;
            if (i == j) {
                m2 = -std::log(g.speeds[i]) / (2.0 * kPi) * sj;
            } else {
                const double r = distance(g.points[i], g.points[j]);
                const double s = std::sin(kPi * m / N);
                m2 = -kInvFourPi * std::log(r * r / (4.0 * s * s)) * sj;
            }
            S(i, j) = R[m] * (-kInvFourPi * sj) + h * m2;
        }
    }
    S = coarsen(S, ref);
    return {std::move(S), grid, SpaceTag::L2, SpaceTag::L2};
}

double l2_operator_norm(const DiscreteOperator& A)
{
    if (A.source != SpaceTag::L2 || A.target != SpaceTag::L2)
        throw UnsupportedSpace("l2_operator_norm: operator must map L2 to L2");
    return largest_singular_value(weighted_similarity(A));
}

double sobolev_norm(const BoundaryFunction& f, double s, double k)
{
    const BoundaryGrid& g = f.grid;
    if (f.values.size() != g.N)
        throw InvalidParameter("sobolev_norm: length mismatch");
    double l2 = 0.0;
    for (int j = 0; j < g.N; ++j)
        l2 += g.weights[j] * std::norm(f.values[j]);
    if (s == 0.0)
        return std::sqrt(l2);
    if (s == 1.0) {
        const CVector df = surface_derivative_matrix(g) * f.values;
        double grad = 0.0;
        cplx nyq = 0.0;
        for (int j = 0; j < g.N; ++j) {
            grad += g.weights[j] * std::norm(df[j]);
            nyq += (j % 2 == 0) ? f.values[j] : -f.values[j];
        }
        grad += nyquist_weight(g) * std::norm(nyq);
        return std::sqrt(grad + k * k * l2);
    }
    if (!g.curve.is_circle())
        throw UnsupportedSpace("sobolev_norm: fractional order requires a circle");
    if (s < -1.0 || s > 1.0)
        throw UnsupportedSpace("sobolev_norm: order must lie in [-1, 1]");
    const CVector fhat = unitary_dft(g) * f.values;
    const RVector m = circle_multiplier(g, s, k);
    // ||f||^2 = (2 pi a / N) sum m_n^2 |(U f)_n|^2
    const double w = g.weights[0];
    double sum = 0.0;
    for (int p = 0; p < g.N; ++p)
        sum += m[p] * m[p] * std::norm(fhat[p]);
    return std::sqrt(w * sum);
}

double graded_operator_norm(const DiscreteOperator& A, SpaceTag from, SpaceTag to, double k)
{
    const BoundaryGrid& g = A.grid;
    const bool fractional = (from == SpaceTag::Hhalf_k || from == SpaceTag::Hminushalf_k ||
                             to == SpaceTag::Hhalf_k || to == SpaceTag::Hminushalf_k);
    if (g.curve.is_circle()) {
        const CMatrix U = unitary_dft(g);
        const RVector mf = circle_multiplier(g, space_order(from), k);
        const RVector mt = circle_multiplier(g, space_order(to), k);
        const CMatrix B = mt.asDiagonal() * (U * A.matrix * U.adjoint()) * mf.cwiseInverse().asDiagonal();
        return largest_singular_value(B);
    }
    if (fractional)
        throw UnsupportedSpace("graded_operator_norm: fractional spaces require a circle");
    const int N = g.N;
    RVector sw(N);
    for (int j = 0; j < N; ++j)
        sw[j] = std::sqrt(g.weights[j]);
    CMatrix left, right;
    if (to == SpaceTag::L2)
        left = sw.asDiagonal() * A.matrix;
    else
        left = h1_factor(g, k).cast<cplx>() * A.matrix;
    if (from == SpaceTag::L2) {
        right = left * sw.cwiseInverse().asDiagonal();
    } else {
        // left * U^{-1}: solve X U = left.
        const RMatrix Uf = h1_factor(g, k);
        right = Uf.transpose().cast<cplx>().triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
    }
    return largest_singular_value(right);
}

} // namespace hbie
