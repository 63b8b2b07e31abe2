#include "hbie/linalg.hpp"

#include "hbie/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace hbie {

namespace {

RVector sqrt_weights(const BoundaryGrid& g)
{
    RVector sw(g.N);
    for (int j = 0; j < g.N; ++j)
        sw[j] = std::sqrt(g.weights[j]);
    return sw;
}

CMatrix weighted(const DiscreteOperator& A)
{
    const RVector sw = sqrt_weights(A.grid);
    return sw.asDiagonal() * A.matrix * sw.cwiseInverse().asDiagonal();
}

Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& A)
{
    if (A.rows() != A.cols())
        throw InvalidParameter("solve_dense: matrix must be square");
    if (!A.allFinite())
        throw InvalidParameter("solve_dense: non-finite matrix entry");
    Eigen::PartialPivLU<CMatrix> lu(A);
    const double scale = A.cwiseAbs().rowwise().sum().maxCoeff();
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot >= 1e-14 * scale) || pivot == 0.0)
        throw SingularMatrix("solve_dense: pivot below 1e-14 ||A||");
    return lu;
}

// Complex Givens rotation zeroing b in (a, b).
void givens(cplx a, cplx b, double& c, cplx& s)
{
    const double na = std::abs(a), nb = std::abs(b);
    if (nb == 0.0) {
        c = 1.0;
        s = 0.0;
        return;
    }
    if (na == 0.0) {
        c = 0.0;
        s = std::conj(b) / nb;
        return;
    }
    const double r = std::hypot(na, nb);
    c = na / r;
    s = (a / na) * std::conj(b) / r;
}

} // namespace

CMatrix solve_dense(const CMatrix& A, const CMatrix& B)
{
    if (B.rows() != A.rows())
        throw InvalidParameter("solve_dense: dimension mismatch");
    return checked_lu(A).solve(B);
}

BoundaryFunction solve_dense(const DiscreteOperator& A, const BoundaryFunction& b)
{
    return {solve_dense(A.matrix, CMatrix(b.values)).col(0), A.grid};
}

CMatrix inverse(const CMatrix& A)
{
    return checked_lu(A).inverse();
}

GmresReport gmres(const CMatrix& A, const CVector& b, double tol, int max_iterations)
{
    if (!(tol > 0.0 && tol <= 1e-2))
        throw InvalidParameter("gmres: tol must lie in (0, 1e-2]");
    if (A.rows() != A.cols() || b.size() != A.rows())
        throw InvalidParameter("gmres: dimension mismatch");
    if (max_iterations < 1)
        throw InvalidParameter("gmres: max_iterations must be >= 1");

    const Eigen::Index n = A.rows();
    GmresReport report;
    const double beta = b.norm();
    report.residual_history.push_back(1.0);
    if (beta == 0.0) {
        report.solution = CVector::Zero(n);
        report.converged = true;
        return report;
    }
    const int m_max = static_cast<int>(std::min<Eigen::Index>(max_iterations, n));
    CMatrix V(n, m_max + 1);
    CMatrix Hh = CMatrix::Zero(m_max + 1, m_max);
    std::vector<double> cs(m_max);
    std::vector<cplx> sn(m_max);
    CVector g = CVector::Zero(m_max + 1);
    g[0] = beta;
    V.col(0) = b / beta;

    int j = 0;
    double rel = 1.0;
    for (; j < m_max; ++j) {
        CVector w = A * V.col(j);
        for (int i = 0; i <= j; ++i) {
            Hh(i, j) = V.col(i).dot(w);
            w -= Hh(i, j) * V.col(i);
        }
        const double hn = w.norm();
        Hh(j + 1, j) = hn;
        if (hn > 0.0)
            V.col(j + 1) = w / hn;
        for (int i = 0; i < j; ++i) {
            const cplx t = cs[i] * Hh(i, j) + sn[i] * Hh(i + 1, j);
            Hh(i + 1, j) = -std::conj(sn[i]) * Hh(i, j) + cs[i] * Hh(i + 1, j);
            Hh(i, j) = t;
        }
        givens(Hh(j, j), Hh(j + 1, j), cs[j], sn[j]);
        Hh(j, j) = cs[j] * Hh(j, j) + sn[j] * Hh(j + 1, j);
        Hh(j + 1, j) = 0.0;
        g[j + 1] = -std::conj(sn[j]) * g[j];
        g[j] = cs[j] * g[j];
        rel = std::abs(g[j + 1]) / beta;
        report.residual_history.push_back(rel);
        if (rel <= tol || hn == 0.0) {
            ++j;
            break;
        }
    }
    const int k = j;
    CVector y = Hh.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    report.solution = V.leftCols(k) * y;
    report.iterations = k;
    report.final_relative_residual = (b - A * report.solution).norm() / beta;
    report.converged = rel <= tol || report.final_relative_residual <= tol;
    return report;
}

GmresReport gmres(const DiscreteOperator& A, const CVector& b, double tol, int max_iterations)
{
    const RVector sw = sqrt_weights(A.grid);
    GmresReport r = gmres(weighted(A), CVector(sw.asDiagonal() * b), tol, max_iterations);
    r.solution = sw.cwiseInverse().asDiagonal() * r.solution;
    return r;
}

RVector weighted_singular_values(const DiscreteOperator& A)
{
    if (A.source != SpaceTag::L2 || A.target != SpaceTag::L2)
        throw UnsupportedSpace("singular values: operator must map L2 to L2");
    Eigen::BDCSVD<CMatrix> svd(weighted(A));
    return svd.singularValues();
}

double condition_number(const DiscreteOperator& A)
{
    const RVector s = weighted_singular_values(A);
    const double smin = s[s.size() - 1];
    if (smin == 0.0)
        return std::numeric_limits<double>::infinity();
    return s[0] / smin;
}

double coercivity_constant(const CMatrix& At, int theta_samples)
{
    if (theta_samples < 360)
        throw InvalidParameter("coercivity_constant: theta_samples must be >= 360");
    if (At.rows() != At.cols())
        throw InvalidParameter("coercivity_constant: matrix must be square");
    double best = -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig;
    for (int m = 0; m < theta_samples; ++m) {
        const double theta = 2.0 * kPi * m / theta_samples;
        const cplx rot = std::exp(kI * theta);
        const CMatrix Hm = 0.5 * (rot * At + std::conj(rot) * At.adjoint());
        eig.compute(Hm, Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success)
            throw Error("coercivity_constant: eigensolver failed");
        best = std::max(best, eig.eigenvalues()[0]);
    }
    return best;
}

double coercivity_constant(const DiscreteOperator& A, int theta_samples)
{
    if (A.source != SpaceTag::L2 || A.target != SpaceTag::L2)
        throw UnsupportedSpace("coercivity_constant: operator must map L2 to L2");
    return coercivity_constant(weighted(A), theta_samples);
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& pairs)
{
    if (pairs.size() < 3)
        throw InvalidParameter("fit_power_law: need at least 3 pairs");
    double sx = 0, sy = 0;
    for (const auto& [k, v] : pairs) {
        if (!(k > 0.0) || !(v > 0.0) || !std::isfinite(k) || !std::isfinite(v))
            throw InvalidParameter("fit_power_law: k and value must be positive and finite");
        sx += std::log(k);
        sy += std::log(v);
    }
    const double n = static_cast<double>(pairs.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [k, v] : pairs) {
        const double dx = std::log(k) - mx, dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 1e-300)
        throw InvalidParameter("fit_power_law: all k are equal");
    FitResult f;
    f.exponent = sxy / sxx;
    f.log_prefactor = my - f.exponent * mx;
    const double ss_res = std::max(0.0, syy - f.exponent * sxy);
    f.r_squared = syy <= 1e-300 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return f;
}

} // namespace hbie
