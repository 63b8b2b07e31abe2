// Acceptance run: one PASS/FAIL line per criterion, the same lines written
// to the report file given as the first argument. Exit status is 0 once all
// criteria have been evaluated; a failing criterion does not abort the run.

#include "hbie/billiards.hpp"
#include "hbie/disk_oracle.hpp"
#include "hbie/linalg.hpp"
#include "hbie/operators.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

using namespace hbie;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> k_grid(int jmax)
{
    std::vector<double> k;
    for (int j = 0; j <= jmax; ++j)
        k.push_back(20.0 * std::pow(2.0, j));
    return k;
}

double max_mode_error(const CMatrix& A, const BoundaryGrid& g, int n, cplx sym)
{
    const CVector e = fourier_mode(g, n);
    return (A * e - sym * e).cwiseAbs().maxCoeff();
}

Outcome oracle_link()
{
    const auto t0 = std::chrono::steady_clock::now();
    const double k = 5.0;
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 256);
    const LayerOperators L = assemble_layer_operators(k, g);
    const EtaSpec es = EtaSpec::constant(1.0, 0.0);
    const CMatrix A = build_combined_A(L, k, es).matrix, B = build_combined_B(L, k, es).matrix;
    const ModeTable t = mode_table(k, 1.0, k, 10);
    double err = 0.0;
    for (int n = -10; n <= 10; ++n) {
        const int m = std::abs(n);
        for (auto [M, s] : {std::pair{&L.S.matrix, t.s[m]}, {&L.D.matrix, t.d[m]}, {&L.Dadj.matrix, t.dadj[m]},
                            {&L.H.matrix, t.h[m]}, {&A, t.aprime[m]}, {&B, t.b[m]}})
            err = std::max(err, max_mode_error(*M, g, n, s));
    }
    const double secs = seconds_since(t0);
    return {err < 1e-9 && secs < 10.0, fmt("max node-wise error %.2e (< 1e-9), %.1f s (< 10 s)", err, secs)};
}

Outcome calderon()
{
    const BoundaryGrid c = boundary_grid(Curve::circle(1), 256);
    const CalderonProjectors Pc = calderon_projectors(5.0, c);
    const double ec = block_l2_norm(Pc.minus * Pc.minus - Pc.minus, c);
    const BoundaryGrid kg = boundary_grid(Curve::kite(), 512);
    const CalderonProjectors Pk = calderon_projectors(5.0, kg);
    const double ek = block_l2_norm(Pk.minus * Pk.minus - Pk.minus, kg);
    return {ec < 1e-8 && ek < 1e-6, fmt("circle %.2e (< 1e-8), kite %.2e (< 1e-6)", ec, ek)};
}

Outcome decompositions()
{
    const double k = 10.0;
    double mode = 0.0;
    for (const cplx eta : {cplx(k, 0), cplx(-k, 0), cplx(k, 1)}) {
        const DecompositionResiduals r = mode_decomposition_residuals(k, 1.0, eta, 40);
        mode = std::max({mode, r.resA, r.resB});
    }
    const BoundaryGrid g = boundary_grid(Curve::kite(), 512);
    const DecompositionResiduals m = decomposition_residuals(5.0, EtaSpec::constant(1.0, 0.0), g);
    const DecompositionResiduals t = mode_decomposition_residuals(k, 0.8, k, 40, RegularizerKind::S0);
    const double bt = t.resBtilde.value_or(INFINITY);
    return {mode < 1e-10 && m.resA < 1e-5 && m.resB < 1e-5 && bt < 1e-8,
            fmt("modes %.2e (< 1e-10); kite resA %.2e resB %.2e (< 1e-5); resBtilde %.2e (< 1e-8)", mode, m.resA,
                m.resB, bt)};
}

// Fits a power law over the default grid to one field of ModeNorms.
template <class F>
FitResult mode_fit(F&& field, std::vector<double>* values = nullptr)
{
    std::vector<std::pair<double, double>> p;
    for (double k : k_grid(6)) {
        const double v = field(mode_norms(k, k), k);
        p.emplace_back(k, v);
        if (values)
            values->push_back(v);
    }
    return fit_power_law(p);
}

Outcome ainv_bound()
{
    std::vector<double> v;
    const FitResult f = mode_fit([](const ModeNorms& m, double) { return m.norm_Ainv; }, &v);
    double lo = INFINITY, hi = 0.0;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return {std::abs(f.exponent) <= 0.1,
            fmt("exponent %.3f (|p| <= 0.1); values in [%.3f, %.3f], floor %.3f", f.exponent, lo, hi, lo)};
}

Outcome cond_growth()
{
    const auto t0 = std::chrono::steady_clock::now();
    const FitResult f = mode_fit([](const ModeNorms& m, double) { return m.cond; });
    const double secs = seconds_since(t0);
    return {f.exponent >= 0.18 && f.exponent <= 0.48 && secs < 60.0,
            fmt("exponent %.3f (in [0.18, 0.48]), %.1f s (< 60 s)", f.exponent, secs)};
}

Outcome layer_norms()
{
    const FitResult s = mode_fit([](const ModeNorms& m, double) { return m.norm_S; });
    const FitResult d = mode_fit([](const ModeNorms& m, double) { return m.norm_D; });
    return {s.exponent >= -0.77 && s.exponent <= -0.57 && d.exponent >= 0.0 && d.exponent <= 0.33,
            fmt("S exponent %.3f (in [-0.77, -0.57]), D exponent %.3f (in [0, 0.33])", s.exponent, d.exponent)};
}

Outcome sharpness()
{
    const std::vector<double> ks = k_grid(6);
    const SharpnessSweep s = sharpness_sweep(ks);
    std::vector<std::pair<double, double>> pd, pn;
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        pd.emplace_back(ks[i], s.dtn_ratio[i]);
        pn.emplace_back(ks[i], s.ntd_ratio[i]);
        lo = std::min(lo, s.dtn_ratio[i]);
        hi = std::max(hi, s.dtn_ratio[i]);
    }
    const double ed = fit_power_law(pd).exponent, en = fit_power_law(pn).exponent;
    return {std::abs(ed) <= 0.05 && std::abs(en) <= 0.1,
            fmt("dtn exponent %.3f (|p| <= 0.05), values in [%.3f, %.3f]; ntd/k^(1/3) exponent %.3f (|p| <= 0.1)", ed,
                lo, hi, en)};
}

Outcome itd_bound()
{
    const FitResult f = mode_fit([](const ModeNorms& m, double) { return m.itd_l2_h1; });
    return {std::abs(f.exponent) <= 0.1, fmt("exponent %.3f (|p| <= 0.1)", f.exponent)};
}

Outcome ball_ratio()
{
    double lo = INFINITY;
    for (int d : {2, 3})
        for (double k : k_grid(5))
            lo = std::min(lo, ball_sharpness_ratio(k, 2, d));
    const double r640 = ball_sharpness_ratio(640, 2, 2);
    const double dev = std::abs(r640 - 1 / std::sqrt(2.0));
    return {lo >= 0.4 && dev <= 0.05, fmt("min ratio %.3f (>= 0.4); d=2 k=640 ratio %.4f, |r - 1/sqrt 2| = %.4f (<= 0.05)",
                                         lo, r640, dev)};
}

Outcome poles()
{
    const PoleScan s = impedance_pole_scan(1.0, 1.0, {1.0, 40.0}, {-2.0, 0.5}, 10.0, 60);
    const PoleScan z = impedance_pole_scan(1.0, 0.0, {1.0, 40.0}, {-2.0, 0.5}, 10.0, 60);
    return {s.upper_half_count == 0 && s.strip_width > 0.0 && !s.origin_degenerate && z.origin_degenerate,
            fmt("%zu poles, %d with Im k >= 0, strip width %.3f%s; b=0 degenerate at k=0: %s", s.poles.size(),
                s.upper_half_count, s.strip_width, s.strip_from_window ? " (window bound)" : "",
                z.origin_degenerate ? "yes" : "no")};
}

Outcome gmres_sign()
{
    const double k = 40.0;
    const BoundaryGrid g = boundary_grid(Curve::kite(), 1024);
    AssemblyOptions opt;
    opt.hypersingular = false;
    const LayerOperators L = assemble_layer_operators(k, g, opt);
    int it[2];
    bool conv = true;
    for (int i = 0; i < 2; ++i) {
        const EtaSpec es = EtaSpec::constant(i == 0 ? 1.0 : -1.0, 0.0);
        const GmresReport r = gmres(build_combined_A(L, k, es), plane_wave_rhs(k, es, g, 0.0), 1e-8);
        it[i] = r.iterations;
        conv = conv && r.converged;
    }
    return {conv && it[0] < it[1], fmt("iterations %d (eta = +k) vs %d (eta = -k)", it[0], it[1])};
}

Outcome mie()
{
    const double k = 10.0;
    const BoundaryGrid g = boundary_grid(Curve::circle(1), 512);
    const EtaSpec es = EtaSpec::constant(1.0, 0.0);
    const BoundaryFunction dudn = solve_dense(build_combined_A(k, es, g), BoundaryFunction{plane_wave_rhs(k, es, g, 0.0), g});
    const MieSolution ref(k, 1.0, 0.0);
    double err = 0.0, scale = 0.0;
    for (int m = 0; m < 360; ++m) {
        const double th = 2 * kPi * m / 360;
        const cplx f = ref.far_field(th);
        err = std::max(err, std::abs(far_field_from_neumann(dudn, k, th) - f));
        scale = std::max(scale, std::abs(f));
    }
    return {err / scale < 1e-6, fmt("max relative far-field error %.2e (< 1e-6)", err / scale)};
}

Outcome billiards()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Scene discs({Curve::circle(1).translated({2, 0}), Curve::circle(1).translated({-2, 0})}, 5.0);
    const EscapeStatistics a = escape_statistics(discs, 10000, 200.0, 1);
    const EscapeStatistics b = escape_statistics(Scene({Curve::kite()}, 5.0), 10000, 200.0, 1);
    const double secs = seconds_since(t0);
    const bool ok = a.classification == "trapping_empirical" && b.classification == "nontrapping_empirical" &&
                    std::isfinite(b.max_escape_time) && secs < 30.0;
    return {ok, fmt("two discs: %s (escaped %d/%d, max time %.1f); kite: %s (max time %.1f); %.1f s (< 30 s)",
                    a.classification.c_str(), a.escaped, a.samples, a.max_escape_time, b.classification.c_str(),
                    b.max_escape_time, secs)};
}

Outcome property_suites()
{
    std::vector<std::string> bad;

    double wr = 0.0;
    for (double nu : {0.0, 1.0, 2.5, 7.0, 30.0})
        for (double x : {0.3, 1.0, 4.0, 25.0, 100.0}) {
            const BesselEval b = bessel(nu, x);
            const cplx w = b.J * b.Yprime - b.Jprime * b.Y;
            wr = std::max(wr, std::abs(w * (kPi * x / 2.0) - 1.0));
        }
    if (!(wr < 1e-10))
        bad.push_back(fmt("wronskian %.1e", wr));

    std::mt19937 gen(5);
    std::normal_distribution<double> nd;
    const int n = 80;
    CMatrix A(n, n);
    CVector rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs[i] = cplx(nd(gen), nd(gen));
        for (int j = 0; j < n; ++j)
            A(i, j) = cplx(nd(gen), nd(gen)) / std::sqrt(double(n)) + (i == j ? 2.0 : 0.0);
    }
    const GmresReport r = gmres(A, rhs, 1e-10);
    bool mono = r.converged;
    for (std::size_t i = 1; i < r.residual_history.size(); ++i)
        mono = mono && r.residual_history[i] <= r.residual_history[i - 1] * (1 + 1e-12);
    if (!mono)
        bad.push_back("gmres residuals");

    const BoundaryGrid g = boundary_grid(Curve::kite(), 128);
    const CalderonProjectors P = calderon_projectors(3.0, g);
    const double comp = (P.minus + P.plus - CMatrix::Identity(2 * g.N, 2 * g.N)).cwiseAbs().maxCoeff();
    if (!(comp < 1e-13))
        bad.push_back(fmt("projector sum %.1e", comp));

    const Scene s({Curve::circle(1).translated({2.2, 0}), Curve::kite().scaled(0.5).translated({-1.0, 1.9}),
                   Curve::ellipse(1, 0.7).translated({-1.1, -1.9})},
                  5.0);
    double law = 0.0, retrace = 0.0;
    int bounces = 0;
    for (int i = 0; i < 300; ++i) {
        const double a = 0.05 + 2 * kPi * i / 300;
        const RayOutcome ray = trace_ray(s, {0, 0}, {std::cos(a), std::sin(a)}, 200);
        for (std::size_t j = 0; j < ray.path.size(); ++j) {
            const Bounce& b = ray.path[j];
            const double in = b.incoming[0] * b.normal[0] + b.incoming[1] * b.normal[1];
            const double out = b.outgoing[0] * b.normal[0] + b.outgoing[1] * b.normal[1];
            law = std::max({law, std::abs(in + out), std::abs(std::hypot(b.outgoing[0], b.outgoing[1]) - 1)});
            ++bounces;
            if (j == 0)
                continue;
            const Vec2 back{-b.incoming[0], -b.incoming[1]};
            const RayOutcome rr = trace_ray(s, {b.point[0] + 1e-12 * back[0], b.point[1] + 1e-12 * back[1]}, back, 100);
            retrace = rr.path.empty() ? INFINITY
                                      : std::max(retrace, std::hypot(rr.path[0].point[0] - ray.path[j - 1].point[0],
                                                                     rr.path[0].point[1] - ray.path[j - 1].point[1]));
        }
    }
    if (!(law < 1e-12) || bounces == 0)
        bad.push_back(fmt("reflection law %.1e", law));
    if (!(retrace < 1e-9))
        bad.push_back(fmt("time reversal %.1e", retrace));

    return {bad.empty(), bad.empty() ? fmt("wronskian %.1e, gmres %d monotone steps, projector sum %.1e, %d bounces "
                                           "(law %.1e, reversal %.1e)",
                                           wr, r.iterations, comp, bounces, law, retrace)
                                     : "failed: " + [&] {
                                           std::string s;
                                           for (const auto& b : bad)
                                               s += (s.empty() ? "" : ", ") + b;
                                           return s;
                                       }()};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle link", oracle_link},
        {"Calderon idempotency", calderon},
        {"decomposition residuals", decompositions},
        {"inverse norm of A' bounded", ainv_bound},
        {"condition number growth", cond_growth},
        {"S and D norm growth", layer_norms},
        {"DtN and NtD sharpness", sharpness},
        {"ItD bound", itd_bound},
        {"ball sharpness ratio", ball_ratio},
        {"impedance pole-free strip", poles},
        {"GMRES sign effect", gmres_sign},
        {"Mie far field", mie},
        {"billiards classification", billiards},
        {"property suites", property_suites},
    };

    std::ofstream report;
    if (argc > 1)
        report.open(argv[1]);
    int passed = 0, i = 0;
    for (const auto& [name, run] : criteria) {
        ++i;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        passed += o.pass;
        const std::string line =
            fmt("%s %2d %s: %s [%.1f s]", o.pass ? "PASS" : "FAIL", i, name, o.detail.c_str(), seconds_since(t0));
        std::cout << line << std::endl;
        if (report)
            report << line << '\n';
    }
    const std::string total = fmt("%d of %zu criteria passed", passed, criteria.size());
    std::cout << total << std::endl;
    if (report)
        report << total << '\n';
    return 0;
}
