#include "commands.hpp"

#include "hbie/billiards.hpp"
#include "hbie/disk_oracle.hpp"
#include "hbie/errors.hpp"
#include "hbie/linalg.hpp"
#include "hbie/operators.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hbie_cli {

using namespace hbie;

std::vector<double> default_k_grid()
{
    std::vector<double> k;
    for (int j = 0; j <= 6; ++j)
        k.push_back(20.0 * (1 << j));
    return k;
}

NRule NRule::parse(const std::string& s)
{
    NRule r;
    if (s == "auto")
        r.kind = Kind::Auto;
    else if (s == "modes")
        r.kind = Kind::Modes;
    else if (s == "matrix")
        r.kind = Kind::Matrix;
    else {
        std::size_t pos = 0;
        int n = 0;
        try {
            n = std::stoi(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size() || n < 16 || n > 16384 || n % 2)
            throw ConfigError("N must be auto, modes, matrix or an even integer in [16, 16384]: " + s);
        r.kind = Kind::Fixed;
        r.fixed = n;
    }
    return r;
}

int matrix_size(double k)
{
    int n = std::max(256, static_cast<int>(std::ceil(10.0 * k)));
    return n + (n % 2);
}

bool all_rows_failed(const Table& t)
{
    const int ie = t.column_index("error");
    if (t.rows.empty() || ie < 0)
        return false;
    for (const auto& row : t.rows)
        if (std::holds_alternative<std::monostate>(row[ie]))
            return false;
    return true;
}

namespace {

std::string eta_model(double a, double b)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "a=%g;b=%g", a, b);
    return buf;
}

Curve checked_curve(const std::string& name, const std::vector<double>& params)
{
    try {
        if (name == "circle" && params.empty())
            return make_curve(name, {1.0});
        return make_curve(name, params);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
}

void check_k(const std::vector<double>& ks)
{
    for (double k : ks)
        if (!(k > 0.0) || !std::isfinite(k))
            throw ConfigError("every k must be positive and finite");
}

void check_refinement(int r)
{
    if (r < 1 || r > 4)
        throw ConfigError("refinement must lie in [1, 4]");
}

bool use_modes(const NRule& rule, const Curve& c)
{
    if (rule.kind == NRule::Kind::Modes) {
        if (!c.is_circle())
            throw ConfigError("N = modes needs the circle geometry");
        return true;
    }
    return rule.kind == NRule::Kind::Auto && c.is_circle();
}

int grid_size(const NRule& rule, double k)
{
    return rule.kind == NRule::Kind::Fixed ? rule.fixed : matrix_size(k);
}

// Runs f(i) for every row in parallel, storing any exception text in the
// error column of that row.
template <class F>
void fill_rows(Table& t, F&& f)
{
    const int n = static_cast<int>(t.rows.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            f(i, t.rows[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
            t.set(t.rows[static_cast<std::size_t>(i)], "error", std::string(e.what()));
        }
    }
}

} // namespace

Table cmd_sweep(const SweepArgs& a)
{
    const Curve curve = checked_curve(a.geometry, a.params);
    const NRule rule = NRule::parse(a.N);
    check_k(a.k);
    check_refinement(a.refinement);
    if (!(a.tol > 0.0 && a.tol <= 1e-2))
        throw ConfigError("tol must lie in (0, 1e-2]");
    if (a.theta < 360)
        throw ConfigError("theta must be >= 360");
    const bool modes = use_modes(rule, curve);

    Table t;
    t.command = "sweep";
    t.columns = {"k", "eta_model", "geometry", "N", "norm_A", "norm_Ainv", "cond", "alpha_coercivity",
                 "gmres_iters_plus", "gmres_iters_minus", "dtn_ratio", "ntd_ratio", "resA", "resB", "error"};
    for (double k : a.k) {
        auto& row = t.add_row();
        t.set(row, "k", k);
        t.set(row, "eta_model", eta_model(a.eta_a, a.eta_b));
        t.set(row, "geometry", curve.name());
    }

    fill_rows(t, [&](int i, std::vector<Cell>& row) {
        const double k = a.k[static_cast<std::size_t>(i)];
        const cplx eta(a.eta_a * k, a.eta_b);
        if (modes) {
            const double radius = curve.radius();
            const ModeNorms m = mode_norms(k, eta, radius);
            t.set(row, "N", static_cast<std::int64_t>(2 * mode_truncation(k) + 1));
            t.set(row, "norm_A", m.norm_A);
            t.set(row, "norm_Ainv", m.norm_Ainv);
            t.set(row, "cond", m.cond);
            if (a.coercivity)
                t.set(row, "alpha_coercivity", m.alpha);
            t.set(row, "dtn_ratio", m.dtn_h1_l2);
            t.set(row, "ntd_ratio", m.ntd_l2_h1 * std::pow(k, -1.0 / 3.0));
            if (a.residuals) {
                const auto r = mode_decomposition_residuals(k, radius, eta, mode_truncation(k));
                t.set(row, "resA", r.resA);
                t.set(row, "resB", r.resB);
            }
            return;
        }

        const int N = grid_size(rule, k);
        t.set(row, "N", static_cast<std::int64_t>(N));
        const BoundaryGrid g = boundary_grid(curve, N);
        AssemblyOptions opt;
        opt.refinement = a.refinement;
        opt.hypersingular = a.maps;
        const LayerOperators L = assemble_layer_operators(k, g, opt);
        const EtaSpec es = EtaSpec::constant(a.eta_a, a.eta_b);
        const DiscreteOperator A = build_combined_A(L, k, es);
        const RVector sv = weighted_singular_values(A);
        t.set(row, "norm_A", sv(0));
        t.set(row, "norm_Ainv", 1.0 / sv(sv.size() - 1));
        t.set(row, "cond", sv(0) / sv(sv.size() - 1));
        if (a.coercivity)
            t.set(row, "alpha_coercivity", coercivity_constant(A, a.theta));
        std::string notes;
        if (a.gmres) {
            const double s = std::abs(a.eta_a);
            for (int sign : {1, -1}) {
                const EtaSpec esg = EtaSpec::constant(sign * s, a.eta_b);
                const GmresReport rep = gmres(build_combined_A(L, k, esg), plane_wave_rhs(k, esg, g, a.alpha), a.tol);
                t.set(row, sign > 0 ? "gmres_iters_plus" : "gmres_iters_minus",
                      static_cast<std::int64_t>(rep.iterations));
                if (!rep.converged)
                    notes += std::string(notes.empty() ? "" : "; ") + "gmres not converged for eta " +
                             (sign > 0 ? "+" : "-");
            }
        }
        if (a.maps) {
            t.set(row, "dtn_ratio", graded_operator_norm(dtn_map(L, k, es), SpaceTag::H1k, SpaceTag::L2, k));
            t.set(row, "ntd_ratio", graded_operator_norm(ntd_map(L, k, es), SpaceTag::L2, SpaceTag::H1k, k) *
                                        std::pow(k, -1.0 / 3.0));
        }
        if (a.residuals) {
            const auto r = decomposition_residuals(k, es, g);
            t.set(row, "resA", r.resA);
            t.set(row, "resB", r.resB);
        }
        if (!notes.empty())
            t.set(row, "error", notes);
    });

    t.summary["path"] = modes ? "modes" : "matrix";
    t.summary["fits"] = fit_columns(t, {"norm_A", "norm_Ainv", "cond", "alpha_coercivity", "gmres_iters_plus",
                                        "gmres_iters_minus", "dtn_ratio", "ntd_ratio", "resA", "resB"});
    return t;
}

Table cmd_sharpness(const SharpnessArgs& a)
{
    check_k(a.k);
    if (!(a.radius > 0.0) || !std::isfinite(a.radius))
        throw ConfigError("radius must be positive");
    if (!(a.truncation_factor >= 1.0 && a.truncation_factor <= 8.0))
        throw ConfigError("truncation_factor must lie in [1, 8]");

    Table t;
    t.command = "sharpness";
    t.columns = {"k", "dtn_ratio", "ntd_ratio", "dtn_half", "ntd_half", "error"};
    for (double k : a.k)
        t.set(t.add_row(), "k", k);
    fill_rows(t, [&](int i, std::vector<Cell>& row) {
        const double k = a.k[static_cast<std::size_t>(i)];
        const SharpnessSweep s = sharpness_sweep({k}, a.radius, a.truncation_factor);
        // raw NtD norms here, so the fitted exponent is the growth rate itself
        const double c = std::cbrt(k);
        t.set(row, "dtn_ratio", s.dtn_ratio[0]);
        t.set(row, "ntd_ratio", s.ntd_ratio[0] * c);
        t.set(row, "dtn_half", s.dtn_half[0]);
        t.set(row, "ntd_half", s.ntd_half[0] * c);
    });
    t.summary["fits"] = fit_columns(t, {"dtn_ratio", "ntd_ratio", "dtn_half", "ntd_half"});
    return t;
}

Table cmd_poles(const PolesArgs& a)
{
    Table t;
    t.command = "poles";
    t.columns = {"n", "k_re", "k_im", "refined", "residual", "error"};
    PoleScan scan;
    try {
        scan = impedance_pole_scan(a.a, a.b, {a.re_min, a.re_max}, {a.im_min, a.im_max}, a.density, a.n_max);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    for (const auto& p : scan.poles) {
        auto& row = t.add_row();
        t.set(row, "n", static_cast<std::int64_t>(p.n));
        t.set(row, "k_re", p.k.real());
        t.set(row, "k_im", p.k.imag());
        t.set(row, "refined", p.refined);
        t.set(row, "residual", p.residual);
        if (!p.refined)
            t.set(row, "error", std::string("newton refinement failed"));
    }
    t.summary["a"] = a.a;
    t.summary["b"] = a.b;
    t.summary["pole_count"] = static_cast<int>(scan.poles.size());
    t.summary["upper_half_count"] = scan.upper_half_count;
    t.summary["strip_width"] = scan.strip_width;
    t.summary["strip_from_window"] = scan.strip_from_window;
    t.summary["origin_degenerate"] = scan.origin_degenerate;
    return t;
}

Table cmd_mie(const MieArgs& a)
{
    if (!(a.k > 0.0) || !(a.radius > 0.0) || !std::isfinite(a.k) || !std::isfinite(a.radius))
        throw ConfigError("k and radius must be positive");
    if (a.angles < 1 || a.angles > 100000)
        throw ConfigError("angles must lie in [1, 100000]");
    if (a.N != 0 && (a.N < 16 || a.N > 16384 || a.N % 2))
        throw ConfigError("N must be 0 or an even integer in [16, 16384]");
    check_refinement(a.refinement);

    Table t;
    t.command = "mie";
    t.columns = {"theta", "far_re", "far_im", "bie_re", "bie_im", "abs_error", "error"};
    MieSolution mie = mie_dirichlet(a.k, a.radius, a.alpha);
    std::optional<BoundaryFunction> dudn;
    std::string solve_error;
    if (a.N > 0) {
        try {
            const BoundaryGrid g = boundary_grid(Curve::circle(a.radius), a.N);
            AssemblyOptions opt;
            opt.refinement = a.refinement;
            opt.hypersingular = false;
            const EtaSpec es = EtaSpec::constant(a.eta_a, a.eta_b);
            const DiscreteOperator A = build_combined_A(assemble_layer_operators(a.k, g, opt), a.k, es);
            dudn = solve_dense(A, BoundaryFunction{plane_wave_rhs(a.k, es, g, a.alpha), g});
            double nerr = 0.0;
            for (int j = 0; j < g.N; ++j)
                nerr = std::max(nerr, std::abs(dudn->values[j] - mie.neumann(g.t[j])));
            t.summary["neumann_max_error"] = nerr;
        } catch (const Error& e) {
            solve_error = e.what();
        }
    }
    double max_err = 0.0, max_ref = 0.0;
    for (int m = 0; m < a.angles; ++m) {
        const double th = 2.0 * kPi * m / a.angles;
        auto& row = t.add_row();
        const cplx ref = mie.far_field(th);
        t.set(row, "theta", th);
        t.set(row, "far_re", ref.real());
        t.set(row, "far_im", ref.imag());
        max_ref = std::max(max_ref, std::abs(ref));
        if (dudn) {
            const cplx v = far_field_from_neumann(*dudn, a.k, th);
            t.set(row, "bie_re", v.real());
            t.set(row, "bie_im", v.imag());
            t.set(row, "abs_error", std::abs(v - ref));
            max_err = std::max(max_err, std::abs(v - ref));
        } else if (!solve_error.empty()) {
            t.set(row, "error", solve_error);
        }
    }
    t.summary["n_max"] = mie.n_max();
    t.summary["tail"] = mie.tail();
    t.summary["truncation_warning"] = mie.truncation_warning();
    if (dudn)
        t.summary["max_relative_error"] = max_err / max_ref;
    return t;
}

namespace {

std::vector<double> parse_numbers(const std::string& s, char sep)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size())
            throw ConfigError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Obstacle parse_obstacle(const std::string& text)
{
    std::string body = text, offset;
    if (const auto at = text.find('@'); at != std::string::npos) {
        body = text.substr(0, at);
        offset = text.substr(at + 1);
    }
    std::string name = body, params;
    if (const auto c = body.find(':'); c != std::string::npos) {
        name = body.substr(0, c);
        params = body.substr(c + 1);
    }
    if (name == "polygon") {
        Polygon p;
        std::stringstream ss(params);
        std::string v;
        while (std::getline(ss, v, ';')) {
            const auto xy = parse_numbers(v, ',');
            if (xy.size() != 2)
                throw ConfigError("polygon vertex needs two coordinates: " + v);
            p.vertices.push_back({xy[0], xy[1]});
        }
        if (!offset.empty())
            throw ConfigError("polygon takes absolute vertices, no offset");
        return p;
    }
    Curve c = checked_curve(name, params.empty() ? std::vector<double>{} : parse_numbers(params, ','));
    if (!offset.empty()) {
        const auto xy = parse_numbers(offset, ',');
        if (xy.size() != 2)
            throw ConfigError("offset needs two coordinates: " + offset);
        c = c.translated({xy[0], xy[1]});
    }
    return c;
}

} // namespace

std::string obstacle_from_json(const nlohmann::json& j)
{
    if (j.is_string())
        return j.get<std::string>();
    if (!j.is_object())
        throw ConfigError("obstacle must be a string or an object");
    auto join = [](const std::vector<double>& v, const char* sep) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            s += (i ? sep : "") + std::string(buf);
        }
        return s;
    };
    if (j.contains("polygon")) {
        std::string s = "polygon:";
        bool first = true;
        for (const auto& v : j.at("polygon")) {
            s += (first ? "" : ";") + join(v.get<std::vector<double>>(), ",");
            first = false;
        }
        return s;
    }
    std::string s = j.at("family").get<std::string>();
    if (j.contains("params"))
        s += ":" + join(j.at("params").get<std::vector<double>>(), ",");
    if (j.contains("offset"))
        s += "@" + join(j.at("offset").get<std::vector<double>>(), ",");
    return s;
}

Table cmd_billiards(const BilliardsArgs& a)
{
    if (a.samples < 1000 || a.samples > 10000000)
        throw ConfigError("samples must lie in [1000, 1e7]");
    if (!(a.budget > 0.0) || !std::isfinite(a.budget))
        throw ConfigError("budget must be positive");
    std::vector<Obstacle> obs;
    for (const auto& s : a.obstacles)
        obs.push_back(parse_obstacle(s));
    std::optional<Scene> scene;
    try {
        scene.emplace(std::move(obs), a.R);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }

    Table t;
    t.command = "billiards";
    t.columns = {"samples", "escaped", "vertex_hits", "unresolved", "fraction_escaped", "max_escape_time",
                 "classification", "error"};
    auto& row = t.add_row();
    try {
        const EscapeStatistics st = escape_statistics(*scene, a.samples, a.budget, a.seed);
        t.set(row, "samples", static_cast<std::int64_t>(st.samples));
        t.set(row, "escaped", static_cast<std::int64_t>(st.escaped));
        t.set(row, "vertex_hits", static_cast<std::int64_t>(st.vertex_hits));
        t.set(row, "unresolved", static_cast<std::int64_t>(st.unresolved));
        t.set(row, "fraction_escaped", st.fraction_escaped);
        if (st.escaped > 0)
            t.set(row, "max_escape_time", st.max_escape_time);
        t.set(row, "classification", st.classification);
    } catch (const Error& e) {
        t.set(row, "error", std::string(e.what()));
    }
    t.summary["R"] = a.R;
    t.summary["budget"] = a.budget;
    t.summary["seed"] = a.seed;
    t.summary["obstacles"] = static_cast<int>(a.obstacles.size());
    return t;
}

Table cmd_gmres_bench(const GmresBenchArgs& a)
{
    const Curve curve = checked_curve(a.geometry, a.params);
    const NRule rule = NRule::parse(a.N);
    if (rule.kind == NRule::Kind::Modes)
        throw ConfigError("gmres-bench needs a matrix N rule");
    check_k(a.k);
    check_refinement(a.refinement);
    if (!(a.tol > 0.0 && a.tol <= 1e-2))
        throw ConfigError("tol must lie in (0, 1e-2]");
    if (a.max_iterations < 1)
        throw ConfigError("max_iterations must be positive");

    Table t;
    t.command = "gmres-bench";
    t.columns = {"k", "sign", "eta_re", "eta_im", "N", "iterations", "converged", "final_residual", "error"};
    const double s = std::abs(a.eta_a);
    for (double k : a.k)
        for (int sign : {1, -1}) {
            auto& row = t.add_row();
            t.set(row, "k", k);
            t.set(row, "sign", std::string(sign > 0 ? "+" : "-"));
            t.set(row, "eta_re", sign * s * k);
            t.set(row, "eta_im", a.eta_b);
            t.set(row, "N", static_cast<std::int64_t>(grid_size(rule, k)));
        }
    const int nk = static_cast<int>(a.k.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < nk; ++i) {
        const double k = a.k[static_cast<std::size_t>(i)];
        auto& rp = t.rows[2 * static_cast<std::size_t>(i)];
        auto& rm = t.rows[2 * static_cast<std::size_t>(i) + 1];
        try {
            const BoundaryGrid g = boundary_grid(curve, grid_size(rule, k));
            AssemblyOptions opt;
            opt.refinement = a.refinement;
            opt.hypersingular = false;
            const LayerOperators L = assemble_layer_operators(k, g, opt);
            for (int sign : {1, -1}) {
                auto& row = sign > 0 ? rp : rm;
                const EtaSpec es = EtaSpec::constant(sign * s, a.eta_b);
                const GmresReport rep =
                    gmres(build_combined_A(L, k, es), plane_wave_rhs(k, es, g, a.alpha), a.tol, a.max_iterations);
                t.set(row, "iterations", static_cast<std::int64_t>(rep.iterations));
                t.set(row, "converged", rep.converged);
                t.set(row, "final_residual", rep.final_relative_residual);
                if (!rep.converged)
                    t.set(row, "error", std::string("not converged"));
            }
        } catch (const std::exception& e) {
            for (auto* row : {&rp, &rm})
                if (std::holds_alternative<std::monostate>((*row)[t.column_index("iterations")]))
                    t.set(*row, "error", std::string(e.what()));
        }
    }
    return t;
}

Table cmd_coercivity(const CoercivityArgs& a)
{
    const Curve curve = checked_curve(a.geometry, a.params);
    const NRule rule = NRule::parse(a.N);
    check_k(a.k);
    check_refinement(a.refinement);
    if (a.theta < 360)
        throw ConfigError("theta must be >= 360");
    const bool modes = use_modes(rule, curve);

    Table t;
    t.command = "coercivity";
    t.columns = {"k", "eta_model", "geometry", "N", "alpha_coercivity", "sigma_min", "norm_A", "error"};
    for (double k : a.k) {
        auto& row = t.add_row();
        t.set(row, "k", k);
        t.set(row, "eta_model", eta_model(a.eta_a, a.eta_b));
        t.set(row, "geometry", curve.name());
    }
    fill_rows(t, [&](int i, std::vector<Cell>& row) {
        const double k = a.k[static_cast<std::size_t>(i)];
        if (modes) {
            const ModeNorms m = mode_norms(k, cplx(a.eta_a * k, a.eta_b), curve.radius());
            t.set(row, "N", static_cast<std::int64_t>(2 * mode_truncation(k) + 1));
            t.set(row, "alpha_coercivity", m.alpha);
            t.set(row, "sigma_min", 1.0 / m.norm_Ainv);
            t.set(row, "norm_A", m.norm_A);
            return;
        }
        const int N = grid_size(rule, k);
        t.set(row, "N", static_cast<std::int64_t>(N));
        const BoundaryGrid g = boundary_grid(curve, N);
        AssemblyOptions opt;
        opt.refinement = a.refinement;
        opt.hypersingular = false;
        const DiscreteOperator A =
            build_combined_A(assemble_layer_operators(k, g, opt), k, EtaSpec::constant(a.eta_a, a.eta_b));
        const RVector sv = weighted_singular_values(A);
        t.set(row, "alpha_coercivity", coercivity_constant(A, a.theta));
        t.set(row, "sigma_min", sv(sv.size() - 1));
        t.set(row, "norm_A", sv(0));
    });
    t.summary["path"] = modes ? "modes" : "matrix";
    return t;
}

} // namespace hbie_cli
