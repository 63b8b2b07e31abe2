#include "commands.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

namespace hbie_cli {

namespace {

// Options of one subcommand that can also come from the JSON config; a flag
// given on the command line wins over the file.
class Bindings {
public:
    explicit Bindings(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* option(const std::string& name, T& var, const std::string& help)
    {
        CLI::Option* opt = app_->add_option("--" + name, var, help)->capture_default_str();
        apply_[name] = [opt, &var](const nlohmann::json& v) {
            if (opt->count() == 0)
                var = v.get<T>();
        };
        return opt;
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& help)
    {
        CLI::Option* opt = app_->add_flag("--" + name, var, help);
        apply_[name] = [opt, &var](const nlohmann::json& v) {
            if (opt->count() == 0)
                var = v.get<bool>();
        };
        return opt;
    }

    void custom(const std::string& key, CLI::Option* opt, std::function<void(const nlohmann::json&)> f)
    {
        apply_[key] = [opt, f = std::move(f)](const nlohmann::json& v) {
            if (opt->count() == 0)
                f(v);
        };
    }

    // A bare "--k" means an empty list.
    void allow_empty(CLI::Option* opt, std::vector<double>& var)
    {
        opt->expected(0, CLI::detail::expected_max_vector_size)->default_str("");
        empty_.push_back([opt, &var] {
            if (opt->count() == 1 && opt->results().front().empty())
                var.clear();
        });
    }

    void finalize() const
    {
        for (const auto& f : empty_)
            f();
    }

    void apply(const nlohmann::json& cfg) const
    {
        if (!cfg.is_object())
            throw ConfigError("config file must hold a JSON object");
        for (const auto& [key, value] : cfg.items()) {
            std::string name = key;
            for (char& c : name)
                if (c == '_')
                    c = '-';
            if (name == "command")
                continue;
            const auto it = apply_.find(name);
            if (it == apply_.end())
                throw ConfigError("unknown config key: " + key);
            try {
                it->second(value);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError("config key " + key + ": " + e.what());
            }
        }
    }

private:
    CLI::App* app_;
    std::map<std::string, std::function<void(const nlohmann::json&)>> apply_;
    std::vector<std::function<void()>> empty_;
};

struct Common {
    std::string config, format = "csv", out;
};

struct Sub {
    CLI::App* app;
    std::unique_ptr<Bindings> bind;
    std::function<Table()> run;
};

Sub make_sub(CLI::App& root, const std::string& name, const std::string& help, Common& common)
{
    Sub s{root.add_subcommand(name, help), nullptr, {}};
    s.bind = std::make_unique<Bindings>(s.app);
    s.app->add_option("--config", common.config, "JSON file with option values; flags override it");
    s.bind->option("format", common.format, "csv or json");
    s.bind->option("out", common.out, "output file (default stdout)");
    return s;
}

CLI::Option* k_list(Bindings& b, std::vector<double>& k)
{
    std::string help = "wavenumbers; a bare --k gives an empty list (default";
    for (double v : k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %g", v);
        help += buf;
    }
    CLI::Option* opt = b.option("k", k, help + ")");
    b.allow_empty(opt, k);
    return opt;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Helmholtz boundary integral experiments"};
    app.require_subcommand(1);
    Common common;
    std::vector<Sub> subs;

    SweepArgs sweep;
    {
        Sub s = make_sub(app, "sweep", "condition and norm sweep over k", common);
        Bindings& b = *s.bind;
        b.option("geometry", sweep.geometry, "circle, ellipse, kite, smooth_star");
        b.option("params", sweep.params, "curve parameters");
        k_list(b, sweep.k);
        b.option("eta-a", sweep.eta_a, "eta = a k + i b");
        b.option("eta-b", sweep.eta_b, "eta = a k + i b");
        b.option("N", sweep.N, "auto, modes, matrix or an even node count");
        b.option("refinement", sweep.refinement, "quadrature refinement factor");
        b.flag("gmres", sweep.gmres, "GMRES iterations for eta = +|a| k + i b and -|a| k + i b");
        b.flag("coercivity", sweep.coercivity, "numerical-range coercivity constant");
        b.flag("residuals", sweep.residuals, "inverse decomposition residuals");
        b.flag("maps", sweep.maps, "DtN (H1_k -> L2) and NtD (L2 -> H1_k, times k^-1/3) norms on the matrix path");
        b.option("tol", sweep.tol, "GMRES relative tolerance");
        b.option("alpha", sweep.alpha, "plane wave angle for the GMRES right-hand side");
        b.option("theta", sweep.theta, "angles for the coercivity scan");
        s.run = [&] { return cmd_sweep(sweep); };
        subs.push_back(std::move(s));
    }
    SharpnessArgs sharp;
    {
        Sub s = make_sub(app, "sharpness", "DtN and NtD ratios on the circle", common);
        Bindings& b = *s.bind;
        k_list(b, sharp.k);
        b.option("radius", sharp.radius, "circle radius");
        b.option("truncation-factor", sharp.truncation_factor, "mode count multiplier");
        s.run = [&] { return cmd_sharpness(sharp); };
        subs.push_back(std::move(s));
    }
    PolesArgs poles;
    {
        Sub s = make_sub(app, "poles", "zeros of the disk impedance problem in complex k", common);
        Bindings& b = *s.bind;
        b.option("a", poles.a, "eta = a k + i b");
        b.option("b", poles.b, "eta = a k + i b");
        b.option("re-min", poles.re_min, "window");
        b.option("re-max", poles.re_max, "window");
        b.option("im-min", poles.im_min, "window");
        b.option("im-max", poles.im_max, "window");
        b.option("density", poles.density, "grid points per unit length");
        b.option("n-max", poles.n_max, "largest |n|");
        s.run = [&] { return cmd_poles(poles); };
        subs.push_back(std::move(s));
    }
    MieArgs mie;
    {
        Sub s = make_sub(app, "mie", "far field of a sound-soft circle", common);
        Bindings& b = *s.bind;
        b.option("k", mie.k, "wavenumber");
        b.option("radius", mie.radius, "circle radius");
        b.option("alpha", mie.alpha, "incidence angle");
        b.option("angles", mie.angles, "equispaced observation angles");
        b.option("N", mie.N, "node count of a CFIE solve to compare (0: none)");
        b.option("eta-a", mie.eta_a, "CFIE coupling eta = a k + i b");
        b.option("eta-b", mie.eta_b, "CFIE coupling eta = a k + i b");
        b.option("refinement", mie.refinement, "quadrature refinement factor");
        s.run = [&] { return cmd_mie(mie); };
        subs.push_back(std::move(s));
    }
    BilliardsArgs bill;
    {
        Sub s = make_sub(app, "billiards", "empirical trapping test", common);
        Bindings& b = *s.bind;
        CLI::Option* o = s.app->add_option("--obstacle", bill.obstacles,
                                           "family[:params][@x,y] or polygon:x,y;x,y;...; repeatable");
        b.custom("obstacles", o, [&](const nlohmann::json& v) {
            bill.obstacles.clear();
            for (const auto& e : v)
                bill.obstacles.push_back(obstacle_from_json(e));
        });
        b.option("R", bill.R, "radius of the enclosing ball");
        b.option("budget", bill.budget, "time budget per ray");
        b.option("samples", bill.samples, "number of rays");
        b.option("seed", bill.seed, "random seed");
        s.run = [&] { return cmd_billiards(bill); };
        subs.push_back(std::move(s));
    }
    GmresBenchArgs gb;
    {
        Sub s = make_sub(app, "gmres-bench", "GMRES iterations for both signs of eta", common);
        Bindings& b = *s.bind;
        b.option("geometry", gb.geometry, "curve family");
        b.option("params", gb.params, "curve parameters");
        k_list(b, gb.k);
        b.option("N", gb.N, "matrix or an even node count");
        b.option("eta-a", gb.eta_a, "|a| in eta = +-|a| k + i b");
        b.option("eta-b", gb.eta_b, "b in eta");
        b.option("tol", gb.tol, "relative tolerance");
        b.option("max-iterations", gb.max_iterations, "iteration cap");
        b.option("alpha", gb.alpha, "plane wave angle");
        b.option("refinement", gb.refinement, "quadrature refinement factor");
        s.run = [&] { return cmd_gmres_bench(gb); };
        subs.push_back(std::move(s));
    }
    CoercivityArgs co;
    {
        Sub s = make_sub(app, "coercivity", "coercivity constant of A'", common);
        Bindings& b = *s.bind;
        b.option("geometry", co.geometry, "curve family");
        b.option("params", co.params, "curve parameters");
        k_list(b, co.k);
        b.option("N", co.N, "auto, modes, matrix or an even node count");
        b.option("eta-a", co.eta_a, "eta = a k + i b");
        b.option("eta-b", co.eta_b, "eta = a k + i b");
        b.option("theta", co.theta, "angles (matrix path)");
        b.option("refinement", co.refinement, "quadrature refinement factor");
        s.run = [&] { return cmd_coercivity(co); };
        subs.push_back(std::move(s));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Table table;
    try {
        const Sub* active = nullptr;
        for (const auto& s : subs)
            if (s.app->parsed())
                active = &s;
        active->bind->finalize();
        if (!common.config.empty()) {
            std::ifstream in(common.config);
            if (!in)
                throw ConfigError("cannot read config file " + common.config);
            nlohmann::json cfg;
            try {
                cfg = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("config file: ") + e.what());
            }
            active->bind->apply(cfg);
        }
        if (common.format != "csv" && common.format != "json")
            throw ConfigError("format must be csv or json");
        table = active->run();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }

    std::ofstream file;
    if (!common.out.empty()) {
        file.open(common.out);
        if (!file) {
            err << "error: cannot write " << common.out << '\n';
            return 2;
        }
    }
    std::ostream& os = common.out.empty() ? out : file;
    if (common.format == "json")
        write_json(os, table);
    else
        write_csv(os, table);
    return all_rows_failed(table) ? 3 : 0;
}

} // namespace hbie_cli
