#include "kvol_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace kvol;
using io::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kUnsupported = 3, kVerifyFailed = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int n = 8;
    double L = 0;
    bool L_abs = false;
    std::string out;
};

void check_n(int n) {
    if (n < 8 || n % 2) throw ConfigError("n must be even ≥ 8");
}

// --L counts multiples of the shortest horizontal saddle connection of the
// surface at hand (l_m on S_n, the side on X_n) unless --L-abs
double length_bound(const Common& c, const TranslationSurface& s) {
    if (!(c.L > 0)) throw ConfigError("L must be positive");
    return c.L_abs ? c.L : c.L * s.shortest_horizontal().to_double();
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw ConfigError("cannot write " + c.out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

mpq_class rational_of(double v) {
    if (!std::isfinite(v)) throw ConfigError("coordinate must be finite");
    mpq_class q(static_cast<long>(std::llround(v * 1e6)), 1000000);
    q.canonicalize();
    return q;
}

// exact surface matrix with point x + i s^2
Mat2 upper(int n, const mpq_class& x, const mpq_class& s) {
    return {CycloReal::rational(n, 1 / s), CycloReal::rational(n, x / s), CycloReal::zero(n), CycloReal::rational(n, s)};
}

TranslationSurface surface_of(int n, const std::string& model, bool torus) {
    if (torus) return build_ngon(4);
    check_n(n);
    if (model == "staircase") return build_staircase(n);
    if (model == "ngon") return build_ngon(n);
    throw ConfigError("model must be ngon or staircase");
}

void add_common(CLI::App* app, Common& c, bool with_L, double L_default) {
    app->add_option("--n", c.n, "polygon size, even and at least 8")->capture_default_str();
    if (with_L) {
        c.L = L_default;
        app->add_option("--L", c.L, "length bound in units of the shortest horizontal connection")
            ->capture_default_str();
        app->add_flag("--L-abs", c.L_abs, "read --L as an absolute length");
    }
    app->add_option("--out", c.out, "output file (default stdout)");
}

// surface

struct SurfaceCmd {
    Common c;
    std::string model = "staircase";
    bool torus = false;

    int run() const {
        emit(c, dump(io::to_json(surface_of(c.n, model, torus))));
        return kOk;
    }
};

// saddles

struct SaddlesCmd {
    Common c;
    std::string model = "staircase";
    bool torus = false;

    int run() const {
        TranslationSurface s = surface_of(c.n, model, torus);
        std::ostringstream os;
        for (const SaddleConnection& sc : enumerate_saddle_connections(s, length_bound(c, s)))
            os << io::to_json(s, sc).dump() << "\n";
        emit(c, os.str());
        return kOk;
    }
};

// kvol-point

struct PointCmd {
    Common c;
    double x = 0, y = 1;
    bool at_ngon = false, bruteforce = false;
    int K_max = 12, W = 10;

    int run() const {
        check_n(c.n);
        if (!at_ngon && !(y > 0)) throw ConfigError("y must be positive");
        const TranslationSurface s = build_staircase(c.n);
        Mat2 M;
        HPoint z;
        if (at_ngon) {
            M = conversion_matrix(c.n).inverse();
            z = point_of_surface(M);
        } else {
            mpq_class qx = rational_of(x), qs = rational_of(std::sqrt(y));
            M = upper(c.n, qx, qs);
            z = {x, y};
        }
        KvolReport cf = kvol_closed_formula(c.n, z, K_max, W);
        json j = io::to_json(cf);
        int code = kOk;
        if (bruteforce) {
            KvolReport bf = kvol_bruteforce(M, c.n, length_bound(c, s));
            json b = io::to_json(bf);
            const double gap = (cf.value - bf.value) / cf.value;
            b["relative_gap"] = gap;
            b["below_formula"] = bf.value <= cf.value + 1e-9;
            if (!(bf.value <= cf.value + 1e-9)) code = kVerifyFailed;
            j["bruteforce"] = b;
        }
        emit(c, dump(j));
        return code;
    }
};

// kvol-bound

struct BoundCmd {
    Common c;
    double x = 0, y = 1;

    int run() const {
        check_n(c.n);
        if (c.n % 4 != 2) throw ConfigError("kvol-bound covers n ≡ 2 mod 4; use kvol-point");
        if (!(y > 0)) throw ConfigError("y must be positive");
        const TranslationSurface s = build_staircase(c.n);
        const Mat2 M = upper(c.n, rational_of(x), rational_of(std::sqrt(y)));
        BoundReport r = bound_4m2(c.n, M, length_bound(c, s));
        const CycloReal vol = s.area();
        json j = {{"n", c.n},
                  {"point", {x, y}},
                  {"ratio", r.ratio},
                  {"bound", io::to_json(r.bound)},
                  {"kvol_lower", vol.to_double() * r.ratio},
                  {"kvol_upper", io::to_json(vol * r.bound)},
                  {"curves", r.curves},
                  {"pairs", r.pairs},
                  {"violations", r.violations},
                  {"undecided", r.undecided},
                  {"params", {{"L", length_bound(c, s)}}},
                  {"pass", r.pass}};
        if (r.ratio_sq) j["ratio_sq"] = io::to_json(*r.ratio_sq);
        emit(c, dump(j));
        return r.pass ? kOk : kVerifyFailed;
    }
};

// kvol-grid

struct GridCmd {
    Common c;
    GridSpec g;
    double x_max = std::nan(""), y_max = 2;

    int run() {
        check_n(c.n);
        if (!std::isnan(x_max)) g.x_max = x_max;
        g.y_max = y_max;
        if (g.resolution < 1 || g.resolution > 2000) throw ConfigError("resolution must lie in [1, 2000]");
        std::vector<GridCell> cells = kvol_grid(c.n, g);
        std::ostringstream os;
        os.precision(17);
        os << "x,y,kvol,dist,converged\n";
        for (const GridCell& cell : cells)
            os << cell.x << "," << cell.y << "," << cell.value << "," << cell.distance << ","
               << (cell.converged ? 1 : 0) << "\n";
        emit(c, os.str());
        return kOk;
    }
};

// verify

struct VerifyCmd {
    Common c;
    std::string suite;
    int samples = 20;
    unsigned seed = 7;
    bool L_given = false;

    double L_or(const TranslationSurface& s, double dflt) const {
        Common d = c;
        if (!L_given) {
            d.L = dflt;
            d.L_abs = false;
        }
        return length_bound(d, s);
    }

    json ngon_bound() const {
        const double L = L_or(build_ngon(c.n), 3);
        NgonBoundReport r = verify_ngon_bound(c.n, L);
        return {{"L", L},
                {"curves", r.curves},
                {"pairs", r.pairs},
                {"violations", r.violations},
                {"undecided", r.undecided},
                {"equalities", r.equalities.size()},
                {"side_pairs", r.side_pairs},
                {"equalities_are_side_pairs", r.equalities_are_side_pairs},
                {"pass", r.pass}};
    }

    json parallel() const {
        const TranslationSurface s = build_staircase(c.n);
        json dirs = json::array();
        bool pass = true;
        for (const CoSlope& d : {CoSlope::inf(), CoSlope::of(CycloReal::zero(c.n))}) {
            ParallelReport r = check_parallel_criterion(s, d);
            pass = pass && r.pass;
            dirs.push_back({{"direction", d.to_string()},
                            {"connections", r.connections},
                            {"curves", r.curves},
                            {"pairs", r.pairs},
                            {"nonzero", r.nonzero},
                            {"pass", r.pass}});
        }
        return {{"directions", dirs}, {"pass", pass}};
    }

    json formula() const {
        kvol_K0(c.n);
        if (samples < 1) throw ConfigError("samples must be positive");
        const TranslationSurface s = build_staircase(c.n);
        const double L = L_or(s, 30);
        const double phi = CycloReal::phi(c.n).to_double();
        FundDomain dom(c.n);
        std::mt19937 rng(seed);
        const int xr = static_cast<int>(std::floor(phi / 2 * 1000));
        std::uniform_int_distribution<int> ux(-xr, xr), us(150, 1500);
        json pts = json::array();
        bool pass = true;
        double worst = 0;
        for (int done = 0; done < samples;) {
            mpq_class x(ux(rng), 1000), sq(us(rng), 1000);
            x.canonicalize();
            sq.canonicalize();
            HPoint z{x.get_d(), mpq_class(sq * sq).get_d()};
            if (!dom.contains(z, 0)) continue;
            ++done;
            KvolReport cf = kvol_closed_formula(c.n, z);
            KvolReport bf = kvol_bruteforce(upper(c.n, x, sq), c.n, L);
            const double gap = (cf.value - bf.value) / cf.value;
            const bool ok = cf.converged && bf.value <= cf.value + 1e-9 && gap <= 0.02;
            pass = pass && ok;
            worst = std::max(worst, gap);
            pts.push_back({{"x", x.get_str()},
                           {"s", sq.get_str()},
                           {"formula", cf.value},
                           {"bruteforce", bf.value},
                           {"relative_gap", gap},
                           {"converged", cf.converged},
                           {"pass", ok}});
        }
        return {{"L", L}, {"seed", seed}, {"points", pts}, {"max_relative_gap", worst}, {"pass", pass}};
    }

    json directions() const {
        kvol_K0(c.n);
        const TranslationSurface s = build_staircase(c.n);
        const double L = L_or(s, 8);
        const auto conns = enumerate_saddle_connections(s, L);
        const IntersectionForm form = intersection_form(s);
        const CycloReal lm = staircase_lengths(c.n).l_m, phi = CycloReal::phi(c.n);
        const CycloReal top = (phi * lm * lm).inverse();
        const CycloReal cc = phi.pow(3) - CycloReal::integer(c.n, 2) * phi;
        const CycloReal second = (cc * lm * lm).inverse();
        std::vector<std::pair<CoSlope, CycloReal>> cases;
        cases.push_back({CoSlope::of(CycloReal::zero(c.n)), top});
        for (long k : {1, 2, 3}) cases.push_back({CoSlope::of((CycloReal::integer(c.n, k) * phi).inverse()), top});
        cases.push_back({CoSlope::of((phi * phi - CycloReal::one(c.n)) * cc.inverse()), second});
        json rows = json::array();
        bool pass = true;
        for (const auto& [d, want] : cases) {
            DirectionK k = K_of_directions(s, form, conns, CoSlope::inf(), d);
            const bool ok = k.value == want;
            pass = pass && ok;
            rows.push_back({{"pair", {"inf", d.to_string()}},
                            {"K", io::to_json(k.value)},
                            {"expected", io::to_json(want)},
                            {"pass", ok}});
        }
        return {{"L", L}, {"pairs", rows}, {"pass", pass}};
    }

    json bound() const {
        check_n(c.n);
        if (c.n % 4 != 2) throw ConfigError("suite bound needs n ≡ 2 mod 4");
        const TranslationSurface s = build_staircase(c.n);
        const double L = L_or(s, 5);
        json rows = json::array();
        bool pass = true;
        const VeechGenerators g = veech_generators(c.n);
        for (const auto& [name, M] : {std::pair<std::string, Mat2>{"identity", Mat2::identity(c.n)}, {"T_V", g.T_V}}) {
            BoundReport r = bound_4m2(c.n, M, L);
            pass = pass && r.pass;
            rows.push_back({{"matrix", name},
                            {"ratio", r.ratio},
                            {"bound", io::to_json(r.bound)},
                            {"violations", r.violations},
                            {"undecided", r.undecided},
                            {"pass", r.pass}});
        }
        return {{"L", L}, {"surfaces", rows}, {"pass", pass}};
    }

    json conjecture() const {
        check_n(c.n);
        if (c.n % 4 != 2) throw ConfigError("suite conjecture needs n ≡ 2 mod 4");
        const double L = L_or(build_ngon(c.n), 3);
        ConjectureReport r = explore_conjecture(c.n, L);
        json j = {{"L", L},
                  {"best_ratio", r.best_ratio},
                  {"equals_half", r.equals_half},
                  {"strictly_below_one", r.strictly_below_one},
                  {"double_pair_found", r.double_pair_found},
                  {"double_pair_is_best", r.double_pair_is_best},
                  {"curves", r.curves},
                  {"pairs", r.pairs},
                  {"pass", r.strictly_below_one && r.double_pair_found}};
        if (r.best_ratio_sq) j["best_ratio_sq"] = io::to_json(*r.best_ratio_sq);
        return j;
    }

    int run() const {
        check_n(c.n);
        json r;
        if (suite == "thm12")
            r = ngon_bound();
        else if (suite == "parallel")
            r = parallel();
        else if (suite == "formula")
            r = formula();
        else if (suite == "directions")
            r = directions();
        else if (suite == "bound")
            r = bound();
        else if (suite == "conjecture")
            r = conjecture();
        else
            throw ConfigError("unknown suite " + suite);
        json out = {{"suite", suite}, {"n", c.n}};
        out.update(r);
        emit(c, dump(out));
        return out["pass"].get<bool>() ? kOk : kVerifyFailed;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Algebraic intersection strength on the Teichmueller disks of regular n-gons"};
    app.require_subcommand(1);

    SurfaceCmd surface;
    auto* s = app.add_subcommand("surface", "dump a surface as JSON");
    add_common(s, surface.c, false, 0);
    s->add_option("--model", surface.model, "ngon or staircase")->capture_default_str();
    s->add_flag("--torus", surface.torus, "square torus fixture, ignores --n");

    SaddlesCmd saddles;
    auto* sd = app.add_subcommand("saddles", "saddle connections up to length L as JSON lines");
    add_common(sd, saddles.c, true, 3);
    sd->add_option("--model", saddles.model, "ngon or staircase")->capture_default_str();
    sd->add_flag("--torus", saddles.torus, "square torus fixture, ignores --n");

    PointCmd point;
    auto* p = app.add_subcommand("kvol-point", "closed formula at a point of the upper half plane");
    add_common(p, point.c, true, 30);
    p->add_option("--x", point.x)->capture_default_str();
    p->add_option("--y", point.y)->capture_default_str();
    p->add_flag("--at-ngon", point.at_ngon, "use the point of the regular n-gon");
    p->add_flag("--bruteforce", point.bruteforce, "cross-check by enumeration up to L");
    p->add_option("--K-max", point.K_max)->capture_default_str();
    p->add_option("--W", point.W)->capture_default_str();

    BoundCmd bound;
    auto* b = app.add_subcommand("kvol-bound", "enumerated ratio against the upper bound, n = 2 mod 4");
    add_common(b, bound.c, true, 5);
    b->add_option("--x", bound.x)->capture_default_str();
    b->add_option("--y", bound.y)->capture_default_str();

    GridCmd grid;
    auto* g = app.add_subcommand("kvol-grid", "closed formula on a grid over T_n as CSV");
    add_common(g, grid.c, false, 0);
    g->add_option("--x-min", grid.g.x_min)->capture_default_str();
    g->add_option("--x-max", grid.x_max, "default Phi/2");
    g->add_option("--y-min", grid.g.y_min)->capture_default_str();
    g->add_option("--y-max", grid.y_max)->capture_default_str();
    g->add_option("--resolution", grid.g.resolution)->capture_default_str();
    g->add_option("--K-max", grid.g.K_max)->capture_default_str();
    g->add_option("--W", grid.g.W)->capture_default_str();
    g->add_option("--threads", grid.g.threads, "0 for all cores")->capture_default_str();

    VerifyCmd verify;
    auto* v = app.add_subcommand("verify", "run a verification suite");
    add_common(v, verify.c, true, 0);
    v->add_option("--suite", verify.suite, "thm12, parallel, formula, directions, bound, conjecture")->required();
    v->add_option("--samples", verify.samples)->capture_default_str();
    v->add_option("--seed", verify.seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    verify.L_given = v->count("--L") > 0;

    try {
        if (*s) return surface.run();
        if (*sd) return saddles.run();
        if (*p) return point.run();
        if (*b) return bound.run();
        if (*g) return grid.run();
        if (*v) return verify.run();
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfig;
    } catch (const UnsupportedCase& e) {
        std::cerr << e.what() << "\n";
        return kUnsupported;
    } catch (const EnumerationCapExceeded& e) {
        std::cerr << e.what() << "; lower L\n";
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kOk;
}
