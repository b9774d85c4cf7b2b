#include "kvol/kvol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <tuple>

namespace kvol {

namespace {

void check_n(int n) {
    if (n < 8 || n % 2) throw std::invalid_argument("n must be even ≥ 8");
}

CycloReal absval(const CycloReal& x) { return x.sign() < 0 ? -x : x; }

CycloReal sq(const CycloReal& x) { return x * x; }

std::vector<std::pair<ClosedCurve, ClosedCurve>> witness_curves(const CurveSet& cs, const RatioMax& rm,
                                                                std::vector<long>* ints = nullptr) {
    std::vector<std::pair<ClosedCurve, ClosedCurve>> out;
    for (const RatioPair& p : rm.maximizers) {
        out.push_back({cs.curves[p.i], cs.curves[p.j]});
        if (ints) ints->push_back(p.intersection);
    }
    return out;
}

}  // namespace

bool coslope_less(const CoSlope& a, const CoSlope& b) {
    if (a.infinite || b.infinite) return !a.infinite && b.infinite;
    return a.value < b.value;
}

DirectionPair DirectionPair::of(const CoSlope& a, const CoSlope& b) {
    if (a == b) throw std::invalid_argument("direction pair needs distinct directions");
    return coslope_less(a, b) ? DirectionPair{a, b} : DirectionPair{b, a};
}

std::string mode_name(KvolMode m) { return m == KvolMode::Bruteforce ? "bruteforce" : "closed_formula"; }

CurveSet closed_curves(const TranslationSurface& s, const std::vector<SaddleConnection>& conns, double L,
                       const CurveSearch& opt) {
    if (opt.max_components < 1) throw std::invalid_argument("closed_curves: max_components >= 1");
    const std::size_t N = conns.size();
    const double limit = L * (1 + 1e-12);
    std::vector<SaddleConnection> rev(N);
    std::vector<std::vector<long>> chain_f(N), chain_b(N);
    std::vector<int> sqrt_state(N, 0);  // 0 unknown, 1 in field, -1 not
    std::vector<CycloReal> roots(N);
    for (std::size_t i = 0; i < N; ++i) {
        rev[i] = conns[i].reversed(s);
        chain_f[i] = edge_chain(s, conns[i]);
        chain_b[i] = edge_chain(s, rev[i]);
    }
    auto root = [&](std::size_t i) -> const CycloReal* {
        if (!sqrt_state[i]) {
            auto r = conns[i].length_sq.sqrt();
            sqrt_state[i] = r ? 1 : -1;
            if (r) roots[i] = *r;
        }
        return sqrt_state[i] > 0 ? &roots[i] : nullptr;
    };

    CurveSet out;
    struct Step {
        std::size_t idx;
        bool fwd;
    };
    std::vector<Step> walk;
    std::vector<char> used(N, 0);
    std::vector<int> visits(static_cast<std::size_t>(s.num_classes()), 0);
    auto oriented = [&](const Step& st) -> const SaddleConnection& { return st.fwd ? conns[st.idx] : rev[st.idx]; };

    auto emit = [&]() {
        ClosedCurve c;
        std::vector<long> ch(static_cast<std::size_t>(s.num_edge_pairs()), 0);
        Vec2 h{CycloReal::zero(s.n()), CycloReal::zero(s.n())};
        double len = 0;
        for (const Step& st : walk) {
            const SaddleConnection& sc = oriented(st);
            c.components.push_back(sc);
            const auto& add = st.fwd ? chain_f[st.idx] : chain_b[st.idx];
            for (std::size_t k = 0; k < ch.size(); ++k) ch[k] += add[k];
            h = h + sc.holonomy;
            len += sc.length;
        }
        std::optional<CycloReal> lsq;
        if (walk.size() == 1) {
            lsq = conns[walk[0].idx].length_sq;
        } else {
            CycloReal t = CycloReal::zero(s.n());
            bool ok = true;
            for (const Step& st : walk) {
                const CycloReal* r = root(st.idx);
                if (!r) {
                    ok = false;
                    break;
                }
                t += *r;
            }
            if (ok) lsq = t * t;
        }
        out.curves.push_back(std::move(c));
        out.chains.push_back(std::move(ch));
        out.holonomy.push_back(h);
        out.length.push_back(len);
        out.length_sq.push_back(std::move(lsq));
    };

    // the smallest index leads, traversed forwards; this fixes rotation and orientation
    std::function<void(std::size_t, int, int, double)> extend = [&](std::size_t first, int start, int at,
                                                                    double len) {
        if (static_cast<int>(walk.size()) >= opt.max_components) return;
        for (std::size_t j = first + 1; j < N; ++j) {
            if (len + conns[j].length > limit) break;  // sorted by length
            if (used[j]) continue;
            for (bool fwd : {true, false}) {
                const SaddleConnection& c = fwd ? conns[j] : rev[j];
                if (c.start_class != at) continue;
                if (conns[j].closed() && !fwd && !opt.allow_revisits) continue;
                const int e = c.end_class;
                if (e != start && visits[static_cast<std::size_t>(e)] && !opt.allow_revisits) continue;
                walk.push_back({j, fwd});
                used[j] = 1;
                ++visits[static_cast<std::size_t>(e)];
                if (e == start) emit();
                if (e != start || opt.allow_revisits) extend(first, start, e, len + c.length);
                --visits[static_cast<std::size_t>(e)];
                used[j] = 0;
                walk.pop_back();
            }
        }
    };

    for (std::size_t i = 0; i < N; ++i) {
        if (conns[i].length > limit) break;
        const int start = conns[i].start_class, end = conns[i].end_class;
        walk.push_back({i, true});
        used[i] = 1;
        ++visits[static_cast<std::size_t>(start)];
        if (start == end) {
            emit();
            if (opt.allow_revisits) extend(i, start, end, conns[i].length);
        } else {
            ++visits[static_cast<std::size_t>(end)];
            extend(i, start, end, conns[i].length);
            --visits[static_cast<std::size_t>(end)];
        }
        --visits[static_cast<std::size_t>(start)];
        used[i] = 0;
        walk.pop_back();
    }
    return out;
}

namespace {

std::vector<std::vector<long>> apply_form(const CurveSet& cs, const IntersectionForm& form) {
    std::vector<std::vector<long>> wc;
    wc.reserve(cs.chains.size());
    for (const auto& c : cs.chains) {
        std::vector<long> v(c.size(), 0);
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = 0; b < c.size(); ++b) v[a] += form.W[a][b] * c[b];
        wc.push_back(std::move(v));
    }
    return wc;
}

long dotl(const std::vector<long>& a, const std::vector<long>& b) {
    long t = 0;
    for (std::size_t k = 0; k < a.size(); ++k) t += a[k] * b[k];
    return t;
}

std::optional<CycloReal> ratio_sq_of(const CurveSet& cs, const RatioPair& p) {
    const auto& a = cs.length_sq[p.i];
    const auto& b = cs.length_sq[p.j];
    if (!a || !b) return std::nullopt;
    const int n = a->n();
    return CycloReal::integer(n, p.intersection * p.intersection) * (*a * *b).inverse();
}

}  // namespace

RatioMax max_ratio(const CurveSet& cs, const IntersectionForm& form) {
    const std::size_t N = cs.curves.size();
    const auto wc = apply_form(cs, form);
    const double keep = 1 - 1e-9;
    struct Local {
        double best = 0;
        std::vector<RatioPair> cand;
    };
    unsigned T = std::max(1u, std::thread::hardware_concurrency());
    T = static_cast<unsigned>(std::min<std::size_t>(T, std::max<std::size_t>(1, N / 64)));
    std::vector<Local> locals(T);
    auto work = [&](unsigned t) {
        Local& L = locals[t];
        for (std::size_t i = t; i < N; i += T)
            for (std::size_t j = i + 1; j < N; ++j) {
                long I = dotl(cs.chains[i], wc[j]);
                if (!I) continue;
                double r = std::fabs(static_cast<double>(I)) / (cs.length[i] * cs.length[j]);
                if (r < L.best * keep) continue;
                if (r > L.best) {
                    L.best = r;
                    std::erase_if(L.cand, [&](const RatioPair& p) {
                        return std::fabs(static_cast<double>(p.intersection)) / (cs.length[p.i] * cs.length[p.j]) <
                               r * keep;
                    });
                }
                L.cand.push_back({i, j, I});
            }
    };
    if (T == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < T; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    RatioMax out;
    out.pairs = N < 2 ? 0 : N * (N - 1) / 2;
    double best = 0;
    for (const Local& L : locals) best = std::max(best, L.best);
    if (best == 0) return out;
    std::vector<RatioPair> cand;
    for (const Local& L : locals)
        for (const RatioPair& p : L.cand)
            if (std::fabs(static_cast<double>(p.intersection)) / (cs.length[p.i] * cs.length[p.j]) >= best * keep)
                cand.push_back(p);
    std::sort(cand.begin(), cand.end(),
              [](const RatioPair& a, const RatioPair& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    // exact decision among the float candidates
    std::vector<std::optional<CycloReal>> ex;
    bool all_exact = true;
    for (const RatioPair& p : cand) {
        ex.push_back(ratio_sq_of(cs, p));
        all_exact = all_exact && ex.back().has_value();
    }
    if (all_exact) {
        std::optional<CycloReal> top;
        for (const auto& e : ex)
            if (!top || *e > *top) top = *e;
        for (std::size_t k = 0; k < cand.size(); ++k)
            if (*ex[k] == *top) out.maximizers.push_back(cand[k]);
        out.ratio_sq = top;
        out.ratio = std::sqrt(top->to_double());
    } else {
        for (const RatioPair& p : cand) {
            double r = std::fabs(static_cast<double>(p.intersection)) / (cs.length[p.i] * cs.length[p.j]);
            if (r >= best * (1 - 1e-12)) out.maximizers.push_back(p);
        }
        out.ratio = best;
    }
    return out;
}

std::optional<int> compare_ratio_sq(const CurveSet& cs, std::size_t i, std::size_t j, long intersection,
                                    const CycloReal& bound_sq) {
    const double r2 = static_cast<double>(intersection) * static_cast<double>(intersection) /
                      (cs.length[i] * cs.length[i] * cs.length[j] * cs.length[j]);
    const double b = bound_sq.to_double();
    const double gap = (r2 - b) / std::max(std::fabs(b), 1e-300);
    if (std::fabs(gap) > 1e-9) return gap > 0 ? 1 : -1;
    if (cs.length_sq[i] && cs.length_sq[j]) {
        const int n = bound_sq.n();
        CycloReal lhs = CycloReal::integer(n, intersection * intersection);
        CycloReal rhs = bound_sq * *cs.length_sq[i] * *cs.length_sq[j];
        return compare(lhs, rhs);
    }
    if (std::fabs(gap) > 1e-12) return gap > 0 ? 1 : -1;
    return std::nullopt;
}

DirectionK K_of_directions(const TranslationSurface& s, const IntersectionForm& form,
                           const std::vector<SaddleConnection>& conns, const CoSlope& d, const CoSlope& e,
                           const CurveSearch& opt) {
    if (d == e) throw std::invalid_argument("K_of_directions: directions must differ");
    const double inf = std::numeric_limits<double>::infinity();
    auto fd = filter_direction(conns, d), fe = filter_direction(conns, e);
    if (fd.empty()) throw std::runtime_error("no saddle connection found in direction " + d.to_string());
    if (fe.empty()) throw std::runtime_error("no saddle connection found in direction " + e.to_string());
    CurveSet A = closed_curves(s, fd, inf, opt), B = closed_curves(s, fe, inf, opt);
    if (A.curves.empty() || B.curves.empty()) throw std::runtime_error("no closed curve in one of the directions");
    std::optional<DirectionK> best;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < A.curves.size(); ++i)
        for (std::size_t j = 0; j < B.curves.size(); ++j) {
            CycloReal w = wedge(A.holonomy[i], B.holonomy[j]);
            if (w.is_zero()) continue;
            ++pairs;
            long I = form.evaluate(A.chains[i], B.chains[j]);
            CycloReal v = CycloReal::integer(s.n(), std::labs(I)) * absval(w).inverse();
            if (!best || v > best->value) best = DirectionK{v, A.curves[i], B.curves[j], I, w, 0};
        }
    if (!best) throw std::runtime_error("no transverse curve pair in the two directions");
    best->pairs = pairs;
    return *best;
}

DirectionK K_of_directions(const TranslationSurface& s, const CoSlope& d, const CoSlope& e, double L,
                           const CurveSearch& opt) {
    auto conns = enumerate_saddle_connections(s, L);
    return K_of_directions(s, intersection_form(s), conns, d, e, opt);
}

KvolReport kvol_bruteforce(const Mat2& M, int n, double L, const CurveSearch& opt) {
    check_n(n);
    TranslationSurface s = build_staircase(n).transformed(M);
    auto conns = enumerate_saddle_connections(s, L);
    CurveSet cs = closed_curves(s, conns, L, opt);
    RatioMax rm = max_ratio(cs, intersection_form(s));
    KvolReport r;
    r.mode = KvolMode::Bruteforce;
    r.n = n;
    r.L = L;
    r.volume = s.area();
    r.curves = cs.curves.size();
    r.pairs = rm.pairs;
    r.exact_ratio_sq = rm.ratio_sq;
    if (rm.ratio_sq) {
        r.exact_ratio = rm.ratio_sq->sqrt();
        r.exact_value_sq = sq(r.volume) * *rm.ratio_sq;
        r.value = std::sqrt(r.exact_value_sq->to_double());
    } else {
        r.value = r.volume.to_double() * rm.ratio;
    }
    r.witnesses = witness_curves(cs, rm, &r.witness_intersections);
    return r;
}

CycloReal kvol_K0(int n) {
    check_n(n);
    if (n % 4) throw UnsupportedCase("closed formula requires n ≡ 0 mod 4; use kvol-bound");
    const CycloReal lm = staircase_lengths(n).l_m;
    return build_staircase(n).area() * (CycloReal::phi(n) * lm * lm).inverse();
}

KvolReport kvol_closed_formula(int n, HPoint z, int K_max, int W) {
    CycloReal K0 = kvol_K0(n);
    if (!(z.imag() > 0)) throw std::invalid_argument("point must lie in the upper half plane");
    GmaxDistance g = dist_to_Gmax(n, z, K_max, W);
    KvolReport r;
    r.mode = KvolMode::ClosedFormula;
    r.n = n;
    r.K0 = K0;
    r.volume = build_staircase(n).area();
    r.point = z;
    r.distance = g.distance;
    r.nearest_k = g.nearest_k;
    r.nearest = g.nearest;
    r.value = K0.to_double() / std::cosh(g.distance);
    r.K_max = K_max;
    r.W = W;
    r.converged = g.converged;
    return r;
}

bool cell_meets_domain(int n, double x0, double x1, double y0, double y1) {
    const double phi = CycloReal::phi(n).to_double(), r = 1 / phi;
    x0 = std::max(x0, -phi / 2);
    x1 = std::min(x1, phi / 2);
    if (x0 > x1 || y1 <= 0 || y0 > y1) return false;
    if (x0 <= 0 && x1 >= 0) return true;  // (0, y1) lies outside both disks
    const double c = x0 > 0 ? r : -r;
    const double fx = std::max(std::abs(x0 - c), std::abs(x1 - c));
    const double fy = std::max(std::abs(y0), std::abs(y1));
    return fx * fx + fy * fy >= r * r;
}

std::vector<GridCell> kvol_grid(int n, const GridSpec& spec) {
    kvol_K0(n);  // validates n
    if (spec.resolution < 1 || spec.resolution > 2000) throw std::invalid_argument("resolution must lie in [1, 2000]");
    const double phi = CycloReal::phi(n).to_double();
    const double xa = spec.x_min, xb = spec.x_max.value_or(phi / 2);
    const double ya = spec.y_min, yb = spec.y_max.value_or(2.0);
    if (!(xb > xa) || !(yb > ya) || ya < 0) throw std::invalid_argument("empty grid range");
    const int res = spec.resolution;
    const double dx = (xb - xa) / res, dy = (yb - ya) / res;
    std::vector<std::vector<GridCell>> rows(static_cast<std::size_t>(res));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int r; (r = next++) < res;) {
            auto& out = rows[static_cast<std::size_t>(r)];
            for (int c = 0; c < res; ++c) {
                GridCell g;
                g.row = r;
                g.col = c;
                g.x0 = xa + c * dx;
                g.x1 = xa + (c + 1) * dx;
                g.y0 = ya + r * dy;
                g.y1 = ya + (r + 1) * dy;
                if (!cell_meets_domain(n, g.x0, g.x1, g.y0, g.y1)) continue;
                g.x = (g.x0 + g.x1) / 2;
                g.y = (g.y0 + g.y1) / 2;
                KvolReport k = kvol_closed_formula(n, {g.x, g.y}, spec.K_max, spec.W);
                g.value = k.value;
                g.distance = k.distance;
                g.nearest = k.nearest;
                g.converged = k.converged;
                out.push_back(g);
            }
        }
    };
    dist_to_Gmax(n, {0, 1}, spec.K_max, spec.W);  // build the cached tables once
    unsigned t = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    t = std::min<unsigned>(t, static_cast<unsigned>(res));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < t; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    std::vector<GridCell> all;
    for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    return all;
}

NgonBoundReport verify_ngon_bound(int n, double L) {
    check_n(n);
    TranslationSurface x = build_ngon(n);
    auto conns = enumerate_saddle_connections(x, L);
    CurveSet cs = closed_curves(x, conns, L);
    const auto wc = apply_form(cs, intersection_form(x));
    const CycloReal l0sq = norm2(x.edge_vector(0, 0));
    const CycloReal bound_sq = (l0sq * l0sq).inverse();
    NgonBoundReport r;
    r.n = n;
    r.L = L;
    r.curves = cs.curves.size();
    auto is_side = [&](std::size_t i) { return cs.curves[i].components.size() == 1 && *cs.length_sq[i] == l0sq; };
    for (std::size_t i = 0; i < cs.curves.size(); ++i)
        for (std::size_t j = i + 1; j < cs.curves.size(); ++j) {
            ++r.pairs;
            if (is_side(i) && is_side(j) && !parallel(cs.holonomy[i], cs.holonomy[j])) ++r.side_pairs;
            long I = dotl(cs.chains[i], wc[j]);
            if (!I) continue;
            auto c = compare_ratio_sq(cs, i, j, I, bound_sq);
            if (!c)
                ++r.undecided;
            else if (*c > 0)
                ++r.violations;
            else if (*c == 0)
                r.equalities.push_back({i, j, I});
        }
    r.equalities_are_side_pairs = r.equalities.size() == r.side_pairs;
    for (const RatioPair& p : r.equalities)
        if (!is_side(p.i) || !is_side(p.j) || parallel(cs.holonomy[p.i], cs.holonomy[p.j]))
            r.equalities_are_side_pairs = false;
    const bool clean = r.violations == 0 && r.undecided == 0;
    if (n % 4 == 0)
        r.pass = clean && r.side_pairs > 0 && r.equalities_are_side_pairs;
    else
        r.pass = clean && r.equalities.empty();
    return r;
}

ParallelReport check_parallel_criterion(const TranslationSurface& s, const CoSlope& d, std::optional<double> L) {
    double bound = 0;
    try {
        CylinderDecomposition dec = cylinder_decomposition(s, d);
        for (const Cylinder& c : dec.cylinders) bound = std::max(bound, std::sqrt(c.circumference_sq.to_double()));
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("direction " + d.to_string() + " is not periodic");
    }
    const double Lv = L ? *L : bound * (1 + 1e-9);
    auto conns = filter_direction(enumerate_saddle_connections(s, Lv), d);
    CurveSet cs = closed_curves(s, conns, std::numeric_limits<double>::infinity(), {2, true});
    const auto wc = apply_form(cs, intersection_form(s));
    ParallelReport r;
    r.connections = conns.size();
    r.curves = cs.curves.size();
    for (std::size_t i = 0; i < cs.curves.size(); ++i)
        for (std::size_t j = i; j < cs.curves.size(); ++j) {
            ++r.pairs;
            long I = dotl(cs.chains[i], wc[j]);
            if (I) ++r.nonzero;
            r.max_abs = std::max(r.max_abs, std::labs(I));
        }
    r.pass = r.curves > 0 && r.nonzero == 0;
    return r;
}

BoundReport bound_4m2(int n, const Mat2& M, double L) {
    check_n(n);
    if (n % 4 != 2) throw std::invalid_argument("bound_4m2 needs n ≡ 2 mod 4");
    TranslationSurface s = build_staircase(n).transformed(M);
    auto conns = enumerate_saddle_connections(s, L);
    CurveSet cs = closed_curves(s, conns, L);
    IntersectionForm form = intersection_form(s);
    const auto wc = apply_form(cs, form);
    const CycloReal lm = staircase_lengths(n).l_m;
    BoundReport r;
    r.bound = (CycloReal::phi(n) * lm * lm).inverse();
    const CycloReal bsq = r.bound * r.bound;
    r.curves = cs.curves.size();
    for (std::size_t i = 0; i < cs.curves.size(); ++i)
        for (std::size_t j = i + 1; j < cs.curves.size(); ++j) {
            ++r.pairs;
            long I = dotl(cs.chains[i], wc[j]);
            if (!I) continue;
            auto c = compare_ratio_sq(cs, i, j, I, bsq);
            if (!c)
                ++r.undecided;
            else if (*c > 0)
                ++r.violations;
        }
    RatioMax rm = max_ratio(cs, form);
    r.ratio = rm.ratio;
    r.ratio_sq = rm.ratio_sq;
    r.witnesses = witness_curves(cs, rm);
    r.pass = r.violations == 0 && r.undecided == 0;
    return r;
}

ConjectureReport explore_conjecture(int n, double L, const CurveSearch& opt) {
    check_n(n);
    if (n % 4 != 2) throw std::invalid_argument("explore_conjecture needs n ≡ 2 mod 4");
    TranslationSurface x = build_ngon(n);
    auto conns = enumerate_saddle_connections(x, L);
    CurveSet cs = closed_curves(x, conns, L, opt);
    IntersectionForm form = intersection_form(x);
    RatioMax rm = max_ratio(cs, form);
    const CycloReal l0sq = norm2(x.edge_vector(0, 0));
    ConjectureReport r;
    r.curves = cs.curves.size();
    r.pairs = rm.pairs;
    r.best_ratio = rm.ratio;
    r.best_ratio_sq = rm.ratio_sq;
    const CycloReal one = (l0sq * l0sq).inverse();
    const CycloReal half = one * CycloReal::rational(n, mpq_class(1, 4));
    if (rm.ratio_sq) {
        r.equals_half = *rm.ratio_sq == half;
        r.strictly_below_one = *rm.ratio_sq < one;
    } else {
        r.strictly_below_one = rm.ratio * rm.ratio < one.to_double() * (1 - 1e-12);
    }
    auto two_sides = [&](std::size_t i) {
        const auto& c = cs.curves[i].components;
        return c.size() == 2 && c[0].length_sq == l0sq && c[1].length_sq == l0sq;
    };
    const auto wc = apply_form(cs, form);
    for (std::size_t i = 0; i < cs.curves.size() && !r.double_pair_found; ++i)
        for (std::size_t j = i + 1; j < cs.curves.size(); ++j)
            if (two_sides(i) && two_sides(j) && std::labs(dotl(cs.chains[i], wc[j])) == 2) {
                r.double_pair_found = true;
                break;
            }
    for (const RatioPair& p : rm.maximizers)
        if (two_sides(p.i) && two_sides(p.j) && std::labs(p.intersection) == 2) r.double_pair_is_best = true;
    r.witnesses = witness_curves(cs, rm);
    return r;
}

}  // namespace kvol
