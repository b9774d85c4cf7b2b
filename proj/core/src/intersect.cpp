#include "kvol/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace kvol {

void ClosedCurve::validate() const {
    if (components.empty()) throw std::invalid_argument("empty curve");
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& a = components[i];
        const auto& b = components[(i + 1) % components.size()];
        if (a.end_class != b.start_class) throw std::invalid_argument("curve components do not match up");
    }
}

double ClosedCurve::length() const {
    double l = 0;
    for (const auto& c : components) l += c.length;
    return l;
}

SaddleConnection edge_saddle_connection(const TranslationSurface& s, EdgeRef e) {
    SaddleConnection sc;
    Vec2 v = s.edge_vector(e.face, e.edge);
    sc.holonomy = v;
    sc.hol_d = v.to_double();
    sc.length_sq = norm2(v);
    sc.length = std::hypot(sc.hol_d[0], sc.hol_d[1]);
    sc.start = normalize(s, Germ{{e.face, s.wrap(e.face, e.edge)}, v});
    sc.end = normalize(s, Germ{{e.face, s.wrap(e.face, e.edge + 1)}, -v});
    sc.start_class = s.vertex_class({e.face, e.edge});
    sc.end_class = s.vertex_class({e.face, e.edge + 1});
    sc.faces = {e.face};
    sc.first_vertex = s.wrap(e.face, e.edge);
    sc.last_vertex = s.wrap(e.face, e.edge + 1);
    return sc;
}

namespace {

using D2 = std::array<double, 2>;

int orient(const D2& a, const D2& b, const D2& c, const Vec2& ae, const Vec2& be, const Vec2& ce) {
    double ux = b[0] - a[0], uy = b[1] - a[1], vx = c[0] - a[0], vy = c[1] - a[1];
    double w = ux * vy - uy * vx;
    double sc = (std::fabs(ux) + std::fabs(uy)) * (std::fabs(vx) + std::fabs(vy));
    if (w > 1e-9 * sc) return 1;
    if (w < -1e-9 * sc) return -1;
    return wedge(be - ae, ce - ae).sign();
}

struct ChordPiece {
    int face;
    D2 a, b;
    Vec2 ae, be;
    Vec2 dir;
    bool on_edge;
    int pair = -1;  // edge pair when on_edge
};

struct EdgeCross {
    int pair;
    D2 point;    // in the representative face
    Vec2 exact;  // idem
    Vec2 dir;
};

struct Passage {
    int cls;
    Germ in, out;
    D2 where;
};

struct Prepared {
    std::vector<ChordPiece> chords;
    std::vector<EdgeCross> crossings;
    std::vector<Passage> passages;
};

Prepared prepare(const TranslationSurface& s, const ClosedCurve& c) {
    c.validate();
    Prepared p;
    const std::size_t r = c.components.size();
    for (std::size_t i = 0; i < r; ++i) {
        const SaddleConnection& sc = c.components[i];
        DevelopedPath path = develop(s, sc);
        for (std::size_t k = 0; k < path.pieces.size(); ++k) {
            const Piece& pc = path.pieces[k];
            ChordPiece ch{pc.face, pc.from.to_double(), pc.to.to_double(), pc.from, pc.to, sc.holonomy, false, -1};
            if (sc.exits.empty()) {
                // a single piece from vertex to vertex can run along an edge
                int f = sc.faces.front();
                if (s.wrap(f, sc.first_vertex + 1) == sc.last_vertex) {
                    ch.on_edge = true;
                    ch.pair = s.edge_pair({f, sc.first_vertex}).first;
                } else if (s.wrap(f, sc.last_vertex + 1) == sc.first_vertex) {
                    ch.on_edge = true;
                    ch.pair = s.edge_pair({f, sc.last_vertex}).first;
                }
            }
            p.chords.push_back(ch);
            if (k < sc.exits.size()) {
                EdgeRef e = sc.exits[k];
                auto [pair, sgn] = s.edge_pair(e);
                Vec2 x = sgn > 0 ? pc.to : pc.to + s.translation(e);
                p.crossings.push_back({pair, x.to_double(), x, sc.holonomy});
            }
        }
        const SaddleConnection& prev = c.components[(i + r - 1) % r];
        const D2& v = s.vertex_d(sc.faces.front(), sc.first_vertex);
        p.passages.push_back({sc.start_class, prev.end, sc.start, v});
    }
    return p;
}

// Angular order of germs around one singularity.
int compare_germs(const TranslationSurface& s, const Germ& a, const Germ& b) {
    int pa = s.position_in_class(a.corner), pb = s.position_in_class(b.corner);
    if (pa != pb) return pa < pb ? -1 : 1;
    return compare_ccw_angle(corner_start_ray(s, a.corner), a.dir, b.dir);
}

// x strictly inside the ccw interval from a to b
bool in_open_interval(const TranslationSurface& s, const Germ& a, const Germ& b, const Germ& x) {
    int ab = compare_germs(s, a, b);
    int ax = compare_germs(s, a, x), xb = compare_germs(s, x, b);
    if (ab < 0) return ax < 0 && xb < 0;
    if (ab > 0) return ax < 0 || xb < 0;
    return ax != 0;
}

bool strictly_crosses(const ChordPiece& p, const ChordPiece& q) {
    double lo = std::min(p.a[0], p.b[0]), hi = std::max(p.a[0], p.b[0]);
    if (std::max(q.a[0], q.b[0]) < lo - 1e-9 || std::min(q.a[0], q.b[0]) > hi + 1e-9) return false;
    lo = std::min(p.a[1], p.b[1]);
    hi = std::max(p.a[1], p.b[1]);
    if (std::max(q.a[1], q.b[1]) < lo - 1e-9 || std::min(q.a[1], q.b[1]) > hi + 1e-9) return false;
    int o1 = orient(p.a, p.b, q.a, p.ae, p.be, q.ae);
    int o2 = orient(p.a, p.b, q.b, p.ae, p.be, q.be);
    if (o1 * o2 >= 0) return false;
    int o3 = orient(q.a, q.b, p.a, q.ae, q.be, p.ae);
    int o4 = orient(q.a, q.b, p.b, q.ae, q.be, p.be);
    return o3 * o4 < 0;
}

D2 crossing_point(const ChordPiece& p, const ChordPiece& q) {
    double ux = p.b[0] - p.a[0], uy = p.b[1] - p.a[1], vx = q.b[0] - q.a[0], vy = q.b[1] - q.a[1];
    double den = ux * vy - uy * vx;
    double t = ((q.a[0] - p.a[0]) * vy - (q.a[1] - p.a[1]) * vx) / den;
    return {p.a[0] + t * ux, p.a[1] + t * uy};
}

bool same_point(const EdgeCross& a, const EdgeCross& b) {
    if (std::fabs(a.point[0] - b.point[0]) > 1e-7 || std::fabs(a.point[1] - b.point[1]) > 1e-7) return false;
    return a.exact == b.exact;
}

}  // namespace

IntersectionReport intersect(const TranslationSurface& s, const ClosedCurve& g, const ClosedCurve& d,
                             Perturbation side) {
    Prepared pg = prepare(s, g), pd = prepare(s, d);
    IntersectionReport rep;
    auto add = [&](bool singular, int face, int cls, const D2& pt, int sign) {
        if (!sign) return;
        (singular ? rep.singular : rep.interior) += sign;
        rep.witnesses.push_back({singular, face, cls, pt, sign});
    };
    // transverse crossings inside faces
    for (const auto& p : pg.chords) {
        if (p.on_edge) continue;
        for (const auto& q : pd.chords) {
            if (q.on_edge || q.face != p.face) continue;
            if (strictly_crosses(p, q)) add(false, p.face, -1, crossing_point(p, q), wedge(p.dir, q.dir).sign());
        }
    }
    // crossings on edges
    for (const auto& a : pg.crossings)
        for (const auto& b : pd.crossings)
            if (a.pair == b.pair && same_point(a, b)) {
                int f = s.pair_representative(a.pair).face;
                add(false, f, -1, a.point, wedge(a.dir, b.dir).sign());
            }
    // a curve running along an edge meets every crossing of that edge
    for (const auto& p : pg.chords)
        if (p.on_edge)
            for (const auto& b : pd.crossings)
                if (b.pair == p.pair) add(false, s.pair_representative(b.pair).face, -1, b.point, wedge(p.dir, b.dir).sign());
    for (const auto& q : pd.chords)
        if (q.on_edge)
            for (const auto& a : pg.crossings)
                if (a.pair == q.pair) add(false, s.pair_representative(a.pair).face, -1, a.point, wedge(a.dir, q.dir).sign());
    // shared singularities
    for (const auto& pa : pg.passages)
        for (const auto& pb : pd.passages) {
            if (pa.cls != pb.cls) continue;
            int c;
            if (side == Perturbation::Left)
                c = int(in_open_interval(s, pa.out, pa.in, pb.out)) - int(in_open_interval(s, pa.out, pa.in, pb.in));
            else
                c = int(in_open_interval(s, pa.in, pa.out, pb.in)) - int(in_open_interval(s, pa.in, pa.out, pb.out));
            add(true, -1, pa.cls, pa.where, c);
        }
    rep.total = rep.interior + rep.singular;
    return rep;
}

long intersection_number(const TranslationSurface& s, const ClosedCurve& g, const ClosedCurve& d) {
    return intersect(s, g, d).total;
}

std::vector<long> edge_chain(const TranslationSurface& s, const SaddleConnection& sc) {
    std::vector<long> h(static_cast<std::size_t>(s.num_edge_pairs()), 0);
    const std::size_t np = sc.faces.size();
    for (std::size_t i = 0; i < np; ++i) {
        int f = sc.faces[i], m = s.face_size(f);
        // boundary path ccw from the entry point to the exit point
        int lo = i == 0 ? sc.first_vertex : s.glued(sc.exits[i - 1]).edge + 1;
        int hi = i + 1 == np ? sc.last_vertex : sc.exits[i].edge;
        int count = ((hi - lo) % m + m) % m;
        for (int k = 0; k < count; ++k) {
            auto [pair, sgn] = s.edge_pair({f, s.wrap(f, lo + k)});
            h[static_cast<std::size_t>(pair)] += sgn;
        }
    }
    return h;
}

std::vector<long> homology_class(const TranslationSurface& s, const ClosedCurve& g) {
    g.validate();
    std::vector<long> h(static_cast<std::size_t>(s.num_edge_pairs()), 0);
    for (const auto& sc : g.components) {
        auto c = edge_chain(s, sc);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += c[i];
    }
    return h;
}

long IntersectionForm::evaluate(const std::vector<long>& c, const std::vector<long>& d) const {
    long t = 0;
    for (std::size_t i = 0; i < W.size(); ++i) {
        if (!c[i]) continue;
        for (std::size_t j = 0; j < W.size(); ++j) t += c[i] * W[i][j] * d[j];
    }
    return t;
}

IntersectionForm intersection_form(const TranslationSurface& s) {
    const int P = s.num_edge_pairs(), V = s.num_classes();
    // spanning tree of the vertex graph, BFS from class 0
    std::vector<int> parent_pair(static_cast<std::size_t>(V), -1), depth(static_cast<std::size_t>(V), -1);
    std::vector<bool> tree(static_cast<std::size_t>(P), false);
    depth[0] = 0;
    std::vector<int> queue{0};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int u = queue[qi];
        for (int e = 0; e < P; ++e) {
            EdgeRef r = s.pair_representative(e);
            int a = s.vertex_class({r.face, r.edge}), b = s.vertex_class({r.face, r.edge + 1});
            int other = a == u ? b : (b == u ? a : -1);
            if (other < 0 || depth[static_cast<std::size_t>(other)] >= 0) continue;
            depth[static_cast<std::size_t>(other)] = depth[static_cast<std::size_t>(u)] + 1;
            parent_pair[static_cast<std::size_t>(other)] = e;
            tree[static_cast<std::size_t>(e)] = true;
            queue.push_back(other);
        }
    }
    // oriented tree path from the root to a class
    auto path_from_root = [&](int v) {
        std::vector<SaddleConnection> path;
        while (v != 0) {
            int e = parent_pair[static_cast<std::size_t>(v)];
            EdgeRef r = s.pair_representative(e);
            SaddleConnection sc = edge_saddle_connection(s, r);
            if (sc.end_class != v) sc = sc.reversed(s);
            path.push_back(sc);
            v = sc.start_class;
        }
        std::reverse(path.begin(), path.end());
        return path;
    };
    std::vector<std::optional<ClosedCurve>> loops(static_cast<std::size_t>(P));
    IntersectionForm form;
    for (int e = 0; e < P; ++e) {
        if (tree[static_cast<std::size_t>(e)]) continue;
        SaddleConnection sc = edge_saddle_connection(s, s.pair_representative(e));
        ClosedCurve c;
        c.components = path_from_root(sc.start_class);
        c.components.push_back(sc);
        auto back = path_from_root(sc.end_class);
        for (auto it = back.rbegin(); it != back.rend(); ++it) c.components.push_back(it->reversed(s));
        loops[static_cast<std::size_t>(e)] = c;
        form.basis_pairs.push_back(e);
        form.basis.push_back(s.pair_label(e));
    }
    form.W.assign(static_cast<std::size_t>(P), std::vector<long>(static_cast<std::size_t>(P), 0));
    for (int i : form.basis_pairs)
        for (int j : form.basis_pairs)
            if (i < j) {
                long v = intersection_number(s, *loops[static_cast<std::size_t>(i)], *loops[static_cast<std::size_t>(j)]);
                form.W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                form.W[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = -v;
            }
    for (int i : form.basis_pairs) {
        std::vector<long> row;
        for (int j : form.basis_pairs) row.push_back(form.W[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        form.matrix.push_back(row);
    }
    return form;
}

long determinant(const std::vector<std::vector<long>>& m0) {
    const std::size_t n = m0.size();
    if (n == 0) return 1;
    std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = m0[i][j];
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && m[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    mpz_class d = m[n - 1][n - 1] * sign;
    return d.get_si();
}

}  // namespace kvol
