#include "kvol/saddle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

namespace kvol {

std::vector<std::pair<int, int>> SaddleConnection::crossings(const TranslationSurface& s) const {
    std::vector<std::pair<int, int>> out;
    out.reserve(exits.size());
    for (const EdgeRef& e : exits) out.push_back(s.edge_pair(e));
    return out;
}

SaddleConnection SaddleConnection::reversed(const TranslationSurface& s) const {
    SaddleConnection r;
    r.holonomy = -holonomy;
    r.hol_d = {-hol_d[0], -hol_d[1]};
    r.length_sq = length_sq;
    r.length = length;
    r.start = end;
    r.end = start;
    r.start_class = end_class;
    r.end_class = start_class;
    r.faces.assign(faces.rbegin(), faces.rend());
    r.first_vertex = last_vertex;
    r.last_vertex = first_vertex;
    for (auto it = exits.rbegin(); it != exits.rend(); ++it) r.exits.push_back(s.glued(*it));
    return r;
}

namespace {

using D2 = std::array<double, 2>;

inline double wedge_d(const D2& a, const D2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Sign of wedge(a, b) with a float filter and an exact fallback.
template <class Exact>
int filtered_wedge(const D2& a, const D2& b, Exact&& exact) {
    double w = wedge_d(a, b);
    double scale = (std::fabs(a[0]) + std::fabs(a[1])) * (std::fabs(b[0]) + std::fabs(b[1]));
    if (w > 1e-10 * scale) return 1;
    if (w < -1e-10 * scale) return -1;
    return exact();
}

struct Point {
    D2 d;
    Vec2 e;
};

class Searcher {
public:
    Searcher(const TranslationSurface& s, const CycloReal& L, std::atomic<std::size_t>& count, std::size_t cap)
        : s_(s), L2_(L * L), count_(count), cap_(cap) {
        Ld_ = L.to_double();
        L2d_ = Ld_ * Ld_;
    }

    std::vector<SaddleConnection> run(Corner c) {
        corner_ = c;
        out_.clear();
        const int f = c.face, k = c.vertex;
        Vec2 off = -s_.vertex(f, k);
        D2 offd = {-s_.vertex_d(f, k)[0], -s_.vertex_d(f, k)[1]};
        Vec2 st = corner_start_ray(s_, c), en = corner_end_ray(s_, c);
        Point right{st.to_double(), st}, left{en.to_double(), en};
        faces_.assign(1, f);
        exits_.clear();
        const int sz = s_.face_size(f);
        // vertices of the first face: the start ray is closed, only its nearest vertex counts
        for (int j = 1; j < sz; ++j) {
            int idx = s_.wrap(f, k + j);
            Point p = position(f, idx, off, offd);
            int wr = wsign(right, p);
            if (wr < 0) continue;
            if (wr == 0) {
                // straight corners have collinear rays, so no end-ray test here
                if (idx == s_.wrap(f, k + 1) && dot(st, p.e).sign() > 0) report(f, idx, p);
                continue;
            }
            if (wsign(p, left) <= 0) continue;
            report(f, idx, p);
        }
        for (int j = 1; j < sz - 1; ++j) {
            int e = s_.wrap(f, k + j);
            descend(f, e, off, offd, right, left, 0);
        }
        return std::move(out_);
    }

private:
    Point position(int f, int idx, const Vec2& off, const D2& offd) const {
        const D2& v = s_.vertex_d(f, idx);
        return {{v[0] + offd[0], v[1] + offd[1]}, s_.vertex(f, idx) + off};
    }

    static int wsign(const Point& a, const Point& b) {
        return filtered_wedge(a.d, b.d, [&] { return wedge(a.e, b.e).sign(); });
    }

    bool within(const Point& p) const {
        double l2 = p.d[0] * p.d[0] + p.d[1] * p.d[1];
        if (l2 < L2d_ * (1 - 1e-12)) return true;
        if (l2 > L2d_ * (1 + 1e-12) + 1e-300) return false;
        return norm2(p.e) <= L2_;
    }

    void report(int f, int idx, const Point& p) {
        if (!is_canonical(p.e)) return;
        if (!within(p)) return;
        if (count_.fetch_add(1) + 1 > cap_) throw EnumerationCapExceeded(cap_);
        SaddleConnection sc;
        sc.holonomy = p.e;
        sc.hol_d = p.d;
        sc.length_sq = norm2(p.e);
        sc.length = std::hypot(p.d[0], p.d[1]);
        sc.start = normalize(s_, Germ{corner_, p.e});
        sc.end = normalize(s_, Germ{{f, idx}, -p.e});
        sc.start_class = s_.vertex_class(corner_);
        sc.end_class = s_.vertex_class({f, idx});
        sc.faces = faces_;
        sc.exits = exits_;
        sc.first_vertex = corner_.vertex;
        sc.last_vertex = idx;
        out_.push_back(std::move(sc));
    }

    static double seg_dist2(const D2& a, const D2& b) {
        double ex = b[0] - a[0], ey = b[1] - a[1];
        double l2 = ex * ex + ey * ey;
        double t = l2 > 0 ? -(a[0] * ex + a[1] * ey) / l2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        double x = a[0] + t * ex, y = a[1] + t * ey;
        return x * x + y * y;
    }

    // Look through edge e of face f (placed at offset off) within the open cone (right, left).
    void descend(int f, int e, const Vec2& off, const D2& offd, const Point& right, const Point& left, int depth) {
        if (depth > 200000) throw std::logic_error("unfolding too deep");
        Point a = position(f, e, off, offd), b = position(f, e + 1, off, offd);
        if (seg_dist2(a.d, b.d) > L2d_ * (1 + 1e-9) + 1e-12) return;
        const Point& nr = wsign(right, a) > 0 ? a : right;
        const Point& nl = wsign(b, left) > 0 ? b : left;
        if (wsign(nr, nl) <= 0) return;
        EdgeRef g = s_.glued({f, e});
        const Vec2& t = s_.translation({f, e});
        Vec2 off2 = off - t;
        D2 td = t.to_double();
        D2 offd2 = {offd[0] - td[0], offd[1] - td[1]};
        exits_.push_back({f, e});
        faces_.push_back(g.face);
        const int sz = s_.face_size(g.face);
        for (int j = 2; j < sz; ++j) {
            int idx = s_.wrap(g.face, g.edge + j);
            Point p = position(g.face, idx, off2, offd2);
            if (wsign(nr, p) > 0 && wsign(p, nl) > 0) report(g.face, idx, p);
        }
        for (int j = 1; j < sz; ++j) {
            int e2 = s_.wrap(g.face, g.edge + j);
            descend(g.face, e2, off2, offd2, nr, nl, depth + 1);
        }
        exits_.pop_back();
        faces_.pop_back();
    }

    const TranslationSurface& s_;
    CycloReal L2_;
    double Ld_ = 0, L2d_ = 0;
    std::atomic<std::size_t>& count_;
    std::size_t cap_;
    Corner corner_;
    std::vector<SaddleConnection> out_;
    std::vector<int> faces_;
    std::vector<EdgeRef> exits_;
};

int compare_length_then_holonomy(const SaddleConnection& a, const SaddleConnection& b) {
    double da = a.hol_d[0] * a.hol_d[0] + a.hol_d[1] * a.hol_d[1];
    double db = b.hol_d[0] * b.hol_d[0] + b.hol_d[1] * b.hol_d[1];
    if (da < db * (1 - 1e-12)) return -1;
    if (db < da * (1 - 1e-12)) return 1;
    int c = compare(a.length_sq, b.length_sq);
    if (c) return c;
    c = compare(a.holonomy.x, b.holonomy.x);
    if (c) return c;
    return compare(a.holonomy.y, b.holonomy.y);
}

}  // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& s, const CycloReal& L,
                                                           const EnumerationOptions& opt) {
    if (L.sign() <= 0) throw std::invalid_argument("length bound must be positive");
    std::vector<Corner> corners;
    for (int f = 0; f < s.num_faces(); ++f)
        for (int k = 0; k < s.face_size(f); ++k) corners.push_back({f, k});
    std::vector<std::vector<SaddleConnection>> per(corners.size());
    std::atomic<std::size_t> count{0};
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<unsigned>(nt, static_cast<unsigned>(corners.size()));
    auto worker = [&] {
        Searcher srch(s, L, count, opt.cap);
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= corners.size()) return;
            try {
                per[i] = srch.run(corners[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lk(fail_mu);
                if (!failure) failure = std::current_exception();
                next = corners.size();
                return;
            }
        }
    };
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<SaddleConnection> all;
    for (auto& v : per)
        for (auto& sc : v) all.push_back(std::move(sc));
    std::stable_sort(all.begin(), all.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
        int c = compare_length_then_holonomy(a, b);
        if (c) return c < 0;
        if (a.start.corner != b.start.corner) return a.start.corner < b.start.corner;
        return false;
    });
    return all;
}

std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& s, double L,
                                                           const EnumerationOptions& opt) {
    if (!(L > 0) || !std::isfinite(L)) throw std::invalid_argument("length bound must be positive");
    return enumerate_saddle_connections(s, CycloReal::rational(s.n(), mpq_class(L)), opt);
}

std::vector<SaddleConnection> filter_direction(const std::vector<SaddleConnection>& scs, const CoSlope& d) {
    std::vector<SaddleConnection> out;
    if (scs.empty()) return out;
    Vec2 v = d.vector(scs.front().holonomy.x.n());
    for (const auto& sc : scs)
        if (wedge(sc.holonomy, v).is_zero()) out.push_back(sc);
    return out;
}

Vec2 transform(const Mat2& m, const SaddleConnection& sc) { return m * sc.holonomy; }

CoSlope direction_of(const SaddleConnection& sc) { return CoSlope::of_vector(sc.holonomy); }

DevelopedPath develop(const TranslationSurface& s, const SaddleConnection& sc) {
    DevelopedPath out;
    const Vec2& h = sc.holonomy;
    Vec2 off = -s.vertex(sc.faces.front(), sc.first_vertex);
    CycloReal t_prev = CycloReal::zero(s.n());
    for (std::size_t i = 0; i <= sc.exits.size(); ++i) {
        int f = sc.faces[i];
        CycloReal t_next = CycloReal::one(s.n());
        if (i < sc.exits.size()) {
            const EdgeRef& e = sc.exits[i];
            Vec2 a = s.vertex(e.face, e.edge) + off, ev = s.edge_vector(e.face, e.edge);
            t_next = wedge(a, ev) / wedge(h, ev);
        }
        out.pieces.push_back({f, t_prev * h - off, t_next * h - off});
        out.params.push_back(t_next);
        if (i < sc.exits.size()) off = off - s.translation(sc.exits[i]);
        t_prev = t_next;
    }
    return out;
}

std::vector<PieceD> develop_d(const TranslationSurface& s, const SaddleConnection& sc) {
    std::vector<PieceD> out;
    const D2& h = sc.hol_d;
    const D2& v0 = s.vertex_d(sc.faces.front(), sc.first_vertex);
    D2 off = {-v0[0], -v0[1]};
    double t_prev = 0;
    for (std::size_t i = 0; i <= sc.exits.size(); ++i) {
        double t_next = 1;
        if (i < sc.exits.size()) {
            const EdgeRef& e = sc.exits[i];
            const D2& A = s.vertex_d(e.face, e.edge);
            const D2& B = s.vertex_d(e.face, e.edge + 1);
            D2 a = {A[0] + off[0], A[1] + off[1]}, ev = {B[0] - A[0], B[1] - A[1]};
            t_next = wedge_d(a, ev) / wedge_d(h, ev);
        }
        out.push_back({sc.faces[i],
                       {t_prev * h[0] - off[0], t_prev * h[1] - off[1]},
                       {t_next * h[0] - off[0], t_next * h[1] - off[1]}});
        if (i < sc.exits.size()) {
            D2 t = s.translation(sc.exits[i]).to_double();
            off = {off[0] - t[0], off[1] - t[1]};
        }
        t_prev = t_next;
    }
    return out;
}

std::string kind_name(Segment::Kind k) {
    switch (k) {
        case Segment::Kind::Whole: return "whole";
        case Segment::Kind::Initial: return "initial";
        case Segment::Kind::Terminal: return "terminal";
        case Segment::Kind::Sandwiched: return "sandwiched";
        default: return "non-sandwiched";
    }
}

std::vector<Segment> subdivide(const TranslationSurface& ngon, const SaddleConnection& sc) {
    if (ngon.model() != Model::Ngon) throw std::invalid_argument("subdivide expects the n-gon surface");
    const int n = ngon.n();
    CycloReal one = CycloReal::one(n), zero = CycloReal::zero(n);
    std::optional<SectorDiagram> diag;
    try {
        diag = sector_diagram_for(n, sc.holonomy);
    } catch (const std::invalid_argument&) {
    }
    if (!diag) return {{Segment::Kind::Whole, zero, one, sc.length_sq, -1, -1, -1}};
    DevelopedPath path = develop(ngon, sc);
    const int sw = diag->sandwiched();
    std::vector<std::size_t> cuts;
    for (std::size_t i = 0; i < sc.exits.size(); ++i)
        if (ngon_side_label(n, sc.exits[i].edge) != sw) cuts.push_back(i);
    if (cuts.empty()) return {{Segment::Kind::Whole, zero, one, sc.length_sq, -1, -1, -1}};
    std::vector<Segment> out;
    auto make = [&](Segment::Kind kind, const CycloReal& t0, const CycloReal& t1, int from, int via, int to) {
        CycloReal dt = t1 - t0;
        out.push_back({kind, t0, t1, dt * dt * sc.length_sq, from, via, to});
    };
    auto lab = [&](std::size_t i) { return ngon_side_label(n, sc.exits[i].edge); };
    make(Segment::Kind::Initial, zero, path.params[cuts.front()], -1, -1, lab(cuts.front()));
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        std::size_t i0 = cuts[c], i1 = cuts[c + 1];
        bool sandwiched = i1 > i0 + 1;  // crossings of the sandwiched side lie strictly between
        make(sandwiched ? Segment::Kind::Sandwiched : Segment::Kind::NonSandwiched, path.params[i0], path.params[i1],
             lab(i0), sandwiched ? sw : -1, lab(i1));
    }
    make(Segment::Kind::Terminal, path.params[cuts.back()], one, lab(cuts.back()), -1, -1);
    return out;
}

}  // namespace kvol
