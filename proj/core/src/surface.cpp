#include "kvol/surface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kvol {

std::string model_name(Model m) {
    switch (m) {
        case Model::Ngon: return "ngon";
        case Model::Staircase: return "staircase";
        default: return "custom";
    }
}

TranslationSurface::TranslationSurface(int n, Model model, std::vector<std::vector<Vec2>> faces,
                                       std::vector<std::vector<EdgeRef>> gluing,
                                       std::vector<std::vector<std::string>> labels)
    : n_(n), model_(model), faces_(std::move(faces)), gluing_(std::move(gluing)), labels_(std::move(labels)) {
    validate();
    build_derived();
}

int TranslationSurface::wrap(int f, int k) const {
    int s = face_size(f);
    return ((k % s) + s) % s;
}

const Vec2& TranslationSurface::vertex(int f, int k) const {
    return faces_[static_cast<size_t>(f)][static_cast<size_t>(wrap(f, k))];
}

const std::array<double, 2>& TranslationSurface::vertex_d(int f, int k) const {
    return faces_d_[static_cast<size_t>(f)][static_cast<size_t>(wrap(f, k))];
}

Vec2 TranslationSurface::edge_vector(int f, int k) const { return vertex(f, k + 1) - vertex(f, k); }

EdgeRef TranslationSurface::glued(EdgeRef e) const {
    return gluing_[static_cast<size_t>(e.face)][static_cast<size_t>(wrap(e.face, e.edge))];
}

const std::string& TranslationSurface::label(EdgeRef e) const {
    return labels_[static_cast<size_t>(e.face)][static_cast<size_t>(wrap(e.face, e.edge))];
}

const Vec2& TranslationSurface::translation(EdgeRef e) const {
    return translations_[static_cast<size_t>(e.face)][static_cast<size_t>(wrap(e.face, e.edge))];
}

std::pair<int, int> TranslationSurface::edge_pair(EdgeRef e) const {
    return pair_of_[static_cast<size_t>(e.face)][static_cast<size_t>(wrap(e.face, e.edge))];
}

Corner TranslationSurface::next_ccw(Corner c) const {
    EdgeRef g = glued({c.face, c.vertex - 1});
    return {g.face, g.edge};
}

Corner TranslationSurface::prev_ccw(Corner c) const {
    EdgeRef g = glued({c.face, c.vertex});
    return {g.face, wrap(g.face, g.edge + 1)};
}

int TranslationSurface::vertex_class(Corner c) const {
    return class_of_[static_cast<size_t>(c.face)][static_cast<size_t>(wrap(c.face, c.vertex))];
}

int TranslationSurface::position_in_class(Corner c) const {
    return pos_in_class_[static_cast<size_t>(c.face)][static_cast<size_t>(wrap(c.face, c.vertex))];
}

double TranslationSurface::corner_angle(Corner c) const {
    auto a = vertex_d(c.face, c.vertex), b = vertex_d(c.face, c.vertex + 1), p = vertex_d(c.face, c.vertex - 1);
    double sx = b[0] - a[0], sy = b[1] - a[1], ex = p[0] - a[0], ey = p[1] - a[1];
    Vec2 s = edge_vector(c.face, c.vertex), e = -edge_vector(c.face, c.vertex - 1);
    // exact test for the straight angle, float otherwise
    if (wedge(s, e).is_zero()) return std::numbers::pi;
    return std::atan2(sx * ey - sy * ex, sx * ex + sy * ey);
}

void TranslationSurface::validate() const {
    if (faces_.empty()) throw std::invalid_argument("surface without faces");
    if (gluing_.size() != faces_.size() || labels_.size() != faces_.size())
        throw std::invalid_argument("gluing/label tables do not match faces");
    for (int f = 0; f < num_faces(); ++f) {
        int sz = face_size(f);
        if (sz < 3) throw std::invalid_argument("degenerate face");
        if (static_cast<int>(gluing_[static_cast<size_t>(f)].size()) != sz ||
            static_cast<int>(labels_[static_cast<size_t>(f)].size()) != sz)
            throw std::invalid_argument("gluing/label tables do not match face size");
        for (int k = 0; k < sz; ++k) {
            if (wedge(edge_vector(f, k), edge_vector(f, k + 1)).sign() < 0)
                throw std::invalid_argument("face is not convex counterclockwise");
            EdgeRef e{f, k}, g = glued(e);
            if (g.face < 0 || g.face >= num_faces() || g.edge < 0 || g.edge >= face_size(g.face))
                throw std::invalid_argument("gluing out of range");
            if (g == e) throw std::invalid_argument("edge glued to itself");
            if (glued(g) != e) throw std::invalid_argument("gluing is not an involution");
            if (edge_vector(f, k) + edge_vector(g.face, g.edge) != Vec2::zero(n_))
                throw std::invalid_argument("glued edges are not opposite translates");
        }
    }
}

void TranslationSurface::build_derived() {
    faces_d_.clear();
    translations_.assign(faces_.size(), {});
    pair_of_.assign(faces_.size(), {});
    class_of_.assign(faces_.size(), {});
    pos_in_class_.assign(faces_.size(), {});
    pair_rep_.clear();
    classes_.clear();
    cone_multiple_.clear();
    for (int f = 0; f < num_faces(); ++f) {
        std::vector<std::array<double, 2>> fd;
        for (const auto& v : face(f)) fd.push_back(v.to_double());
        faces_d_.push_back(fd);
        auto sz = static_cast<size_t>(face_size(f));
        translations_[static_cast<size_t>(f)].resize(sz);
        pair_of_[static_cast<size_t>(f)].assign(sz, {-1, 0});
        class_of_[static_cast<size_t>(f)].assign(sz, -1);
        pos_in_class_[static_cast<size_t>(f)].assign(sz, -1);
    }
    for (int f = 0; f < num_faces(); ++f) {
        for (int k = 0; k < face_size(f); ++k) {
            EdgeRef e{f, k}, g = glued(e);
            translations_[static_cast<size_t>(f)][static_cast<size_t>(k)] = vertex(g.face, g.edge + 1) - vertex(f, k);
            auto& slot = pair_of_[static_cast<size_t>(f)][static_cast<size_t>(k)];
            if (slot.first < 0) {
                int id = static_cast<int>(pair_rep_.size());
                pair_rep_.push_back(e);
                slot = {id, +1};
                pair_of_[static_cast<size_t>(g.face)][static_cast<size_t>(g.edge)] = {id, -1};
            }
        }
    }
    for (int f = 0; f < num_faces(); ++f) {
        for (int k = 0; k < face_size(f); ++k) {
            if (class_of_[static_cast<size_t>(f)][static_cast<size_t>(k)] >= 0) continue;
            int cls = static_cast<int>(classes_.size());
            std::vector<Corner> order;
            Corner c{f, k};
            double total = 0;
            do {
                class_of_[static_cast<size_t>(c.face)][static_cast<size_t>(c.vertex)] = cls;
                pos_in_class_[static_cast<size_t>(c.face)][static_cast<size_t>(c.vertex)] =
                    static_cast<int>(order.size());
                order.push_back(c);
                total += corner_angle(c);
                c = next_ccw(c);
            } while (c != Corner{f, k});
            double mult = total / (2 * std::numbers::pi);
            int r = static_cast<int>(std::lround(mult));
            if (r < 1 || std::fabs(mult - r) > 1e-9)
                throw std::invalid_argument("cone angle is not a multiple of 2pi");
            classes_.push_back(std::move(order));
            cone_multiple_.push_back(r);
        }
    }
}

int TranslationSurface::euler_characteristic() const { return num_classes() - num_edge_pairs() + num_faces(); }

int TranslationSurface::genus() const { return (2 - euler_characteristic()) / 2; }

CycloReal TranslationSurface::area() const {
    CycloReal a = CycloReal::zero(n_);
    for (int f = 0; f < num_faces(); ++f)
        for (int k = 0; k < face_size(f); ++k) a += wedge(vertex(f, k), vertex(f, k + 1));
    return a * CycloReal::rational(n_, mpq_class(1, 2));
}

CycloReal TranslationSurface::shortest_horizontal() const {
    std::optional<CycloReal> best;
    for (int f = 0; f < num_faces(); ++f)
        for (int k = 0; k < face_size(f); ++k) {
            Vec2 e = edge_vector(f, k);
            if (!e.y.is_zero()) continue;
            CycloReal l = e.x.sign() < 0 ? -e.x : e.x;
            if (!best || l < *best) best = l;
        }
    if (!best) throw std::logic_error("surface has no horizontal edge");
    return *best;
}

TranslationSurface TranslationSurface::transformed(const Mat2& m) const {
    int ds = m.det().sign();
    if (ds == 0) throw std::domain_error("singular matrix");
    std::vector<std::vector<Vec2>> faces;
    std::vector<std::vector<EdgeRef>> gluing;
    std::vector<std::vector<std::string>> labels;
    for (int f = 0; f < num_faces(); ++f) {
        int sz = face_size(f);
        std::vector<Vec2> vs;
        std::vector<EdgeRef> gl;
        std::vector<std::string> lb;
        for (int i = 0; i < sz; ++i) {
            if (ds > 0) {
                vs.push_back(m * vertex(f, i));
                gl.push_back(glued({f, i}));
                lb.push_back(label({f, i}));
            } else {
                // new vertex i is old vertex -i; new edge i is old edge -i-1 reversed
                vs.push_back(m * vertex(f, -i));
                int old = wrap(f, -i - 1);
                EdgeRef g = glued({f, old});
                gl.push_back({g.face, wrap(g.face, -g.edge - 1)});
                lb.push_back(label({f, old}));
            }
        }
        faces.push_back(std::move(vs));
        gluing.push_back(std::move(gl));
        labels.push_back(std::move(lb));
    }
    return TranslationSurface(n_, model_, std::move(faces), std::move(gluing), std::move(labels));
}

TranslationSurface TranslationSurface::scaled(const CycloReal& s) const {
    if (s.sign() <= 0) throw std::invalid_argument("scale must be positive");
    CycloReal z = CycloReal::zero(n_);
    return transformed(Mat2{s, z, z, s});
}

// ---------------------------------------------------------------- builders

int ngon_side_label(int n, int edge) { return ((edge + 1) % (n / 2) + n / 2) % (n / 2); }

TranslationSurface build_ngon(int n) {
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("n must be even and at least 4");
    CycloReal half = CycloReal::rational(n, mpq_class(1, 2));
    CycloReal cot = trig_value(n, Trig::Cos, 1) / trig_value(n, Trig::Sin, 1);
    std::vector<Vec2> vs;
    Vec2 v{-half, -(half * cot)};
    for (int j = 0; j < n; ++j) {
        vs.push_back(v);
        v = v + Vec2{trig_value(n, Trig::Cos, 2 * j), trig_value(n, Trig::Sin, 2 * j)};
    }
    std::vector<EdgeRef> gl;
    std::vector<std::string> lb;
    for (int j = 0; j < n; ++j) {
        gl.push_back({0, (j + n / 2) % n});
        lb.push_back("e" + std::to_string(ngon_side_label(n, j)));
    }
    return TranslationSurface(n, Model::Ngon, {vs}, {gl}, {lb});
}

StaircaseLengths staircase_lengths(int n) {
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("n must be even and at least 8");
    StaircaseLengths out;
    if (n % 4 == 0) {
        int m = n / 4;
        for (int i = 1; i <= m; ++i) out.horizontal.push_back(trig_value(n, Trig::Sin, n / 2 - 2 * i + 1));
        for (int j = 1; j <= m; ++j) out.vertical.push_back(trig_value(n, Trig::Sin, n / 2 - 2 * j + 2));
    } else {
        int m = (n - 2) / 4;
        for (int i = 1; i <= m + 1; ++i) out.horizontal.push_back(trig_value(n, Trig::Sin, n / 2 - 2 * i + 2));
        for (int j = 1; j <= m; ++j) out.vertical.push_back(trig_value(n, Trig::Sin, n / 2 - 2 * j + 1));
    }
    out.l_m = out.horizontal.back();
    return out;
}

namespace {

std::string alpha(int i) { return "alpha_" + std::to_string(i); }
std::string beta(int j) { return "beta_" + std::to_string(j); }
std::string cut(int k) { return "c_" + std::to_string(k); }

// Faces are the columns C_1..C_m, left to right; rows Z_1 (top) .. Z_m (bottom).
TranslationSurface staircase_0mod4(int n, const StaircaseLengths& L) {
    int m = n / 4;
    auto l = [&](int i) { return L.horizontal[static_cast<size_t>(i - 1)]; };
    auto h = [&](int j) { return L.vertical[static_cast<size_t>(j - 1)]; };
    std::vector<CycloReal> X(static_cast<size_t>(m + 1), CycloReal::zero(n));
    for (int i = 1; i <= m; ++i) X[static_cast<size_t>(i)] = X[static_cast<size_t>(i - 1)] + l(i);
    auto base = [&](int j) {
        CycloReal s = CycloReal::zero(n);
        for (int k = j + 1; k <= m; ++k) s += h(k);
        return s;
    };
    auto x = [&](int i) { return X[static_cast<size_t>(i)]; };
    std::vector<std::vector<Vec2>> faces;
    std::vector<std::vector<EdgeRef>> gl;
    std::vector<std::vector<std::string>> lb;
    // face index of C_i is i-1
    for (int i = 1; i <= m; ++i) {
        if (i < m) {
            CycloReal b = base(i + 1), mid = base(i), t = base(i) + h(i);
            faces.push_back({{x(i - 1), b}, {x(i), b}, {x(i), mid}, {x(i), t}, {x(i - 1), t}, {x(i - 1), mid}});
            EdgeRef right_lower = (i + 1 < m) ? EdgeRef{i, 4} : EdgeRef{i, 3};
            EdgeRef right_upper = (i >= 2) ? EdgeRef{i - 2, 5} : EdgeRef{0, 4};
            EdgeRef left_upper = (i >= 2) ? EdgeRef{i - 2, 1} : EdgeRef{0, 2};
            EdgeRef left_lower = (i + 1 < m) ? EdgeRef{i, 2} : EdgeRef{i, 1};
            gl.push_back({{i - 1, 3}, right_lower, right_upper, {i - 1, 0}, left_upper, left_lower});
            lb.push_back({alpha(i), cut(i), beta(i), alpha(i), i >= 2 ? cut(i - 1) : beta(1), beta(i + 1)});
        } else {
            CycloReal t = h(m);
            CycloReal z = CycloReal::zero(n);
            faces.push_back({{x(m - 1), z}, {x(m), z}, {x(m), t}, {x(m - 1), t}});
            gl.push_back({{m - 1, 2}, {m - 2, 5}, {m - 1, 0}, {m - 2, 1}});
            lb.push_back({alpha(m), beta(m), alpha(m), cut(m - 1)});
        }
    }
    return TranslationSurface(n, Model::Staircase, std::move(faces), std::move(gl), std::move(lb));
}

// Faces are the rows Z_1 (top) .. Z_m (bottom); columns 1..m+1 left to right.
TranslationSurface staircase_2mod4(int n, const StaircaseLengths& L) {
    int m = (n - 2) / 4;
    auto a = [&](int i) { return L.horizontal[static_cast<size_t>(i - 1)]; };
    auto bt = [&](int j) { return L.vertical[static_cast<size_t>(j - 1)]; };
    std::vector<CycloReal> X(static_cast<size_t>(m + 2), CycloReal::zero(n));
    for (int i = 1; i <= m + 1; ++i) X[static_cast<size_t>(i)] = X[static_cast<size_t>(i - 1)] + a(i);
    auto x = [&](int i) { return X[static_cast<size_t>(i)]; };
    auto base = [&](int j) {
        CycloReal s = CycloReal::zero(n);
        for (int k = j + 1; k <= m; ++k) s += bt(k);
        return s;
    };
    std::vector<std::vector<Vec2>> faces;
    std::vector<std::vector<EdgeRef>> gl;
    std::vector<std::vector<std::string>> lb;
    // face index of Z_j is j-1
    for (int j = 1; j <= m; ++j) {
        CycloReal b = base(j), t = base(j) + bt(j);
        faces.push_back({{x(j - 1), b}, {x(j), b}, {x(j + 1), b}, {x(j + 1), t}, {x(j), t}, {x(j - 1), t}});
        EdgeRef bottom_left = (j == 1) ? EdgeRef{0, 4} : EdgeRef{j - 2, 3};
        EdgeRef bottom_right = (j < m) ? EdgeRef{j, 4} : EdgeRef{m - 1, 3};
        EdgeRef top_right = (j < m) ? EdgeRef{j, 0} : EdgeRef{m - 1, 1};
        EdgeRef top_left = (j == 1) ? EdgeRef{0, 0} : EdgeRef{j - 2, 1};
        gl.push_back({bottom_left, bottom_right, {j - 1, 5}, top_right, top_left, {j - 1, 2}});
        lb.push_back({alpha(j), j < m ? cut(j) : alpha(m + 1), beta(j), alpha(j + 1), j == 1 ? alpha(1) : cut(j - 1),
                      beta(j)});
    }
    return TranslationSurface(n, Model::Staircase, std::move(faces), std::move(gl), std::move(lb));
}

}  // namespace

TranslationSurface build_staircase(int n, bool unit_systole) {
    StaircaseLengths L = staircase_lengths(n);
    TranslationSurface s = n % 4 == 0 ? staircase_0mod4(n, L) : staircase_2mod4(n, L);
    if (unit_systole) s = s.scaled(L.l_m.inverse());
    return s;
}

Mat2 conversion_matrix(int n) {
    return {trig_value(n, Trig::Sin, 1), -trig_value(n, Trig::Sin, n / 2 - 1), CycloReal::zero(n), CycloReal::one(n)};
}

VeechGenerators veech_generators(int n) {
    CycloReal o = CycloReal::one(n), z = CycloReal::zero(n), p = CycloReal::phi(n);
    return {{o, p, z, o}, {o, z, p, o}, {o, z, z, -o}};
}

// ---------------------------------------------------------------- germs

Vec2 corner_start_ray(const TranslationSurface& s, Corner c) { return s.edge_vector(c.face, c.vertex); }

Vec2 corner_end_ray(const TranslationSurface& s, Corner c) { return -s.edge_vector(c.face, c.vertex - 1); }

bool corner_contains(const TranslationSurface& s, Corner c, const Vec2& dir) {
    Vec2 st = corner_start_ray(s, c);
    return compare_ccw_angle(st, dir, corner_end_ray(s, c)) < 0;
}

Germ normalize(const TranslationSurface& s, Germ g) {
    if (same_direction(g.dir, corner_end_ray(s, g.corner))) g.corner = s.next_ccw(g.corner);
    g.corner.vertex = s.wrap(g.corner.face, g.corner.vertex);
    return g;
}

std::vector<Germ> germs_in_direction(const TranslationSurface& s, int cls, const Vec2& dir) {
    std::vector<Germ> out;
    for (const Corner& c : s.class_corners(cls))
        if (corner_contains(s, c, dir)) out.push_back({c, dir});
    return out;
}

namespace {

Vec2 reflect(const Vec2& v) { return {v.x, -v.y}; }

Germ quarter_ccw(const TranslationSurface& s, Germ g) {
    Vec2 t = perp(g.dir), pos = g.dir;
    Corner cur = g.corner;
    for (int guard = 0; guard < 100000; ++guard) {
        Vec2 e = corner_end_ray(s, cur);
        int cmp = compare_ccw_angle(pos, t, e);
        if (cmp < 0) return {cur, t};
        if (cmp == 0) return {s.next_ccw(cur), t};
        cur = s.next_ccw(cur);
        pos = e;
    }
    throw std::logic_error("germ rotation did not terminate");
}

Germ quarter_cw(const TranslationSurface& s, Germ g) {
    Vec2 t = -perp(g.dir), pos = g.dir;
    Corner cur = g.corner;
    for (int guard = 0; guard < 100000; ++guard) {
        Vec2 st = corner_start_ray(s, cur);
        if (same_direction(pos, st)) {
            cur = s.prev_ccw(cur);
            pos = corner_end_ray(s, cur);
            continue;
        }
        int cmp = compare_ccw_angle(reflect(pos), reflect(t), reflect(st));
        if (cmp <= 0) return {cur, t};
        cur = s.prev_ccw(cur);
        pos = st;
    }
    throw std::logic_error("germ rotation did not terminate");
}

}  // namespace

Germ rotate_quarter(const TranslationSurface& s, Germ g, int quarters) {
    g = normalize(s, g);
    for (int i = 0; i < quarters; ++i) g = quarter_ccw(s, g);
    for (int i = 0; i < -quarters; ++i) g = quarter_cw(s, g);
    return g;
}

// ---------------------------------------------------------------- tracing

namespace {

struct Exit {
    bool vertex = false;
    int index = 0;  // vertex hit, or edge exited
};

// Scans vertices ccw starting at `start` for the first one not strictly to the
// right of the ray p + t w; the ray leaves through that vertex or the edge before it.
Exit find_exit(const TranslationSurface& s, int f, const Vec2& p, const Vec2& w, int start, int count) {
    int prev = -1;
    for (int i = 0; i < count; ++i) {
        int idx = s.wrap(f, start + i);
        int sg = wedge(w, s.vertex(f, idx) - p).sign();
        if (sg >= 0) {
            if (prev < 0 && sg > 0) throw std::logic_error("ray exit scan started on the wrong side");
            if (sg == 0) return {true, idx};
            return {false, prev};
        }
        prev = idx;
    }
    throw std::logic_error("ray does not leave the face");
}

struct Stepper {
    const TranslationSurface& s;
    Trace out;
    double length = 0;

    Stepper(const TranslationSurface& surf) : s(surf) { out.holonomy = Vec2::zero(surf.n()); }

    // Runs from point p in face f; scan parameters as in find_exit.
    void run(int f, Vec2 p, const Vec2& w, int start, int count, double max_length, int max_crossings) {
        auto wd = w.to_double();
        double wl = std::hypot(wd[0], wd[1]);
        for (;;) {
            Exit ex = find_exit(s, f, p, w, start, count);
            if (ex.vertex) {
                const Vec2& v = s.vertex(f, ex.index);
                out.pieces.push_back({f, p, v});
                out.holonomy = out.holonomy + (v - p);
                out.hit_vertex = true;
                out.end = normalize(s, Germ{{f, ex.index}, -w});
                return;
            }
            int e = ex.index;
            Vec2 a = s.vertex(f, e), ev = s.edge_vector(f, e);
            CycloReal t = wedge(a - p, ev) / wedge(w, ev);
            Vec2 x = p + t * w;
            out.pieces.push_back({f, p, x});
            out.holonomy = out.holonomy + (x - p);
            length += std::fabs(t.to_double()) * wl;
            out.exits.push_back({f, e});
            out.crossings.push_back(s.edge_pair({f, e}));
            EdgeRef g = s.glued({f, e});
            p = x + s.translation({f, e});
            f = g.face;
            start = g.edge + 1;
            count = s.face_size(f);
            if (length > max_length) return;
            if (max_crossings >= 0 && static_cast<int>(out.crossings.size()) >= max_crossings) return;
        }
    }
};

}  // namespace

Trace trace_from_germ(const TranslationSurface& s, const Germ& g0, double max_length) {
    Germ g = normalize(s, g0);
    Stepper st(s);
    int f = g.corner.face, k = g.corner.vertex;
    st.run(f, s.vertex(f, k), g.dir, k + 1, s.face_size(f) - 1, max_length, -1);
    return st.out;
}

Trace trace_from_point(const TranslationSurface& s, int face, const Vec2& p, const Vec2& dir, double max_length,
                       int max_crossings) {
    Stepper st(s);
    int sz = s.face_size(face);
    // on an edge: enter through it
    for (int k = 0; k < sz; ++k) {
        Vec2 ev = s.edge_vector(face, k);
        if (wedge(ev, p - s.vertex(face, k)).is_zero()) {
            if (wedge(ev, dir).sign() <= 0) throw std::invalid_argument("direction does not point into the face");
            st.run(face, p, dir, k + 1, sz, max_length, max_crossings);
            return st.out;
        }
    }
    for (int k = 0; k < sz; ++k) {
        if (wedge(dir, s.vertex(face, k) - p).sign() < 0) {
            st.run(face, p, dir, k, sz, max_length, max_crossings);
            return st.out;
        }
    }
    throw std::logic_error("point is not inside the face");
}

// ---------------------------------------------------------------- cylinders

namespace {

struct Separatrix {
    Germ start;
    Trace trace;
};

}  // namespace

CylinderDecomposition cylinder_decomposition(const TranslationSurface& s, const CoSlope& d) {
    const int n = s.n();
    Vec2 u = d.vector(n);
    double cutoff = 1e4 * s.shortest_horizontal().to_double();
    std::vector<Separatrix> seps;
    std::map<Corner, int> by_corner;
    // pieces of separatrices per face, including edge-aligned copies on the partner face
    std::vector<std::vector<std::pair<Vec2, Vec2>>> face_pieces(static_cast<size_t>(s.num_faces()));
    for (int cls = 0; cls < s.num_classes(); ++cls) {
        for (const Germ& g : germs_in_direction(s, cls, u)) {
            Trace tr = trace_from_germ(s, g, cutoff);
            if (!tr.hit_vertex) throw std::runtime_error("direction is not periodic within the length cutoff");
            by_corner[g.corner] = static_cast<int>(seps.size());
            for (const Piece& pc : tr.pieces) face_pieces[static_cast<size_t>(pc.face)].push_back({pc.from, pc.to});
            if (same_direction(g.dir, corner_start_ray(s, g.corner))) {
                EdgeRef e{g.corner.face, g.corner.vertex};
                EdgeRef o = s.glued(e);
                const Vec2& t = s.translation(e);
                const Piece& pc = tr.pieces.front();
                face_pieces[static_cast<size_t>(o.face)].push_back({pc.from + t, pc.to + t});
            }
            seps.push_back({g, std::move(tr)});
        }
    }
    std::vector<int> succ(seps.size());
    for (size_t i = 0; i < seps.size(); ++i) {
        Germ next = rotate_quarter(s, seps[i].trace.end, -2);
        auto it = by_corner.find(next.corner);
        if (it == by_corner.end()) throw std::logic_error("boundary chain successor not found");
        succ[i] = it->second;
    }
    CylinderDecomposition out{d, {}};
    std::vector<bool> used(seps.size(), false);
    for (size_t i0 = 0; i0 < seps.size(); ++i0) {
        if (used[i0]) continue;
        Cylinder cyl;
        cyl.holonomy = Vec2::zero(n);
        size_t i = i0;
        do {
            used[i] = true;
            cyl.holonomy = cyl.holonomy + seps[i].trace.holonomy;
            for (auto [pair, sign] : seps[i].trace.crossings) {
                (void)sign;
                cyl.core_word.push_back(s.pair_label(pair));
            }
            ++cyl.boundary_connections;
            i = static_cast<size_t>(succ[i]);
        } while (i != i0);
        // perpendicular ray from the chain's first vertex up to the top boundary
        Germ up = rotate_quarter(s, seps[i0].start, 1);
        Vec2 w = up.dir;
        int f = up.corner.face, k = up.corner.vertex;
        Vec2 p = s.vertex(f, k);
        Vec2 V = Vec2::zero(n);
        int start = k + 1, count = s.face_size(f) - 1;
        for (int guard = 0;; ++guard) {
            if (guard > 100000) throw std::logic_error("height ray did not terminate");
            Exit ex = find_exit(s, f, p, w, start, count);
            Vec2 endp;
            CycloReal tmax;
            if (ex.vertex) {
                endp = s.vertex(f, ex.index);
            } else {
                Vec2 a = s.vertex(f, ex.index), ev = s.edge_vector(f, ex.index);
                endp = p + (wedge(a - p, ev) / wedge(w, ev)) * w;
            }
            // param along w of endp
            tmax = dot(endp - p, w) / norm2(w);
            std::optional<CycloReal> best;
            for (const auto& [A, B] : face_pieces[static_cast<size_t>(f)]) {
                Vec2 ab = B - A;
                CycloReal den = wedge(w, ab);
                if (den.is_zero()) continue;
                CycloReal t = wedge(A - p, ab) / den;
                CycloReal sp = wedge(A - p, w) / den;
                if (t.sign() <= 0 || t > tmax || sp.sign() < 0 || sp > CycloReal::one(n)) continue;
                if (!best || t < *best) best = t;
            }
            if (best) {
                V = V + (*best) * w;
                break;
            }
            V = V + (endp - p);
            if (ex.vertex) break;
            EdgeRef g = s.glued({f, ex.index});
            p = endp + s.translation({f, ex.index});
            f = g.face;
            start = g.edge + 1;
            count = s.face_size(f);
        }
        CycloReal wv = wedge(cyl.holonomy, V);
        cyl.area = wv.sign() < 0 ? -wv : wv;
        cyl.circumference_sq = norm2(cyl.holonomy);
        cyl.modulus = cyl.circumference_sq / cyl.area;
        cyl.height_sq = cyl.area * cyl.area / cyl.circumference_sq;
        out.cylinders.push_back(std::move(cyl));
    }
    std::stable_sort(out.cylinders.begin(), out.cylinders.end(),
                     [](const Cylinder& a, const Cylinder& b) { return a.height_sq < b.height_sq; });
    return out;
}

// ---------------------------------------------------------------- sectors

int sector_index(int n, const Vec2& dir0) {
    if (dir0.is_zero()) throw std::invalid_argument("zero direction");
    Vec2 dir = canonical(dir0);
    for (int k = 0; k < n; ++k) {
        Vec2 b0{trig_value(n, Trig::Cos, k), trig_value(n, Trig::Sin, k)};
        Vec2 b1{trig_value(n, Trig::Cos, k + 1), trig_value(n, Trig::Sin, k + 1)};
        int w0 = wedge(b0, dir).sign(), w1 = wedge(dir, b1).sign();
        if (w0 == 0 && dot(b0, dir).sign() > 0) break;
        if (w0 > 0 && w1 > 0) return k;
    }
    throw std::invalid_argument("direction lies on a sector boundary");
}

SectorDiagram sector_diagram_for(int n, const Vec2& dir0) {
    int sec = sector_index(n, dir0);
    Vec2 w = canonical(dir0);
    TranslationSurface x = build_ngon(n);
    int h = n / 2;
    struct Side {
        int label;
        int kind;  // +1 entering, -1 exiting
        CycloReal lo, hi;
    };
    std::vector<Side> sides;
    for (int i = 0; i < n; ++i) {
        Vec2 ev = x.edge_vector(0, i);
        int kind = wedge(ev, w).sign() > 0 ? 1 : -1;
        CycloReal c0 = wedge(w, x.vertex(0, i)), c1 = wedge(w, x.vertex(0, i + 1));
        if (c1 < c0) std::swap(c0, c1);
        sides.push_back({ngon_side_label(n, i), kind, c0, c1});
    }
    std::vector<std::set<int>> adj(static_cast<size_t>(h));
    std::vector<bool> loop(static_cast<size_t>(h), false);
    for (const Side& a : sides) {
        if (a.kind != 1) continue;
        for (const Side& b : sides) {
            if (b.kind != -1) continue;
            CycloReal lo = a.lo < b.lo ? b.lo : a.lo;
            CycloReal hi = a.hi < b.hi ? a.hi : b.hi;
            if (!(lo < hi)) continue;
            if (a.label == b.label)
                loop[static_cast<size_t>(a.label)] = true;
            else {
                adj[static_cast<size_t>(a.label)].insert(b.label);
                adj[static_cast<size_t>(b.label)].insert(a.label);
            }
        }
    }
    SectorDiagram out;
    out.sector = sec;
    int first = -1;
    for (int v = 0; v < h; ++v)
        if (adj[static_cast<size_t>(v)].size() == 1 && !loop[static_cast<size_t>(v)]) first = v;
    if (first < 0) throw std::logic_error("transition diagram is not a path");
    int prev = -1, cur = first;
    while (cur >= 0) {
        out.sigma.push_back(cur);
        int nxt = -1;
        for (int v : adj[static_cast<size_t>(cur)])
            if (v != prev) nxt = v;
        if (adj[static_cast<size_t>(cur)].size() > 2) throw std::logic_error("transition diagram is not a path");
        prev = cur;
        cur = nxt;
        if (static_cast<int>(out.sigma.size()) > h) throw std::logic_error("transition diagram has a cycle");
    }
    if (static_cast<int>(out.sigma.size()) != h || !loop[static_cast<size_t>(out.sigma.back())])
        throw std::logic_error("transition diagram is not a path ending in a loop");
    return out;
}

SectorDiagram sector_diagram(int n, const CoSlope& d) { return sector_diagram_for(n, d.vector(n)); }

std::string SectorDiagram::to_string() const {
    std::ostringstream os;
    for (size_t i = 0; i < sigma.size(); ++i) {
        if (i) os << " <-> ";
        os << "e" << sigma[i];
    }
    os << " (loop)";
    return os.str();
}

}  // namespace kvol
