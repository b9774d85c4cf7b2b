#include "kvol_io.hpp"

#include <cmath>

namespace kvol::io {

namespace {

json num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json germ(const TranslationSurface& s, const Germ& g) {
    return {{"class", s.vertex_class(g.corner)}, {"corner", to_json(g.corner)}};
}

}  // namespace

json to_json(const CycloReal& v) { return {{"exact", v.to_string()}, {"float", v.to_double()}}; }

json to_json(const Vec2& v) { return json::array({to_json(v.x), to_json(v.y)}); }

json to_json(const Corner& c) { return json::array({c.face, c.vertex}); }

json to_json(const HGeodesic& g) {
    return {{"p", g.p_inf ? json("inf") : num(g.p)}, {"q", g.q_inf ? json("inf") : num(g.q)}};
}

json to_json(const TranslationSurface& s) {
    json faces = json::array();
    for (int f = 0; f < s.num_faces(); ++f) {
        json verts = json::array(), labels = json::array();
        for (int k = 0; k < s.face_size(f); ++k) {
            verts.push_back(to_json(s.vertex(f, k)));
            labels.push_back(s.label({f, k}));
        }
        faces.push_back({{"vertices", verts}, {"labels", labels}});
    }
    json gluings = json::array();
    for (int p = 0; p < s.num_edge_pairs(); ++p) {
        EdgeRef a = s.pair_representative(p), b = s.glued(a);
        gluings.push_back(json::array({a.face, a.edge, b.face, b.edge}));
    }
    json sing = json::array(), cone = json::array();
    for (int c = 0; c < s.num_classes(); ++c) {
        json corners = json::array();
        for (const Corner& k : s.class_corners(c)) corners.push_back(to_json(k));
        sing.push_back(corners);
        cone.push_back(s.cone_angle_multiple(c));
    }
    return {{"n", s.n()},
            {"model", model_name(s.model())},
            {"faces", faces},
            {"gluings", gluings},
            {"singularities", sing},
            {"cone_angles_over_2pi", cone},
            {"genus", s.genus()},
            {"area", to_json(s.area())}};
}

json to_json(const TranslationSurface& s, const SaddleConnection& sc) {
    json cr = json::array();
    for (auto [e, sign] : sc.crossings(s)) cr.push_back(json::array({e, sign}));
    return {{"holonomy", to_json(sc.holonomy)},
            {"length", sc.length},
            {"start", germ(s, sc.start)},
            {"end", germ(s, sc.end)},
            {"crossings", cr}};
}

json to_json(const TranslationSurface& s, const ClosedCurve& c) {
    json comps = json::array();
    for (const SaddleConnection& sc : c.components) comps.push_back(to_json(s, sc));
    return {{"length", c.length()}, {"components", comps}};
}

json to_json(const KvolReport& r) {
    json j;
    j["mode"] = mode_name(r.mode);
    j["n"] = r.n;
    j["value"] = r.value;
    if (r.exact_ratio && r.mode == KvolMode::Bruteforce) j["exact"] = to_json(r.volume * *r.exact_ratio);
    if (r.exact_value_sq) j["exact_value_sq"] = to_json(*r.exact_value_sq);
    if (r.K0) j["K0"] = to_json(*r.K0);
    j["volume"] = to_json(r.volume);
    j["point"] = {r.point.real(), r.point.imag()};
    json params = {{"L", r.L}, {"K_max", r.K_max}, {"W", r.W}};
    j["params"] = params;
    j["converged"] = r.converged;
    if (r.mode == KvolMode::ClosedFormula) {
        j["distance"] = r.distance;
        j["nearest_k"] = num(r.nearest_k);
        j["nearest_geodesic"] = to_json(r.nearest);
    } else {
        j["curves"] = r.curves;
        j["pairs"] = r.pairs;
    }
    // witness curves carry no surface reference; report holonomies and intersection
    json w = json::array();
    for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
        auto side = [](const ClosedCurve& c) {
            json comps = json::array();
            for (const SaddleConnection& sc : c.components) comps.push_back(to_json(sc.holonomy));
            return json{{"length", c.length()}, {"holonomies", comps}};
        };
        w.push_back({{"a", side(r.witnesses[i].first)},
                     {"b", side(r.witnesses[i].second)},
                     {"intersection", r.witness_intersections[i]}});
    }
    j["witnesses"] = w;
    return j;
}

}  // namespace kvol::io
