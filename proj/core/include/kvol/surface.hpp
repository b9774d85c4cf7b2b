#pragma once

#include "kvol/geometry.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace kvol {

enum class Model { Ngon, Staircase, Custom };
std::string model_name(Model m);

/// Corner k of face f sits at vertex k, between edge k-1 (incoming) and edge k.
/// Its angular range runs ccw from the direction of edge k to the reversed
/// direction of edge k-1.
struct Corner {
    int face = 0;
    int vertex = 0;
    auto operator<=>(const Corner&) const = default;
};

/// Edge k of face f runs from vertex k to vertex k+1.
struct EdgeRef {
    int face = 0;
    int edge = 0;
    auto operator<=>(const EdgeRef&) const = default;
};

class TranslationSurface {
public:
    TranslationSurface() = default;
    TranslationSurface(int n, Model model, std::vector<std::vector<Vec2>> faces,
                       std::vector<std::vector<EdgeRef>> gluing,
                       std::vector<std::vector<std::string>> labels);

    int n() const { return n_; }
    Model model() const { return model_; }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int face_size(int f) const { return static_cast<int>(faces_[static_cast<size_t>(f)].size()); }
    const std::vector<Vec2>& face(int f) const { return faces_[static_cast<size_t>(f)]; }
    const Vec2& vertex(int f, int k) const;
    /// Float copy of the vertex, for filters.
    const std::array<double, 2>& vertex_d(int f, int k) const;
    Vec2 edge_vector(int f, int k) const;
    EdgeRef glued(EdgeRef e) const;
    const std::string& label(EdgeRef e) const;
    /// Translation taking points of edge e onto the glued edge.
    const Vec2& translation(EdgeRef e) const;
    /// Edge pair id and whether e is the representative half (+1) or not (-1).
    std::pair<int, int> edge_pair(EdgeRef e) const;
    int num_edge_pairs() const { return static_cast<int>(pair_rep_.size()); }
    EdgeRef pair_representative(int pair) const { return pair_rep_[static_cast<size_t>(pair)]; }
    const std::string& pair_label(int pair) const { return label(pair_rep_[static_cast<size_t>(pair)]); }

    int wrap(int f, int k) const;

    Corner next_ccw(Corner c) const;
    Corner prev_ccw(Corner c) const;
    int vertex_class(Corner c) const;
    int num_classes() const { return static_cast<int>(classes_.size()); }
    /// Corners of a singularity class in ccw cyclic order.
    const std::vector<Corner>& class_corners(int cls) const { return classes_[static_cast<size_t>(cls)]; }
    int position_in_class(Corner c) const;
    /// Total cone angle divided by 2pi.
    int cone_angle_multiple(int cls) const { return cone_multiple_[static_cast<size_t>(cls)]; }
    /// Interior angle of a corner in radians (float).
    double corner_angle(Corner c) const;

    int num_edges() const { return num_edge_pairs(); }
    int euler_characteristic() const;
    int genus() const;
    CycloReal area() const;
    /// Length of the shortest horizontal edge; for staircases this is l_m.
    CycloReal shortest_horizontal() const;

    /// Image under a linear map with nonzero determinant; for negative
    /// determinant the face orientation is restored by reversing vertex order.
    TranslationSurface transformed(const Mat2& m) const;
    /// Uniform scaling of all coordinates.
    TranslationSurface scaled(const CycloReal& s) const;

private:
    void build_derived();
    void validate() const;

    int n_ = 0;
    Model model_ = Model::Custom;
    std::vector<std::vector<Vec2>> faces_;
    std::vector<std::vector<std::array<double, 2>>> faces_d_;
    std::vector<std::vector<EdgeRef>> gluing_;
    std::vector<std::vector<std::string>> labels_;
    std::vector<std::vector<Vec2>> translations_;
    std::vector<std::vector<std::pair<int, int>>> pair_of_;
    std::vector<EdgeRef> pair_rep_;
    std::vector<std::vector<int>> class_of_;
    std::vector<std::vector<int>> pos_in_class_;
    std::vector<std::vector<Corner>> classes_;
    std::vector<int> cone_multiple_;
};

/// Regular n-gon of unit side centered at the origin, opposite sides glued.
/// n = 4 gives the square torus.
TranslationSurface build_ngon(int n);

/// Staircase model; unit_systole rescales so that l_m = 1.
TranslationSurface build_staircase(int n, bool unit_systole = false);

struct StaircaseLengths {
    std::vector<CycloReal> horizontal;  // l(alpha_1), l(alpha_2), ...
    std::vector<CycloReal> vertical;    // l(beta_1), ...
    CycloReal l_m;                      // shortest horizontal length
};
StaircaseLengths staircase_lengths(int n);

/// P with P * X_n cut-and-paste equivalent to S_n.
Mat2 conversion_matrix(int n);

struct VeechGenerators {
    Mat2 T_H, T_V, R;
};
VeechGenerators veech_generators(int n);

/// Angular germ at a cone point: a corner and a direction in its half-open
/// range [start ray, end ray).
struct Germ {
    Corner corner;
    Vec2 dir;
};

/// Is dir inside the half-open angular range of the corner.
bool corner_contains(const TranslationSurface& s, Corner c, const Vec2& dir);
/// Moves a direction lying on the end ray to the next corner.
Germ normalize(const TranslationSurface& s, Germ g);
/// Start and end rays of a corner.
Vec2 corner_start_ray(const TranslationSurface& s, Corner c);
Vec2 corner_end_ray(const TranslationSurface& s, Corner c);
/// Germ of direction dir within the cone point of class cls; all germs when
/// the cone angle exceeds 2pi.
std::vector<Germ> germs_in_direction(const TranslationSurface& s, int cls, const Vec2& dir);
/// Rotation of a germ by a quarter turn (ccw for +1, cw for -1), repeated.
Germ rotate_quarter(const TranslationSurface& s, Germ g, int quarters);

/// Straight piece of a trajectory inside one face.
struct Piece {
    int face = 0;
    Vec2 from, to;
};

struct Trace {
    std::vector<Piece> pieces;
    /// (edge pair id, +1/-1) per edge crossing, in order.
    std::vector<std::pair<int, int>> crossings;
    /// Edges crossed, as the half edge exited.
    std::vector<EdgeRef> exits;
    Vec2 holonomy;
    bool hit_vertex = false;
    Germ end;  // germ at the end vertex pointing back along the trace
};

/// Follows the straight ray from a vertex germ until it reaches a vertex or
/// its developed length exceeds max_length (then hit_vertex is false).
Trace trace_from_germ(const TranslationSurface& s, const Germ& g, double max_length);
/// Same from a point of face f; the point must be interior or on an edge with
/// dir pointing into the face.
Trace trace_from_point(const TranslationSurface& s, int face, const Vec2& p, const Vec2& dir,
                       double max_length, int max_crossings = -1);

struct Cylinder {
    Vec2 holonomy;           // core curve, parallel to the direction
    CycloReal area;
    CycloReal modulus;       // circumference / height
    CycloReal height_sq;
    CycloReal circumference_sq;
    std::vector<std::string> core_word;  // labels crossed by the bottom boundary chain
    int boundary_connections = 0;
};

struct CylinderDecomposition {
    CoSlope direction;
    std::vector<Cylinder> cylinders;
};

/// Cylinders in a periodic direction; throws std::runtime_error when a
/// separatrix does not close up within 10^4 * l_m.
CylinderDecomposition cylinder_decomposition(const TranslationSurface& s, const CoSlope& d);

struct SectorDiagram {
    int sector = 0;
    std::vector<int> sigma;  // path order, sigma[0] is sandwiched
    int sandwiched() const { return sigma[0]; }
    int sandwiching() const { return sigma[1]; }
    std::string to_string() const;
};

/// Index of the sector (k pi/n, (k+1) pi/n) containing the direction;
/// throws on sector boundaries.
int sector_index(int n, const Vec2& dir);
SectorDiagram sector_diagram(int n, const CoSlope& d);
SectorDiagram sector_diagram_for(int n, const Vec2& dir);
/// Side label index (the k in e_k) for edge k of the n-gon.
int ngon_side_label(int n, int edge);

}  // namespace kvol
