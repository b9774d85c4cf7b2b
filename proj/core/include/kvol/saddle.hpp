#pragma once

#include "kvol/surface.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvol {

struct SaddleConnection {
    Vec2 holonomy;
    std::array<double, 2> hol_d{};
    CycloReal length_sq;
    double length = 0;
    Germ start;  // outgoing germ at the start vertex (direction = holonomy)
    Germ end;    // germ at the end vertex pointing back (direction = -holonomy)
    int start_class = 0;
    int end_class = 0;
    std::vector<int> faces;      // faces visited in order
    std::vector<EdgeRef> exits;  // half edges crossed, as exited from faces[i]
    int first_vertex = 0;        // vertex of faces.front() where it starts
    int last_vertex = 0;         // vertex of faces.back() where it ends

    bool closed() const { return start_class == end_class; }
    /// (edge pair id, +1/-1) per crossing.
    std::vector<std::pair<int, int>> crossings(const TranslationSurface& s) const;
    /// Same connection traversed backwards.
    SaddleConnection reversed(const TranslationSurface& s) const;
};

struct EnumerationOptions {
    std::size_t cap = 1000000;
    unsigned threads = 0;  // 0: hardware concurrency
};

class EnumerationCapExceeded : public std::runtime_error {
public:
    explicit EnumerationCapExceeded(std::size_t cap)
        : std::runtime_error("saddle connection count exceeds the cap of " + std::to_string(cap)) {}
};

/// All saddle connections with |holonomy| <= L, one per geometric connection,
/// in canonical orientation, sorted by squared length then holonomy.
std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& s, const CycloReal& L,
                                                           const EnumerationOptions& opt = {});
/// Float bound; compared exactly as the rational value of the double.
std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& s, double L,
                                                           const EnumerationOptions& opt = {});

/// Connections whose holonomy is parallel to the co-slope (exact test).
std::vector<SaddleConnection> filter_direction(const std::vector<SaddleConnection>& scs, const CoSlope& d);

Vec2 transform(const Mat2& m, const SaddleConnection& sc);
CoSlope direction_of(const SaddleConnection& sc);

/// Developed pieces with exact endpoints in face coordinates; params[i] is the
/// holonomy parameter in [0, 1] where piece i ends.
struct DevelopedPath {
    std::vector<Piece> pieces;
    std::vector<CycloReal> params;
};
DevelopedPath develop(const TranslationSurface& s, const SaddleConnection& sc);

/// Float pieces: per face, endpoints as doubles.
struct PieceD {
    int face = 0;
    std::array<double, 2> from{}, to{};
};
std::vector<PieceD> develop_d(const TranslationSurface& s, const SaddleConnection& sc);

/// Subdivision of a saddle connection on the n-gon by its crossings with
/// non-sandwiched sides.
struct Segment {
    enum class Kind { Whole, Initial, Terminal, Sandwiched, NonSandwiched };
    Kind kind = Kind::Whole;
    CycloReal t0, t1;  // holonomy parameters
    CycloReal length_sq;
    int from_label = -1;  // side label at the start cut, -1 at a vertex
    int via_label = -1;   // sandwiched side for sandwiched segments
    int to_label = -1;
};
std::string kind_name(Segment::Kind k);
std::vector<Segment> subdivide(const TranslationSurface& ngon, const SaddleConnection& sc);

}  // namespace kvol
