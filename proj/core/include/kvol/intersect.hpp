#pragma once

#include "kvol/saddle.hpp"

#include <optional>
#include <vector>

namespace kvol {

/// Cyclic chain of oriented saddle connections, the end point of each being
/// the start point of the next.
struct ClosedCurve {
    std::vector<SaddleConnection> components;

    static ClosedCurve of(const SaddleConnection& sc) { return {{sc}}; }
    /// Throws std::invalid_argument when endpoints do not match.
    void validate() const;
    double length() const;
};

/// Saddle connection running along a face edge, oriented as the edge.
SaddleConnection edge_saddle_connection(const TranslationSurface& s, EdgeRef e);

struct IntersectionWitness {
    bool singular = false;
    int face = -1;  // face of an interior crossing
    int cls = -1;   // singularity class of a singular contribution
    std::array<double, 2> point{};
    int sign = 0;
};

struct IntersectionReport {
    long total = 0;
    long interior = 0;
    long singular = 0;
    std::vector<IntersectionWitness> witnesses;
};

/// Side to which the first curve is pushed off at shared singularities.
enum class Perturbation { Left, Right };

/// Algebraic intersection number, counted geometrically.
IntersectionReport intersect(const TranslationSurface& s, const ClosedCurve& g, const ClosedCurve& d,
                             Perturbation side = Perturbation::Left);
long intersection_number(const TranslationSurface& s, const ClosedCurve& g, const ClosedCurve& d);

/// Integer edge-pair vector of a closed curve (representative halves count +1).
std::vector<long> homology_class(const TranslationSurface& s, const ClosedCurve& g);
/// Contribution of one component; homology_class is the sum over components.
std::vector<long> edge_chain(const TranslationSurface& s, const SaddleConnection& sc);

struct IntersectionForm {
    std::vector<std::string> basis;        // labels of the basis edge pairs
    std::vector<int> basis_pairs;          // edge pair ids forming the basis
    std::vector<std::vector<long>> matrix;  // form on the basis
    /// Form on all edge pairs: Int(c, d) = c^T W d for closed edge chains c, d.
    std::vector<std::vector<long>> W;

    long evaluate(const std::vector<long>& c, const std::vector<long>& d) const;
};

/// Edge pairs of a one-vertex complex form the basis; otherwise the pairs
/// outside a spanning tree of the vertex graph, each closed up through the tree.
IntersectionForm intersection_form(const TranslationSurface& s);

/// Integer determinant (Bareiss).
long determinant(const std::vector<std::vector<long>>& m);

}  // namespace kvol
