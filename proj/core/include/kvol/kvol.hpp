#pragma once

#include "kvol/hyperbolic.hpp"
#include "kvol/intersect.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvol {

/// Raised for inputs outside what a method covers (closed formula for n = 2 mod 4).
class UnsupportedCase : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonically ordered pair of distinct co-slopes, infinity greatest.
struct DirectionPair {
    CoSlope d, e;
    static DirectionPair of(const CoSlope& a, const CoSlope& b);
};
bool coslope_less(const CoSlope& a, const CoSlope& b);

struct CurveSearch {
    int max_components = 2;
    /// Allow a singularity to be visited twice (figure eights). Such unions never
    /// raise the ratio maximum, so the maximum searches leave this off.
    bool allow_revisits = false;
};

/// Closed curves built from enumerated saddle connections.
struct CurveSet {
    std::vector<ClosedCurve> curves;
    std::vector<std::vector<long>> chains;
    std::vector<Vec2> holonomy;
    std::vector<double> length;
    /// Squared length, exact when it lies in the field (always for one component).
    std::vector<std::optional<CycloReal>> length_sq;
};

/// Cyclic chains of distinct connections, either orientation, total length <= L.
CurveSet closed_curves(const TranslationSurface& s, const std::vector<SaddleConnection>& conns, double L,
                       const CurveSearch& opt = {});

struct RatioPair {
    std::size_t i = 0, j = 0;
    long intersection = 0;
};

struct RatioMax {
    double ratio = 0;
    std::optional<CycloReal> ratio_sq;  // exact when every maximizer has exact lengths
    std::vector<RatioPair> maximizers;  // ties, i < j
    std::size_t pairs = 0;
};

/// max |Int| / (l l) over unordered pairs of distinct curves.
RatioMax max_ratio(const CurveSet& cs, const IntersectionForm& form);

/// Sign of Int^2 / (l_i^2 l_j^2) - bound_sq; nullopt when lengths are not in
/// the field and the float gap is below 1e-12 relative.
std::optional<int> compare_ratio_sq(const CurveSet& cs, std::size_t i, std::size_t j, long intersection,
                                    const CycloReal& bound_sq);

struct DirectionK {
    CycloReal value;  // max |Int| / |wedge|
    ClosedCurve a, b;
    long intersection = 0;
    CycloReal wedge;
    std::size_t pairs = 0;
};

/// Lower bound for K(d, e) from the curves in the two directions up to length L.
DirectionK K_of_directions(const TranslationSurface& s, const CoSlope& d, const CoSlope& e, double L,
                           const CurveSearch& opt = {});
/// Same over an already enumerated set.
DirectionK K_of_directions(const TranslationSurface& s, const IntersectionForm& form,
                           const std::vector<SaddleConnection>& conns, const CoSlope& d, const CoSlope& e,
                           const CurveSearch& opt = {});

enum class KvolMode { Bruteforce, ClosedFormula };
std::string mode_name(KvolMode m);

struct KvolReport {
    KvolMode mode = KvolMode::Bruteforce;
    int n = 0;
    double value = 0;
    std::optional<CycloReal> exact_ratio;     // max ratio, when it lies in the field
    std::optional<CycloReal> exact_ratio_sq;  // its square
    std::optional<CycloReal> exact_value_sq;  // (Vol * ratio)^2
    std::optional<CycloReal> K0;              // closed formula constant
    CycloReal volume;
    std::vector<std::pair<ClosedCurve, ClosedCurve>> witnesses;
    std::vector<long> witness_intersections;
    HPoint point{0, 1};
    double distance = 0;
    double nearest_k = 0;
    HGeodesic nearest;
    double L = 0;
    int K_max = 0, W = 0;
    bool converged = true;
    std::size_t curves = 0, pairs = 0;
};

/// Vol(M S_n) times the best ratio over closed curves of M S_n up to length L.
KvolReport kvol_bruteforce(const Mat2& M, int n, double L, const CurveSearch& opt = {});

/// Vol(S_n) / (Phi l_m^2); n = 0 mod 4 only.
CycloReal kvol_K0(int n);
/// K0 / cosh(distance from z to the orbit of G_max).
KvolReport kvol_closed_formula(int n, HPoint z, int K_max = 12, int W = 10);

struct GridSpec {
    double x_min = 0, y_min = 0;
    std::optional<double> x_max;  // default Phi / 2
    std::optional<double> y_max;  // default 2
    int resolution = 60;
    int K_max = 12, W = 10;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct GridCell {
    int row = 0, col = 0;  // row counts up in y
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double x = 0, y = 0;  // center, where the formula is evaluated
    double value = 0, distance = 0;
    HGeodesic nearest;
    bool converged = false;
};

/// Does the closed rectangle meet the fundamental domain T_n.
bool cell_meets_domain(int n, double x0, double x1, double y0, double y1);

/// Closed formula on the cells of a resolution x resolution grid that meet
/// T_n, in row order.
std::vector<GridCell> kvol_grid(int n, const GridSpec& spec);

struct NgonBoundReport {
    int n = 0;
    double L = 0;
    std::size_t curves = 0, pairs = 0, violations = 0, undecided = 0;
    std::vector<RatioPair> equalities;
    std::size_t side_pairs = 0;  // pairs of distinct sides in range
    bool equalities_are_side_pairs = false;
    bool pass = false;
};

/// Int / (l l) <= 1 / l0^2 on X_n over all curve pairs up to L.
NgonBoundReport verify_ngon_bound(int n, double L);

struct ParallelReport {
    std::size_t connections = 0, curves = 0, pairs = 0, nonzero = 0;
    long max_abs = 0;
    bool pass = false;
};

/// All closed unions of at most two connections in direction d (figure eights
/// included) have pairwise algebraic intersection 0. L defaults to the longest
/// cylinder circumference. Throws std::invalid_argument for non-periodic d.
ParallelReport check_parallel_criterion(const TranslationSurface& s, const CoSlope& d,
                                        std::optional<double> L = std::nullopt);

struct BoundReport {
    double ratio = 0;
    std::optional<CycloReal> ratio_sq;
    CycloReal bound;  // 1 / (Phi l_m^2)
    std::size_t curves = 0, pairs = 0, violations = 0, undecided = 0;
    std::vector<std::pair<ClosedCurve, ClosedCurve>> witnesses;
    bool pass = false;
};

/// n = 2 mod 4: best ratio on M S_n up to L against 1 / (Phi l_m^2).
BoundReport bound_4m2(int n, const Mat2& M, double L);

struct ConjectureReport {
    double best_ratio = 0;
    std::optional<CycloReal> best_ratio_sq;
    bool equals_half = false;         // best == 1 / (2 l0^2)
    bool strictly_below_one = false;  // best < 1 / l0^2
    bool double_pair_found = false;     // two-side curves meeting twice, in range
    bool double_pair_is_best = false;
    std::vector<std::pair<ClosedCurve, ClosedCurve>> witnesses;
    std::size_t curves = 0, pairs = 0;
};

/// n = 2 mod 4: best ratio on X_n over curves up to L.
ConjectureReport explore_conjecture(int n, double L, const CurveSearch& opt = {});

}  // namespace kvol
