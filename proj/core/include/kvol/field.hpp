#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kvol {

/// Monic integer polynomial, coefficients stored from low to high degree.
struct MinPoly {
    int n = 0;
    std::vector<mpz_class> coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    std::string to_string() const;
};

/// Minimal polynomial of 2cos(pi/n) over Q.
MinPoly minimal_polynomial(int n);

/// Integer coefficients of the m-th cyclotomic polynomial, low to high.
std::vector<mpz_class> cyclotomic_polynomial(int m);

class FieldContext;

/// Shared per-n data (minimal polynomial, float images of Phi).
/// Contexts are created once and live for the whole process.
const FieldContext& field_context(int n);

/// Exact element of Q(Phi), Phi = 2cos(pi/n), stored as a reduced residue
/// modulo the minimal polynomial: value = sum num[i] Phi^i / den.
class CycloReal {
public:
    CycloReal() = default;

    static CycloReal zero(int n);
    static CycloReal one(int n);
    static CycloReal phi(int n);
    static CycloReal integer(int n, long v);
    static CycloReal rational(int n, const mpq_class& q);
    static CycloReal from_coeffs(int n, const std::vector<mpq_class>& coeffs);

    bool valid() const { return ctx_ != nullptr; }
    int n() const;
    int degree() const;
    const FieldContext& context() const { return *ctx_; }

    /// Rational coefficients in the power basis 1, Phi, Phi^2, ...
    std::vector<mpq_class> coeffs() const;
    const std::vector<mpz_class>& numerators() const { return num_; }
    const mpz_class& denominator() const { return den_; }

    bool is_zero() const;
    bool is_rational() const;
    std::optional<mpq_class> as_rational() const;
    /// -1, 0 or +1, decided exactly.
    int sign() const;
    double to_double() const;

    CycloReal operator-() const;
    CycloReal& operator+=(const CycloReal& o);
    CycloReal& operator-=(const CycloReal& o);
    CycloReal& operator*=(const CycloReal& o);
    CycloReal& operator/=(const CycloReal& o);
    CycloReal& operator*=(long k);

    CycloReal inverse() const;
    CycloReal pow(unsigned e) const;
    /// Exact square root inside the field when one exists (non-negative root).
    std::optional<CycloReal> sqrt() const;

    bool operator==(const CycloReal& o) const;
    bool operator!=(const CycloReal& o) const { return !(*this == o); }

    /// Human readable form, e.g. "1/2*Phi^3 - 3/2*Phi".
    std::string to_string() const;

private:
    friend class FieldContext;
    friend CycloReal operator*(const CycloReal&, const CycloReal&);
    void normalize();
    void require_same(const CycloReal& o) const;

    const FieldContext* ctx_ = nullptr;
    std::vector<mpz_class> num_;
    mpz_class den_ = 1;
};

CycloReal operator+(CycloReal a, const CycloReal& b);
CycloReal operator-(CycloReal a, const CycloReal& b);
CycloReal operator*(const CycloReal& a, const CycloReal& b);
CycloReal operator/(CycloReal a, const CycloReal& b);
CycloReal operator*(CycloReal a, long k);
CycloReal operator*(long k, CycloReal a);
CycloReal operator+(CycloReal a, long k);
CycloReal operator-(CycloReal a, long k);
inline CycloReal operator+(long k, CycloReal a) { return std::move(a) + k; }
inline CycloReal operator-(long k, const CycloReal& a) { return -a + k; }

/// Sign of a - b.
int compare(const CycloReal& a, const CycloReal& b);
inline bool operator<(const CycloReal& a, const CycloReal& b) { return compare(a, b) < 0; }
inline bool operator>(const CycloReal& a, const CycloReal& b) { return compare(a, b) > 0; }
inline bool operator<=(const CycloReal& a, const CycloReal& b) { return compare(a, b) <= 0; }
inline bool operator>=(const CycloReal& a, const CycloReal& b) { return compare(a, b) >= 0; }

enum class Trig { Sin, Cos };

/// sin(k pi/n) or cos(k pi/n) as an exact element of Q(2cos(pi/n)); n even.
CycloReal trig_value(int n, Trig kind, long k);

/// Interval enclosure [lo, hi] of the value, computed at the given precision.
struct Enclosure {
    double lo;
    double hi;
};
Enclosure enclose(const CycloReal& a, int bits);

/// Precision ladder used by sign(): 53, 113, 237, 489, ...
int ladder_bits(int step);
/// First rung of the ladder; KVOL_PRECISION_BITS overrides the default 53.
int ladder_start_bits();

/// Real embeddings Phi -> 2cos(j pi/n), j odd and coprime to n (j = 1 first).
std::vector<int> embedding_indices(int n);
double embed(const CycloReal& a, int j);

class FieldContext {
public:
    explicit FieldContext(int n);

    int n() const { return n_; }
    int degree() const { return poly_.degree(); }
    const MinPoly& minpoly() const { return poly_; }
    /// Phi^k as double for k < 2*degree, used by float filters.
    double phi_power(int k) const { return phi_pow_[static_cast<size_t>(k)]; }
    double phi() const { return phi_pow_[1]; }

    /// Reduce a coefficient vector of length up to 2*degree-1 in place.
    void reduce(std::vector<mpz_class>& c) const;

private:
    int n_;
    MinPoly poly_;
    std::vector<double> phi_pow_;
};

}  // namespace kvol
