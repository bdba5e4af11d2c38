#pragma once

// Short Weierstrass curve group law over F_q: y^2 = x^3 + ax + b mod q,
// affine coordinates plus the point at infinity O. Scalar multiplication is
// plain left-to-right double-and-add; nothing here is constant-time.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecbs/errors.hpp"
#include "ecbs/field.hpp"

namespace ecbs {

// Affine point or the identity O.
class Point {
public:
    Point(ModInt x, ModInt y) : coords_(std::in_place, std::move(x), std::move(y)) {}

    static Point infinity() { return Point(); }

    bool is_infinity() const { return !coords_.has_value(); }

    const ModInt& x() const {
        if (is_infinity())
            throw std::logic_error("Point: infinity has no coordinates");
        return coords_->first;
    }
    const ModInt& y() const {
        if (is_infinity())
            throw std::logic_error("Point: infinity has no coordinates");
        return coords_->second;
    }

    friend bool operator==(const Point& p, const Point& r) { return p.coords_ == r.coords_; }
    friend bool operator!=(const Point& p, const Point& r) { return !(p == r); }

private:
    Point() = default;
    std::optional<std::pair<ModInt, ModInt>> coords_;
};

// Domain parameters (q, a, b, G, n, h). q and n are prime; G generates a
// subgroup of prime order n.
struct CurveParams {
    std::string name;
    BigInt q;  // field modulus
    BigInt a;  // curve coefficient, reduced mod q
    BigInt b;  // curve coefficient, reduced mod q
    Point G;   // base point
    BigInt n;  // order of G
    BigInt h;  // cofactor

    ModInt fe(const BigInt& v) const { return ModInt(v, q); }      // field element mod q
    ModInt scalar(const BigInt& v) const { return ModInt(v, n); }  // scalar mod n
};

inline bool is_on_curve(const CurveParams& E, const Point& p) {
    if (p.is_infinity())
        return true;
    if (p.x().modulus() != E.q || p.y().modulus() != E.q)
        return false;
    const ModInt& x = p.x();
    const ModInt& y = p.y();
    return y * y == x * x * x + E.fe(E.a) * x + E.fe(E.b);
}

inline Point negate(const CurveParams&, const Point& p) {
    if (p.is_infinity())
        return p;
    return Point(p.x(), -p.y());
}

// 2P. A point with y = 0 has a vertical tangent, so 2P = O there.
inline Point double_point(const CurveParams& E, const Point& p) {
    if (p.is_infinity())
        return p;
    if (p.y().is_zero())
        return Point::infinity();
    // s = (3x^2 + a) / (2y)
    ModInt s = (E.fe(3) * p.x() * p.x() + E.fe(E.a)) * mod_inv(E.fe(2) * p.y());
    ModInt xr = s * s - E.fe(2) * p.x();
    ModInt yr = -p.y() + s * (p.x() - xr);
    return Point(std::move(xr), std::move(yr));
}

inline Point add(const CurveParams& E, const Point& p, const Point& r) {
    if (p.is_infinity())
        return r;
    if (r.is_infinity())
        return p;
    if (p.x() == r.x()) {
        // Same x: either r = -p (sum is O, also covers the y = 0 case) or p = r.
        if (mod_add(p.y(), r.y()).is_zero())
            return Point::infinity();
        return double_point(E, p);
    }
    // s = (y_p - y_r) / (x_p - x_r)
    ModInt s = (p.y() - r.y()) * mod_inv(p.x() - r.x());
    ModInt xr = s * s - p.x() - r.x();
    ModInt yr = -p.y() + s * (p.x() - xr);
    return Point(std::move(xr), std::move(yr));
}

// k-fold sum of p, k >= 0. Left-to-right double-and-add.
inline Point scalar_mul(const CurveParams& E, const BigInt& k, const Point& p) {
    if (k < 0)
        throw std::invalid_argument("scalar_mul: negative scalar");
    if (k == 0 || p.is_infinity())
        return Point::infinity();
    Point acc = Point::infinity();
    for (auto i = static_cast<std::ptrdiff_t>(bit_length(k)) - 1; i >= 0; --i) {
        acc = double_point(E, acc);
        if (boost::multiprecision::bit_test(k, static_cast<unsigned>(i)))
            acc = add(E, acc, p);
    }
    return acc;
}

// Every affine solution of the curve equation plus O, by brute force over x.
// Only for small test curves; refuses q >= 2^16.
inline std::vector<Point> enumerate_points(const CurveParams& E) {
    if (E.q >= 65536)
        throw CurveError("enumerate_points: q too large for enumeration (needs q < 2^16)");
    const auto q = E.q.convert_to<std::uint64_t>();
    const auto a = E.a.convert_to<std::uint64_t>() % q;
    const auto b = E.b.convert_to<std::uint64_t>() % q;

    std::vector<std::vector<std::uint32_t>> roots(q);  // square -> its roots
    for (std::uint64_t y = 0; y < q; ++y)
        roots[(y * y) % q].push_back(static_cast<std::uint32_t>(y));

    std::vector<Point> points;
    points.push_back(Point::infinity());
    for (std::uint64_t x = 0; x < q; ++x) {
        std::uint64_t rhs = (((x * x) % q) * x + a * x + b) % q;
        for (std::uint32_t y : roots[rhs])
            points.emplace_back(E.fe(x), E.fe(y));
    }
    return points;
}

inline bool is_probably_prime(const BigInt& v) {
    if (v < 2)
        return false;
    return mpz_probab_prime_p(v.backend().data(), 32) != 0;
}

struct ValidationCheck {
    std::string name;
    bool pass;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass)
                return false;
        return true;
    }
    std::string failures() const {
        std::string out;
        for (const auto& c : checks)
            if (!c.pass) {
                if (!out.empty())
                    out += "; ";
                out += c.name;
                if (!c.detail.empty())
                    out += " (" + c.detail + ")";
            }
        return out;
    }
};

// Checks every CurveParams invariant. Failures are reported, not thrown.
// test_mode relaxes the minimum-strength requirement on n so that small
// curves can be used for exhaustive testing.
inline ValidationReport validate_params(const CurveParams& E, bool test_mode = false) {
    ValidationReport report;
    auto check = [&](std::string name, bool pass, std::string detail = "") {
        report.checks.push_back({std::move(name), pass, std::move(detail)});
        return pass;
    };

    check("q is prime", E.q > 3 && is_probably_prime(E.q),
          E.q > 3 ? "" : "q must exceed 3");
    check("coefficients reduced mod q", E.a >= 0 && E.a < E.q && E.b >= 0 && E.b < E.q);
    // 4a^3 + 27b^2 != 0 mod q
    check("curve is non-singular", (4 * E.a * E.a * E.a + 27 * E.b * E.b) % E.q != 0);
    check("base point is not infinity", !E.G.is_infinity());
    const bool g_ok = check("base point is on the curve", is_on_curve(E, E.G));
    check("n is prime", is_probably_prime(E.n));
    if (g_ok && !E.G.is_infinity())
        check("base point has order n", scalar_mul(E, E.n, E.G).is_infinity());
    else
        check("base point has order n", false, "skipped: base point invalid");
    check("cofactor is positive", E.h >= 1);
    if (test_mode)
        check("group order strength", true, "relaxed: test mode");
    else
        check("group order strength", E.n > (BigInt(1) << 160), "n must exceed 2^160");
    return report;
}

// Tiny bundled test curve: y^2 = x^3 + 2x + 2 over F_17, |<G>| = 19.
// Small enough for the exhaustive oracle; far too small for any real use.
inline CurveParams toy17() {
    BigInt q = 17;
    return CurveParams{"toy17", q, 2, 2, Point(ModInt(5, q), ModInt(1, q)), 19, 1};
}

}  // namespace ecbs
