#pragma once

// Modular integer arithmetic over arbitrary-precision values. Shared by the
// coordinate field F_q and the scalar ring mod n.
//
// Nothing here is constant-time. This library is a reference implementation;
// do not use it where timing side channels matter.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/gmp.hpp>

namespace ecbs {

using BigInt = boost::multiprecision::mpz_int;

// Number of bits in the minimal binary representation (0 for value 0).
inline std::size_t bit_length(const BigInt& v) {
    return v == 0 ? 0 : static_cast<std::size_t>(boost::multiprecision::msb(v)) + 1;
}

// A residue together with its modulus. Values are always fully reduced to
// [0, modulus). Binary operations require identical moduli; mixing residues
// from different rings is a programming error and throws.
class ModInt {
public:
    ModInt(BigInt value, BigInt modulus)
        : value_(std::move(value)), modulus_(std::move(modulus)) {
        if (modulus_ < 2)
            throw std::invalid_argument("ModInt: modulus must be >= 2");
        value_ %= modulus_;
        if (value_ < 0)
            value_ += modulus_;
    }

    const BigInt& value() const { return value_; }
    const BigInt& modulus() const { return modulus_; }
    bool is_zero() const { return value_ == 0; }

    friend bool operator==(const ModInt& a, const ModInt& b) {
        return a.value_ == b.value_ && a.modulus_ == b.modulus_;
    }
    friend bool operator!=(const ModInt& a, const ModInt& b) { return !(a == b); }

private:
    BigInt value_;
    BigInt modulus_;
};

namespace detail {
inline void require_same_modulus(const ModInt& a, const ModInt& b) {
    if (a.modulus() != b.modulus())
        throw std::invalid_argument("ModInt: modulus mismatch (" + a.modulus().str() +
                                    " vs " + b.modulus().str() + ")");
}
}  // namespace detail

inline ModInt mod_add(const ModInt& a, const ModInt& b) {
    detail::require_same_modulus(a, b);
    return ModInt(a.value() + b.value(), a.modulus());
}

inline ModInt mod_sub(const ModInt& a, const ModInt& b) {
    detail::require_same_modulus(a, b);
    return ModInt(a.value() - b.value(), a.modulus());
}

inline ModInt mod_mul(const ModInt& a, const ModInt& b) {
    detail::require_same_modulus(a, b);
    return ModInt(a.value() * b.value(), a.modulus());
}

inline ModInt mod_neg(const ModInt& a) {
    return ModInt(-a.value(), a.modulus());
}

// Extended-Euclidean multiplicative inverse. Works for any value coprime to
// the modulus; throws for zero or non-invertible values.
inline ModInt mod_inv(const ModInt& a) {
    if (a.is_zero())
        throw std::domain_error("mod_inv: zero has no inverse");
    BigInt r;
    if (mpz_invert(r.backend().data(), a.value().backend().data(),
                   a.modulus().backend().data()) == 0)
        throw std::domain_error("mod_inv: value " + a.value().str() +
                                " is not invertible mod " + a.modulus().str());
    return ModInt(std::move(r), a.modulus());
}

// a^e mod modulus in O(log e) multiplications. e >= 0.
inline ModInt mod_pow(const ModInt& a, const BigInt& e) {
    if (e < 0)
        throw std::invalid_argument("mod_pow: negative exponent");
    if (e == 0)
        return ModInt(1, a.modulus());
    return ModInt(boost::multiprecision::powm(a.value(), e, a.modulus()), a.modulus());
}

// Fermat-route inverse, a^(p-2). Valid only for prime moduli; kept as an
// independent path so the two inversion routes can check each other.
inline ModInt mod_inv_fermat(const ModInt& a) {
    if (a.is_zero())
        throw std::domain_error("mod_inv_fermat: zero has no inverse");
    return mod_pow(a, a.modulus() - 2);
}

// Big-endian unsigned interpretation of a byte string. The empty string is 0.
inline BigInt bigint_from_bytes(std::span<const std::uint8_t> bytes) {
    BigInt v = 0;
    if (!bytes.empty())
        mpz_import(v.backend().data(), bytes.size(), 1, 1, 0, 0, bytes.data());
    return v;
}

// Same interpretation, reduced mod modulus.
inline ModInt reduce_from_bytes(std::span<const std::uint8_t> bytes, const BigInt& modulus) {
    return ModInt(bigint_from_bytes(bytes), modulus);
}

// Operator sugar over the named operations.
inline ModInt operator+(const ModInt& a, const ModInt& b) { return mod_add(a, b); }
inline ModInt operator-(const ModInt& a, const ModInt& b) { return mod_sub(a, b); }
inline ModInt operator*(const ModInt& a, const ModInt& b) { return mod_mul(a, b); }
inline ModInt operator-(const ModInt& a) { return mod_neg(a); }

}  // namespace ecbs
