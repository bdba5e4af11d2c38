#pragma once

// Operation tallies for the cost model. One OpCount covers one protocol run
// (or one published reference figure) at a single operand size class; the
// classes never mix within a tally.

#include <cstdint>
#include <stdexcept>

namespace ecbs {

enum class SizeClass { bits160, bits1024 };

struct OpCount {
    SizeClass size_class = SizeClass::bits160;
    std::uint64_t ec_mul = 0;  // curve scalar multiplications
    std::uint64_t ec_add = 0;  // curve point additions
    std::uint64_t mul = 0;     // modular multiplications
    std::uint64_t add = 0;     // modular additions
    std::uint64_t inv = 0;     // modular inversions
    std::uint64_t exp = 0;     // modular exponentiations

    OpCount& operator+=(const OpCount& other) {
        if (size_class != other.size_class)
            throw std::invalid_argument("OpCount: size class mismatch");
        ec_mul += other.ec_mul;
        ec_add += other.ec_add;
        mul += other.mul;
        add += other.add;
        inv += other.inv;
        exp += other.exp;
        return *this;
    }

    friend bool operator==(const OpCount&, const OpCount&) = default;
};

}  // namespace ecbs
