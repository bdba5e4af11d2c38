#pragma once

// Named-curve registry. toy17 is constructed directly; the standard-strength
// curves are bundled as parameter-file text and go through the same parser
// and validation as user-supplied files.

#include <string>
#include <vector>

#include "ecbs/codec.hpp"
#include "ecbs/curve.hpp"
#include "ecbs/errors.hpp"

namespace ecbs {

namespace detail {

// SEC 2 prime-field curves, uncompressed generator split into gx/gy.
inline constexpr const char* secp160r1_file = R"(# secp160r1 (SEC 2)
name = secp160r1
q  = 0xffffffffffffffffffffffffffffffff7fffffff
a  = 0xffffffffffffffffffffffffffffffff7ffffffc
b  = 0x1c97befc54bd7a8b65acf89f81d4d4adc565fa45
gx = 0x4a96b5688ef573284664698968c38bb913cbfc82
gy = 0x23a628553168947d59dcc912042351377ac5fb32
n  = 0x0100000000000000000001f4c8f927aed3ca752257
h  = 1
)";

inline constexpr const char* secp256k1_file = R"(# secp256k1 (SEC 2)
name = secp256k1
q  = 0xfffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f
a  = 0
b  = 7
gx = 0x79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798
gy = 0x483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8
n  = 0xfffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141
h  = 1
)";

inline const std::vector<CurveParams>& registry_curves() {
    static const std::vector<CurveParams> curves = [] {
        std::vector<CurveParams> out;
        out.push_back(toy17());
        auto report = validate_params(out.back(), /*test_mode=*/true);
        if (!report.all_pass())
            throw CurveError("registry: toy17 failed validation: " + report.failures());
        out.push_back(parse_curve_file(secp160r1_file));
        out.push_back(parse_curve_file(secp256k1_file));
        return out;
    }();
    return curves;
}

}  // namespace detail

inline std::vector<std::string> registry_names() {
    std::vector<std::string> names;
    for (const auto& curve : detail::registry_curves())
        names.push_back(curve.name);
    return names;
}

inline const CurveParams& registry_lookup(const std::string& name) {
    for (const auto& curve : detail::registry_curves())
        if (curve.name == name)
            return curve;
    std::string known;
    for (const auto& n : registry_names())
        known += (known.empty() ? "" : ", ") + n;
    throw CurveError("registry: unknown curve '" + name + "' (known: " + known + ")");
}

}  // namespace ecbs
