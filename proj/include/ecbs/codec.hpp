#pragma once

// Bit-exact serialization: fixed-width lowercase-hex scalars, uncompressed
// point encoding (0x00 for O, 0x04 || x || y otherwise), the line-based
// key-value envelope carrying protocol messages, and the curve parameter
// file grammar. Canonical envelope form is lowercase hex with keys emitted
// in sorted order, so serialize -> parse -> serialize is byte-identical.

#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecbs/curve.hpp"
#include "ecbs/errors.hpp"
#include "ecbs/field.hpp"
#include "ecbs/protocol.hpp"

namespace ecbs {

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

// Strict inverse of to_hex: even length, lowercase digits only.
inline std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw ParseError("from_hex: odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        throw ParseError(std::string("from_hex: bad hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

// Byte width of a serialized value mod modulus: ceil(bits(modulus)/8).
inline std::size_t scalar_width(const BigInt& modulus) {
    return (bit_length(modulus) + 7) / 8;
}

// Big-endian, zero-padded to scalar_width(modulus) bytes.
inline std::vector<std::uint8_t> scalar_to_bytes(const ModInt& v) {
    std::vector<std::uint8_t> out(scalar_width(v.modulus()), 0);
    const std::size_t used = (bit_length(v.value()) + 7) / 8;
    if (used > 0) {
        std::size_t count = 0;
        mpz_export(out.data() + (out.size() - used), &count, 1, 1, 0, 0,
                   v.value().backend().data());
    }
    return out;
}

inline std::string encode_scalar(const ModInt& v) {
    return to_hex(scalar_to_bytes(v));
}

// Exact-width lowercase hex, value < modulus.
inline ModInt decode_scalar(std::string_view hex, const BigInt& modulus) {
    if (hex.size() != 2 * scalar_width(modulus))
        throw ParseError("decode_scalar: expected " +
                         std::to_string(2 * scalar_width(modulus)) + " hex chars, got " +
                         std::to_string(hex.size()));
    BigInt v = bigint_from_bytes(from_hex(hex));
    if (v >= modulus)
        throw ParseError("decode_scalar: value overflows modulus");
    return ModInt(std::move(v), modulus);
}

// 0x00 alone for O; 0x04 || x || y with both coordinates padded to the field
// width otherwise.
inline std::vector<std::uint8_t> encode_point(const CurveParams& E, const Point& p) {
    if (p.is_infinity())
        return {0x00};
    if (p.x().modulus() != E.q)
        throw std::invalid_argument("encode_point: point does not belong to this curve");
    std::vector<std::uint8_t> out{0x04};
    auto xb = scalar_to_bytes(p.x());
    auto yb = scalar_to_bytes(p.y());
    out.insert(out.end(), xb.begin(), xb.end());
    out.insert(out.end(), yb.begin(), yb.end());
    return out;
}

// Rejects bad prefixes, bad lengths, out-of-range coordinates, and points
// that do not satisfy the curve equation.
inline Point decode_point(const CurveParams& E, std::span<const std::uint8_t> bytes) {
    if (bytes.empty())
        throw ParseError("decode_point: empty encoding");
    if (bytes[0] == 0x00) {
        if (bytes.size() != 1)
            throw ParseError("decode_point: infinity encoding must be a single byte");
        return Point::infinity();
    }
    if (bytes[0] != 0x04)
        throw ParseError("decode_point: unknown prefix byte");
    const std::size_t width = scalar_width(E.q);
    if (bytes.size() != 1 + 2 * width)
        throw ParseError("decode_point: expected " + std::to_string(1 + 2 * width) +
                         " bytes, got " + std::to_string(bytes.size()));
    BigInt x = bigint_from_bytes(bytes.subspan(1, width));
    BigInt y = bigint_from_bytes(bytes.subspan(1 + width, width));
    if (x >= E.q || y >= E.q)
        throw ParseError("decode_point: coordinate overflows field modulus");
    Point p(ModInt(std::move(x), E.q), ModInt(std::move(y), E.q));
    if (!is_on_curve(E, p))
        throw ParseError("decode_point: point is not on the curve");
    return p;
}

inline std::string encode_point_hex(const CurveParams& E, const Point& p) {
    return to_hex(encode_point(E, p));
}

inline Point decode_point_hex(const CurveParams& E, std::string_view hex) {
    return decode_point(E, from_hex(hex));
}

// ---------------------------------------------------------------------------
// Key-value envelopes.

// A tagged protocol message. `fields` holds every key except "kind".
struct ProtocolMessage {
    std::string kind;
    std::map<std::string, std::string> fields;

    friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

namespace detail {

inline bool valid_key(std::string_view key) {
    if (key.empty())
        return false;
    for (char c : key)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

inline bool valid_value(std::string_view value) {
    if (value.empty())
        return false;
    for (char c : value)
        if (c <= ' ' || c > '~' || c == '#')
            return false;
    return true;
}

// kind -> exact payload key set.
inline const std::map<std::string, std::set<std::string>, std::less<>>& message_schemas() {
    static const std::map<std::string, std::set<std::string>, std::less<>> schemas = [] {
        std::map<std::string, std::set<std::string>, std::less<>> s;
        s["pubkey"] = {"curve", "point"};
        s["privkey"] = {"curve", "d"};
        s["session"] = {"curve", "r"};
        s["session-secret"] = {"curve", "k", "consumed"};
        s["blinded"] = {"curve", "mprime"};
        s["share"] = {"curve", "sprime"};
        s["signature"] = {"curve", "x", "s"};
        s["factors"] = {"curve", "variant", "t1", "t2", "t3", "x", "m", "mprime"};
        std::set<std::string> report;
        for (const char* scheme : {"camenisch", "ecdlp_based", "generalized", "educed_i",
                                   "educed_ii", "educed_iii"})
            for (const char* col : {"cost", "ec_mul", "ec_add", "mul", "add", "inv", "exp"})
                report.insert(std::string(scheme) + "_" + col);
        s["report"] = std::move(report);
        return s;
    }();
    return schemas;
}

inline void check_schema(const ProtocolMessage& msg) {
    auto it = message_schemas().find(msg.kind);
    if (it == message_schemas().end())
        throw ParseError("envelope: unknown kind '" + msg.kind + "'");
    for (const auto& [key, value] : msg.fields) {
        if (!it->second.contains(key))
            throw ParseError("envelope: field '" + key + "' not allowed in kind '" +
                             msg.kind + "'");
        if (!valid_value(value))
            throw ParseError("envelope: bad value for field '" + key + "'");
    }
    for (const auto& key : it->second)
        if (!msg.fields.contains(key))
            throw ParseError("envelope: kind '" + msg.kind + "' is missing field '" + key +
                             "'");
}

}  // namespace detail

// Canonical form: one `key = value` line per entry, keys sorted, "kind"
// ordered among the payload keys.
inline std::string serialize_message(const ProtocolMessage& msg) {
    detail::check_schema(msg);
    std::map<std::string, std::string> lines(msg.fields.begin(), msg.fields.end());
    lines["kind"] = msg.kind;
    std::string out;
    for (const auto& [key, value] : lines) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

// Accepts blank lines and full-line `#` comments; rejects duplicate keys,
// unknown kinds, and any field set that is not exactly the kind's schema.
inline ProtocolMessage parse_message(std::string_view text) {
    std::map<std::string, std::string> entries;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        auto trim = [](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        };
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("envelope: line without '=': " + std::string(line));
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (!detail::valid_key(key))
            throw ParseError("envelope: bad key '" + key + "'");
        if (!detail::valid_value(value))
            throw ParseError("envelope: bad value for key '" + key + "'");
        if (!entries.emplace(key, value).second)
            throw ParseError("envelope: duplicate key '" + key + "'");
    }
    auto kind_it = entries.find("kind");
    if (kind_it == entries.end())
        throw ParseError("envelope: missing 'kind'");
    ProtocolMessage msg;
    msg.kind = kind_it->second;
    entries.erase(kind_it);
    msg.fields = std::move(entries);
    detail::check_schema(msg);
    return msg;
}

// ---------------------------------------------------------------------------
// Typed envelope builders/readers for the protocol flows.

namespace detail {
inline const std::string& expect_kind(const ProtocolMessage& msg, std::string_view kind) {
    if (msg.kind != kind)
        throw ParseError("envelope: expected kind '" + std::string(kind) + "', got '" +
                         msg.kind + "'");
    return msg.fields.at("curve");
}
inline void expect_curve(const ProtocolMessage& msg, std::string_view kind,
                         const CurveParams& E) {
    if (expect_kind(msg, kind) != E.name)
        throw ParseError("envelope: curve '" + msg.fields.at("curve") +
                         "' does not match expected '" + E.name + "'");
}
}  // namespace detail

inline ProtocolMessage make_pubkey_message(const CurveParams& E, const Point& Q) {
    return {"pubkey", {{"curve", E.name}, {"point", encode_point_hex(E, Q)}}};
}
inline Point read_pubkey_message(const CurveParams& E, const ProtocolMessage& msg) {
    detail::expect_curve(msg, "pubkey", E);
    return decode_point_hex(E, msg.fields.at("point"));
}

inline ProtocolMessage make_privkey_message(const CurveParams& E, const ModInt& d) {
    return {"privkey", {{"curve", E.name}, {"d", encode_scalar(d)}}};
}
inline ModInt read_privkey_message(const CurveParams& E, const ProtocolMessage& msg) {
    detail::expect_curve(msg, "privkey", E);
    ModInt d = decode_scalar(msg.fields.at("d"), E.n);
    if (d.is_zero())
        throw ParseError("envelope: zero private key");
    return d;
}

inline ProtocolMessage make_session_message(const CurveParams& E, const Point& R) {
    return {"session", {{"curve", E.name}, {"r", encode_point_hex(E, R)}}};
}
inline Point read_session_message(const CurveParams& E, const ProtocolMessage& msg) {
    detail::expect_curve(msg, "session", E);
    return decode_point_hex(E, msg.fields.at("r"));
}

inline ProtocolMessage make_session_secret_message(const CurveParams& E,
                                                   const SignerSession& session) {
    return {"session-secret",
            {{"curve", E.name},
             {"k", encode_scalar(session.k)},
             {"consumed", session.consumed ? "1" : "0"}}};
}
inline SignerSession read_session_secret_message(const CurveParams& E,
                                                 const ProtocolMessage& msg) {
    detail::expect_curve(msg, "session-secret", E);
    const std::string& consumed = msg.fields.at("consumed");
    if (consumed != "0" && consumed != "1")
        throw ParseError("envelope: consumed must be 0 or 1");
    ModInt k = decode_scalar(msg.fields.at("k"), E.n);
    try {
        return session_from_nonce(E, std::move(k), consumed == "1");
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("envelope: invalid session nonce: ") + e.what());
    }
}

inline ProtocolMessage make_blinded_message(const CurveParams& E, const BlindedMessage& mp) {
    return {"blinded", {{"curve", E.name}, {"mprime", encode_scalar(mp.value())}}};
}
inline BlindedMessage read_blinded_message(const CurveParams& E, const ProtocolMessage& msg) {
    detail::expect_curve(msg, "blinded", E);
    ModInt v = decode_scalar(msg.fields.at("mprime"), E.n);
    if (v.is_zero())
        throw ParseError("envelope: zero blinded message");
    return BlindedMessage(std::move(v));
}

inline ProtocolMessage make_share_message(const CurveParams& E,
                                          const BlindSignatureShare& share) {
    return {"share", {{"curve", E.name}, {"sprime", encode_scalar(share.value)}}};
}
inline BlindSignatureShare read_share_message(const CurveParams& E,
                                              const ProtocolMessage& msg) {
    detail::expect_curve(msg, "share", E);
    return BlindSignatureShare{decode_scalar(msg.fields.at("sprime"), E.n)};
}

inline ProtocolMessage make_signature_message(const CurveParams& E, const Signature& sig) {
    return {"signature",
            {{"curve", E.name},
             {"x", encode_point_hex(E, sig.X)},
             {"s", encode_scalar(sig.s)}}};
}
inline Signature read_signature_message(const CurveParams& E, const ProtocolMessage& msg) {
    detail::expect_curve(msg, "signature", E);
    return Signature{decode_point_hex(E, msg.fields.at("x")),
                     decode_scalar(msg.fields.at("s"), E.n)};
}

// Everything the requester must retain between blinding and extraction.
struct FactorsRecord {
    SchemeVariant variant;
    BlindingFactors factors;
    Point X;
    ModInt m;
    ModInt m_prime;
};

inline ProtocolMessage make_factors_message(const CurveParams& E, const FactorsRecord& rec) {
    return {"factors",
            {{"curve", E.name},
             {"variant", variant_name(rec.variant)},
             {"t1", encode_scalar(rec.factors.t1)},
             {"t2", encode_scalar(rec.factors.t2)},
             {"t3", encode_scalar(rec.factors.t3)},
             {"x", encode_point_hex(E, rec.X)},
             {"m", encode_scalar(rec.m)},
             {"mprime", encode_scalar(rec.m_prime)}}};
}
inline FactorsRecord read_factors_message(const CurveParams& E, const ProtocolMessage& msg) {
    detail::expect_curve(msg, "factors", E);
    auto variant = variant_from_name(msg.fields.at("variant"));
    if (!variant)
        throw ParseError("envelope: unknown variant '" + msg.fields.at("variant") + "'");
    Point X = decode_point_hex(E, msg.fields.at("x"));
    if (X.is_infinity())
        throw ParseError("envelope: factors X must be a finite point");
    ModInt t1 = decode_scalar(msg.fields.at("t1"), E.n);
    ModInt m = decode_scalar(msg.fields.at("m"), E.n);
    ModInt m_prime = decode_scalar(msg.fields.at("mprime"), E.n);
    if (t1.is_zero() || m.is_zero() || m_prime.is_zero())
        throw ParseError("envelope: factors t1, m, and mprime must be nonzero");
    return FactorsRecord{*variant,
                         BlindingFactors{std::move(t1),
                                         decode_scalar(msg.fields.at("t2"), E.n),
                                         decode_scalar(msg.fields.at("t3"), E.n)},
                         std::move(X), std::move(m), std::move(m_prime)};
}

// ---------------------------------------------------------------------------
// Curve parameter files: `key = value` lines with keys
// {name, q, a, b, gx, gy, n, h}, decimal or 0x-hex values, `#` comments.

namespace detail {

inline BigInt parse_curve_int(const std::string& key, const std::string& value) {
    std::string_view v(value);
    int base = 10;
    if (v.starts_with("0x") || v.starts_with("0X")) {
        v.remove_prefix(2);
        base = 16;
    }
    if (v.empty())
        throw CurveError("curve file: empty integer for '" + key + "'");
    BigInt out = 0;
    for (char c : v) {
        int digit;
        if (c >= '0' && c <= '9')
            digit = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f')
            digit = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F')
            digit = c - 'A' + 10;
        else
            throw CurveError("curve file: bad integer '" + value + "' for '" + key + "'");
        out = out * base + digit;
    }
    return out;
}

}  // namespace detail

// Syntax pass only: builds the parameter set without running validation.
// Intended for diagnostics; protocol users want parse_curve_file below.
inline CurveParams parse_curve_file_unchecked(std::string_view text) {
    std::map<std::string, std::string> entries;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        auto trim = [](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        };
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw CurveError("curve file: line without '=': " + std::string(line));
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (!entries.emplace(key, value).second)
            throw CurveError("curve file: duplicate key '" + key + "'");
    }

    static const char* required[] = {"name", "q", "a", "b", "gx", "gy", "n", "h"};
    for (const char* key : required)
        if (!entries.contains(key))
            throw CurveError(std::string("curve file: missing key '") + key + "'");
    for (const auto& [key, value] : entries) {
        bool known = false;
        for (const char* k : required)
            known = known || key == k;
        if (!known)
            throw CurveError("curve file: unknown key '" + key + "'");
    }

    const std::string& name = entries.at("name");
    if (name.empty() || !detail::valid_value(name))
        throw CurveError("curve file: bad curve name");

    BigInt q = detail::parse_curve_int("q", entries.at("q"));
    if (q < 2)
        throw CurveError("curve file: q must be at least 2");
    BigInt gx = detail::parse_curve_int("gx", entries.at("gx"));
    BigInt gy = detail::parse_curve_int("gy", entries.at("gy"));
    if (gx >= q || gy >= q)
        throw CurveError("curve file: base point coordinate out of range");

    return CurveParams{name,
                       q,
                       detail::parse_curve_int("a", entries.at("a")),
                       detail::parse_curve_int("b", entries.at("b")),
                       Point(ModInt(gx, q), ModInt(gy, q)),
                       detail::parse_curve_int("n", entries.at("n")),
                       detail::parse_curve_int("h", entries.at("h"))};
}

// Parses and validates; test_mode relaxes the minimum group-order strength.
inline CurveParams parse_curve_file(std::string_view text, bool test_mode = false) {
    CurveParams params = parse_curve_file_unchecked(text);
    auto report = validate_params(params, test_mode);
    if (!report.all_pass())
        throw CurveError("curve file: validation failed: " + report.failures());
    return params;
}

}  // namespace ecbs
