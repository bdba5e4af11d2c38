#pragma once

// Blind-signature protocol between a signer and a requester.
//
// Setup: the signer holds d with public key Q = dG, draws a session nonce k,
// and sends R = kG. Writing x_r for R's x-coordinate reduced mod n, one
// exchange runs:
//
//   requester  X  = t1*R + t2*G + t3*Q
//              m' = x_r * t1 * (m^-1 + t3)^-1        -> m' to signer
//   signer     s' = d*x_r + k*m'                     -> s' to requester
//   requester  s  = m * (t1*s'*m'^-1 + t2)
//
// and (X, s) is the signature on m, accepted when s*G == m*X + Q.
//
// The generalized scheme draws all three blinding factors; the three educed
// variants pin one of them (t1 = 1, t2 = 0, or t3 = 0 respectively; the
// t3 = 0 variant blinds as m' = x_r * t1 * m, with no inversion).
//
// Every operation is deterministic given the injected RandomSource. Counting
// hooks tally the protocol-level operations for the cost model; passing a
// tally never changes any output.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "ecbs/curve.hpp"
#include "ecbs/errors.hpp"
#include "ecbs/field.hpp"
#include "ecbs/opcount.hpp"
#include "ecbs/random.hpp"

namespace ecbs {

enum class SchemeVariant { Generalized, EducedI, EducedII, EducedIII };

inline constexpr std::array<SchemeVariant, 4> all_variants = {
    SchemeVariant::Generalized, SchemeVariant::EducedI, SchemeVariant::EducedII,
    SchemeVariant::EducedIII};

inline std::string variant_name(SchemeVariant v) {
    switch (v) {
        case SchemeVariant::Generalized: return "generalized";
        case SchemeVariant::EducedI: return "educed-i";
        case SchemeVariant::EducedII: return "educed-ii";
        case SchemeVariant::EducedIII: return "educed-iii";
    }
    throw std::logic_error("variant_name: bad enum value");
}

inline std::optional<SchemeVariant> variant_from_name(const std::string& name) {
    for (SchemeVariant v : all_variants)
        if (variant_name(v) == name)
            return v;
    return std::nullopt;
}

struct KeyPair {
    ModInt d;  // private, in [1, n-1]
    Point Q;   // public, Q = dG
};

// Per-exchange signer state. R = kG and r_scalar = x_R mod n (nonzero by
// construction). Single-use: sign() refuses a consumed session. Not
// thread-safe; keep each session confined to one owner.
struct SignerSession {
    ModInt k;
    Point R;
    ModInt r_scalar;
    bool consumed = false;
};

struct BlindingFactors {
    ModInt t1;  // never zero
    ModInt t2;
    ModInt t3;
};

// Message reduced into [1, n-1]; the protocol needs m invertible.
class MessageScalar {
public:
    explicit MessageScalar(ModInt m) : m_(std::move(m)) {
        if (m_.is_zero())
            throw std::invalid_argument("MessageScalar: zero is not a valid message scalar");
    }
    const ModInt& value() const { return m_; }

private:
    ModInt m_;
};

// Blinded message m', nonzero so the requester can invert it on extraction.
class BlindedMessage {
public:
    explicit BlindedMessage(ModInt value) : value_(std::move(value)) {
        if (value_.is_zero())
            throw std::invalid_argument("BlindedMessage: zero blinded message");
    }
    const ModInt& value() const { return value_; }

private:
    ModInt value_;
};

struct BlindSignatureShare {
    ModInt value;  // s'
};

struct Signature {
    Point X;
    ModInt s;
};

// What the signer sees in one exchange.
struct SignerView {
    Point R;
    ModInt r_scalar;
    ModInt m_prime;
    ModInt s_prime;
};

// What the requester ends up with.
struct RequesterResult {
    Point X;
    ModInt s;
    ModInt m;
};

namespace detail {

// Degenerate random draws (zero x_r mod n, zero blinding denominator, X = O)
// are resampled up to this many times before giving up. On real curves one
// retry is already rare; tiny test curves hit retries routinely.
inline constexpr int max_resample_attempts = 64;

// Protocol-level operation wrapper: every call site that the cost model
// tallies goes through here. Curve-internal field work (slopes inside the
// group law) is part of the EC units and is deliberately not tallied.
struct CountedOps {
    const CurveParams& E;
    OpCount* tally = nullptr;

    Point ec_mul(const ModInt& k, const Point& p) const {
        if (tally)
            ++tally->ec_mul;
        return scalar_mul(E, k.value(), p);
    }
    Point ec_add(const Point& p, const Point& r) const {
        if (tally)
            ++tally->ec_add;
        return add(E, p, r);
    }
    ModInt mul(const ModInt& a, const ModInt& b) const {
        if (tally)
            ++tally->mul;
        return mod_mul(a, b);
    }
    ModInt add_s(const ModInt& a, const ModInt& b) const {
        if (tally)
            ++tally->add;
        return mod_add(a, b);
    }
    ModInt inv(const ModInt& a) const {
        if (tally)
            ++tally->inv;
        return mod_inv(a);
    }
};

inline std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    static const std::uint8_t empty = 0;
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    const std::uint8_t* ptr = data.empty() ? &empty : data.data();
    if (EVP_Digest(ptr, data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32)
        throw std::runtime_error("sha256: digest failed");
    return out;
}

}  // namespace detail

// Fresh key pair with d uniform in [1, n-1] and Q = dG.
inline KeyPair keygen(const CurveParams& E, RandomSource& rng, OpCount* tally = nullptr) {
    detail::CountedOps ops{E, tally};
    ModInt d = rng.nonzero_scalar(E.n);
    Point Q = ops.ec_mul(d, E.G);
    return {std::move(d), std::move(Q)};
}

// Rebuild a key pair from a stored private scalar (Q is recomputed, uncounted).
inline KeyPair keypair_from_private(const CurveParams& E, ModInt d) {
    if (d.is_zero() || d.modulus() != E.n)
        throw std::invalid_argument("keypair_from_private: d must be nonzero mod n");
    Point Q = scalar_mul(E, d.value(), E.G);
    return {std::move(d), std::move(Q)};
}

// New signing session: k uniform in [1, n-1], R = kG, resampled until
// x_R mod n is nonzero.
inline SignerSession session_init(const CurveParams& E, RandomSource& rng,
                                  OpCount* tally = nullptr) {
    for (int attempt = 0; attempt < detail::max_resample_attempts; ++attempt) {
        OpCount scratch{tally ? tally->size_class : SizeClass::bits160};
        detail::CountedOps ops{E, tally ? &scratch : nullptr};
        ModInt k = rng.nonzero_scalar(E.n);
        Point R = ops.ec_mul(k, E.G);
        ModInt r_scalar(R.x().value(), E.n);
        if (r_scalar.is_zero())
            continue;  // discarded draw; its tally is dropped with it
        if (tally)
            *tally += scratch;
        return SignerSession{std::move(k), std::move(R), std::move(r_scalar), false};
    }
    throw RandomnessError("session_init: exhausted resampling for nonzero x_R mod n");
}

// Rebuild a session from a stored nonce (used by the file-based CLI flow).
inline SignerSession session_from_nonce(const CurveParams& E, ModInt k, bool consumed = false) {
    if (k.is_zero() || k.modulus() != E.n)
        throw std::invalid_argument("session_from_nonce: k must be nonzero mod n");
    Point R = scalar_mul(E, k.value(), E.G);
    ModInt r_scalar(R.x().value(), E.n);
    if (r_scalar.is_zero())
        throw std::invalid_argument("session_from_nonce: nonce has zero x_R mod n");
    return SignerSession{std::move(k), std::move(R), std::move(r_scalar), consumed};
}

// SHA-256(message) reduced mod n. On the rare zero result, re-hash
// SHA-256(message || counter) with counter = 1, 2, ... encoded as 8 bytes
// big-endian, until nonzero. Deterministic.
inline MessageScalar message_to_scalar(std::span<const std::uint8_t> message,
                                       const CurveParams& E) {
    ModInt m = reduce_from_bytes(detail::sha256(message), E.n);
    for (std::uint64_t counter = 1; m.is_zero(); ++counter) {
        std::vector<std::uint8_t> buf(message.begin(), message.end());
        for (int b = 7; b >= 0; --b)
            buf.push_back(static_cast<std::uint8_t>(counter >> (8 * b)));
        m = reduce_from_bytes(detail::sha256(buf), E.n);
    }
    return MessageScalar(std::move(m));
}

inline MessageScalar message_to_scalar(std::string_view message, const CurveParams& E) {
    return message_to_scalar(
        std::span(reinterpret_cast<const std::uint8_t*>(message.data()), message.size()), E);
}

struct BlindResult {
    BlindingFactors factors;
    Point X;
    BlindedMessage m_prime;
};

// Requester side, first move: draw blinding factors per variant, compute the
// disguised point X and blinded message m'. Degenerate draws (zero blinding
// denominator, X = O) are resampled; a resampled attempt leaves no trace in
// the tally.
inline BlindResult blind(const CurveParams& E, SchemeVariant variant, const Point& R,
                         const Point& Q, const MessageScalar& m, RandomSource& rng,
                         OpCount* tally = nullptr) {
    if (R.is_infinity() || !is_on_curve(E, R))
        throw std::invalid_argument("blind: R is not a finite curve point");
    if (Q.is_infinity() || !is_on_curve(E, Q))
        throw std::invalid_argument("blind: Q is not a finite curve point");
    const ModInt r_scalar(R.x().value(), E.n);
    if (r_scalar.is_zero())
        throw std::invalid_argument("blind: R has zero x-coordinate mod n");

    for (int attempt = 0; attempt < detail::max_resample_attempts; ++attempt) {
        OpCount scratch{tally ? tally->size_class : SizeClass::bits160};
        detail::CountedOps ops{E, tally ? &scratch : nullptr};

        // Draw order is t1, t2, t3; a factor pinned by the variant consumes
        // no randomness.
        const ModInt one = E.scalar(1);
        const ModInt zero = E.scalar(0);
        ModInt t1 = variant == SchemeVariant::EducedI ? one : rng.nonzero_scalar(E.n);
        ModInt t2 = variant == SchemeVariant::EducedII ? zero : rng.nonzero_scalar(E.n);
        ModInt t3 = variant == SchemeVariant::EducedIII ? zero : rng.nonzero_scalar(E.n);

        std::optional<ModInt> m_prime;
        switch (variant) {
            case SchemeVariant::Generalized:
            case SchemeVariant::EducedII: {
                ModInt denom = ops.add_s(ops.inv(m.value()), t3);
                if (denom.is_zero())
                    continue;  // m^-1 + t3 hit zero; redraw
                m_prime = ops.mul(ops.mul(r_scalar, t1), ops.inv(denom));
                break;
            }
            case SchemeVariant::EducedI: {
                ModInt denom = ops.add_s(ops.inv(m.value()), t3);
                if (denom.is_zero())
                    continue;
                m_prime = ops.mul(r_scalar, ops.inv(denom));
                break;
            }
            case SchemeVariant::EducedIII:
                // m' = x_r * t1 * m; the inversion-free blinding.
                m_prime = ops.mul(ops.mul(r_scalar, t1), m.value());
                break;
        }
        if (m_prime->is_zero())
            continue;  // unreachable for nonzero inputs; kept as a guard

        std::optional<Point> X;
        switch (variant) {
            case SchemeVariant::Generalized:
                X = ops.ec_add(ops.ec_add(ops.ec_mul(t1, R), ops.ec_mul(t2, E.G)),
                               ops.ec_mul(t3, Q));
                break;
            case SchemeVariant::EducedI:
                X = ops.ec_add(ops.ec_add(R, ops.ec_mul(t2, E.G)), ops.ec_mul(t3, Q));
                break;
            case SchemeVariant::EducedII:
                X = ops.ec_add(ops.ec_mul(t1, R), ops.ec_mul(t3, Q));
                break;
            case SchemeVariant::EducedIII:
                X = ops.ec_add(ops.ec_mul(t1, R), ops.ec_mul(t2, E.G));
                break;
        }
        if (X->is_infinity())
            continue;

        if (tally)
            *tally += scratch;
        return BlindResult{BlindingFactors{std::move(t1), std::move(t2), std::move(t3)},
                           std::move(*X), BlindedMessage(std::move(*m_prime))};
    }
    throw RandomnessError("blind: exhausted resampling of degenerate draws");
}

// Signer side: s' = d*x_r + k*m'. Consumes the session; a second call with
// the same session throws (nonce reuse across two blinded messages would
// hand the requester two linear equations in d and k).
inline BlindSignatureShare sign(const CurveParams& E, const KeyPair& keys,
                                SignerSession& session, const BlindedMessage& m_prime,
                                OpCount* tally = nullptr) {
    if (session.consumed)
        throw StateError("sign: session already consumed");
    detail::CountedOps ops{E, tally};
    ModInt s_prime =
        ops.add_s(ops.mul(keys.d, session.r_scalar), ops.mul(session.k, m_prime.value()));
    session.consumed = true;
    return BlindSignatureShare{std::move(s_prime)};
}

// Requester side, extraction: recover the signature scalar from the blinded
// share via the variant's formula and declare (X, s).
inline Signature unblind(const CurveParams& E, SchemeVariant variant,
                         const BlindingFactors& factors, const MessageScalar& m,
                         const BlindedMessage& m_prime, const BlindSignatureShare& share,
                         const Point& X, OpCount* tally = nullptr) {
    detail::CountedOps ops{E, tally};
    ModInt mp_inv = ops.inv(m_prime.value());
    std::optional<ModInt> s;
    switch (variant) {
        case SchemeVariant::Generalized:
        case SchemeVariant::EducedIII:
            // s = m * (t1*s'*m'^-1 + t2)
            s = ops.mul(m.value(),
                        ops.add_s(ops.mul(ops.mul(factors.t1, share.value), mp_inv), factors.t2));
            break;
        case SchemeVariant::EducedI:
            // t1 = 1: s = m * (s'*m'^-1 + t2)
            s = ops.mul(m.value(), ops.add_s(ops.mul(share.value, mp_inv), factors.t2));
            break;
        case SchemeVariant::EducedII:
            // t2 = 0: s = t1*m*s'*m'^-1
            s = ops.mul(ops.mul(ops.mul(factors.t1, m.value()), share.value), mp_inv);
            break;
    }
    return Signature{X, std::move(*s)};
}

// Acceptance test for a signature: s*G == m*X + Q, with X a finite curve
// point. Malformed inputs yield false, never an exception.
inline bool verify(const CurveParams& E, const Point& Q, const MessageScalar& m,
                   const Signature& sig, OpCount* tally = nullptr) {
    if (sig.X.is_infinity() || !is_on_curve(E, sig.X))
        return false;
    if (Q.is_infinity() || !is_on_curve(E, Q))
        return false;
    if (sig.s.modulus() != E.n || m.value().modulus() != E.n)
        return false;
    detail::CountedOps ops{E, tally};
    Point lhs = ops.ec_mul(sig.s, E.G);
    Point rhs = ops.ec_add(ops.ec_mul(m.value(), sig.X), Q);
    return lhs == rhs;
}

// Blindness audit: given a signer's view of exchange i and a requester's
// final data from exchange j (same key), produce the blinding factors under
// which the view maps onto that result. For the educed variants the factor
// pair is determined; the generalized scheme has a spare degree of freedom,
// so the caller picks a nonzero t1 and the other two follow.
inline BlindingFactors derive_unblinding_factors(const CurveParams& E, const SignerView& view,
                                                 const RequesterResult& result,
                                                 SchemeVariant variant,
                                                 std::optional<ModInt> t1_choice = std::nullopt) {
    const ModInt& xr = view.r_scalar;
    const ModInt& mp = view.m_prime;
    const ModInt& sp = view.s_prime;
    const ModInt& m = result.m;
    const ModInt& s = result.s;

    switch (variant) {
        case SchemeVariant::Generalized: {
            if (!t1_choice.has_value())
                throw std::invalid_argument(
                    "derive_unblinding_factors: generalized variant needs a t1 choice");
            ModInt t1 = *t1_choice;
            if (t1.is_zero())
                throw std::invalid_argument("derive_unblinding_factors: t1 must be nonzero");
            ModInt mp_inv = mod_inv(mp);
            ModInt m_inv = mod_inv(m);
            ModInt t3 = xr * t1 * mp_inv - m_inv;   // solves the m' equation
            ModInt t2 = s * m_inv - t1 * sp * mp_inv;  // solves the s equation
            return {std::move(t1), std::move(t2), std::move(t3)};
        }
        case SchemeVariant::EducedI: {
            ModInt mp_inv = mod_inv(mp);
            ModInt m_inv = mod_inv(m);
            ModInt t2 = m_inv * s - mp_inv * sp;
            ModInt t3 = mp_inv * xr - m_inv;
            return {E.scalar(1), std::move(t2), std::move(t3)};
        }
        case SchemeVariant::EducedII: {
            ModInt sp_inv = mod_inv(sp);  // throws on the degenerate s' = 0 view
            if (s.is_zero())
                throw std::domain_error(
                    "derive_unblinding_factors: result with s = 0 forces t1 = 0");
            ModInt m_inv = mod_inv(m);
            ModInt t1 = sp_inv * mp * s * m_inv;
            ModInt t3 = m_inv * (xr * sp_inv * s - E.scalar(1));
            return {std::move(t1), E.scalar(0), std::move(t3)};
        }
        case SchemeVariant::EducedIII: {
            ModInt xr_inv = mod_inv(xr);
            ModInt m_inv = mod_inv(m);
            ModInt t1 = mp * xr_inv * m_inv;
            ModInt t2 = m_inv * (s - xr_inv * sp);
            return {std::move(t1), std::move(t2), E.scalar(0)};
        }
    }
    throw std::logic_error("derive_unblinding_factors: bad variant");
}

// Exact check that a factor tuple satisfies all three blinding equations of
// the variant for the given view/result pair.
inline bool blinding_equations_hold(const CurveParams& E, const Point& Q, SchemeVariant variant,
                                    const BlindingFactors& factors, const SignerView& view,
                                    const RequesterResult& result) {
    // X = t1*R + t2*G + t3*Q
    Point x_expected =
        add(E,
            add(E, scalar_mul(E, factors.t1.value(), view.R),
                scalar_mul(E, factors.t2.value(), E.G)),
            scalar_mul(E, factors.t3.value(), Q));
    if (x_expected != result.X)
        return false;

    // m' = x_r * t1 * (m^-1 + t3)^-1, except the t3 = 0 variant's
    // m' = x_r * t1 * m.
    if (variant == SchemeVariant::EducedIII) {
        if (view.m_prime != view.r_scalar * factors.t1 * result.m)
            return false;
    } else {
        ModInt denom = mod_inv(result.m) + factors.t3;
        if (denom.is_zero())
            return false;
        if (view.m_prime != view.r_scalar * factors.t1 * mod_inv(denom))
            return false;
    }

    // s = m * (t1*s'*m'^-1 + t2); t2 = 0 reproduces the educed form.
    ModInt s_expected =
        result.m * (factors.t1 * view.s_prime * mod_inv(view.m_prime) + factors.t2);
    return result.s == s_expected;
}

}  // namespace ecbs
