#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <string>

#include "ecbs/protocol.hpp"
#include "ecbs/registry.hpp"

#include "support/oracle.hpp"
#include "support/scripted_rng.hpp"

using namespace ecbs;
using ecbs::testing::honest_run;
using ecbs::testing::ScriptedRng;

namespace {

Point pt(const CurveParams& E, int x, int y) {
    return Point(E.fe(x), E.fe(y));
}

// The worked toy17 exchange used throughout: d=7, k=5, m=3 (which is what
// "abc" hashes to mod 19), factors (2, 4, 5).
struct Fixture {
    CurveParams E = toy17();
    KeyPair keys{ModInt(7, 19), Point(ModInt(0, 17), ModInt(6, 17))};  // Q = 7G
    SignerSession session{ModInt(5, 19), Point(ModInt(9, 17), ModInt(16, 17)), ModInt(9, 19),
                          false};  // R = 5G = (9,16)
    MessageScalar m{ModInt(3, 19)};
    BlindingFactors factors{ModInt(2, 19), ModInt(4, 19), ModInt(5, 19)};
};

}  // namespace

TEST_CASE("variant names", "[protocol]") {
    for (SchemeVariant v : all_variants)
        CHECK(variant_from_name(variant_name(v)) == v);
    CHECK(!variant_from_name("nosuch").has_value());
}

TEST_CASE("keygen", "[protocol]") {
    auto E = toy17();
    SECTION("forced draw lands on the scalar multiple") {
        ScriptedRng rng({6});  // nonzero_scalar yields 6 + 1 = 7
        KeyPair keys = keygen(E, rng);
        CHECK(keys.d == ModInt(7, 19));
        CHECK(keys.Q == pt(E, 0, 6));  // 7G
        CHECK(keys.Q == scalar_mul(E, 7, E.G));
    }
    SECTION("draws stay in range and on curve") {
        SeededRng rng(21);
        for (int i = 0; i < 200; ++i) {
            KeyPair keys = keygen(E, rng);
            REQUIRE(!keys.d.is_zero());
            REQUIRE(keys.d.value() < 19);
            REQUIRE(!keys.Q.is_infinity());
            REQUIRE(is_on_curve(E, keys.Q));
        }
    }
}

TEST_CASE("session init", "[protocol]") {
    auto E = toy17();
    SECTION("forced draw") {
        ScriptedRng rng({4});  // k = 5
        SignerSession session = session_init(E, rng);
        CHECK(session.k == ModInt(5, 19));
        CHECK(session.R == pt(E, 9, 16));
        CHECK(session.r_scalar == ModInt(9, 19));
        CHECK(!session.consumed);
    }
    SECTION("zero x_R mod n is resampled") {
        // 7G = (0,6), so k = 7 gives r_scalar = 0 and must be redrawn.
        ScriptedRng rng({6, 4});
        SignerSession session = session_init(E, rng);
        CHECK(session.k == ModInt(5, 19));
        CHECK(rng.remaining() == 0);
    }
    SECTION("rebuild from nonce") {
        SignerSession session = session_from_nonce(E, ModInt(5, 19), true);
        CHECK(session.R == pt(E, 9, 16));
        CHECK(session.consumed);
        CHECK_THROWS_AS(session_from_nonce(E, ModInt(0, 19)), std::invalid_argument);
        CHECK_THROWS_AS(session_from_nonce(E, ModInt(7, 19)), std::invalid_argument);
        CHECK_THROWS_AS(session_from_nonce(E, ModInt(5, 17)), std::invalid_argument);
    }
}

TEST_CASE("message to scalar", "[protocol]") {
    auto E = toy17();
    CHECK(message_to_scalar(std::string_view("abc"), E).value() == ModInt(3, 19));
    CHECK(message_to_scalar(std::string_view("abc"), E).value() ==
          message_to_scalar(std::string_view("abc"), E).value());
    // "msg24" hashes to 0 mod 19; the counter re-hash path must kick in.
    CHECK(message_to_scalar(std::string_view("msg24"), E).value() == ModInt(17, 19));

    const CurveParams& big = registry_lookup("secp160r1");
    CHECK(message_to_scalar(std::string_view("abc"), big).value().value() ==
          BigInt("0x6df28368bf52d7bf73c960a734b63bf8a1b6af2e"));

    SeededRng rng(3);
    for (int i = 0; i < 100; ++i) {
        std::string msg = "fuzz" + std::to_string(i);
        ModInt m = message_to_scalar(std::string_view(msg), E).value();
        REQUIRE(!m.is_zero());
        REQUIRE(m.value() < 19);
    }
}

TEST_CASE("blinding follows the worked fixture", "[protocol]") {
    Fixture f;
    // nonzero_scalar adds 1, so draws 1, 3, 4 give t = (2, 4, 5).
    ScriptedRng rng({1, 3, 4});
    BlindResult out = blind(f.E, SchemeVariant::Generalized, f.session.R, f.keys.Q, f.m, rng);
    CHECK(out.factors.t1 == ModInt(2, 19));
    CHECK(out.factors.t2 == ModInt(4, 19));
    CHECK(out.factors.t3 == ModInt(5, 19));
    // m^-1 = 13 mod 19; m' = 9*2*inv(13+5) = 1
    CHECK(out.m_prime.value() == ModInt(1, 19));
    // X = (2*5 + 4 + 5*7) G = 49G = 11G = (13,10)
    CHECK(out.X == pt(f.E, 13, 10));
    CHECK(out.X == scalar_mul(f.E, 49, f.E.G));
}

TEST_CASE("degenerate blinding denominator is resampled", "[protocol]") {
    Fixture f;
    // m^-1 + t3 = 13 + 6 = 19 = 0 mod 19, so the first tuple (2,4,6) dies
    // and a full redraw produces the fixture values.
    ScriptedRng rng({1, 3, 5, 1, 3, 4});
    BlindResult out = blind(f.E, SchemeVariant::Generalized, f.session.R, f.keys.Q, f.m, rng);
    CHECK(out.factors.t3 == ModInt(5, 19));
    CHECK(out.m_prime.value() == ModInt(1, 19));
    CHECK(rng.remaining() == 0);
}

TEST_CASE("resampling is bounded", "[protocol]") {
    Fixture f;
    // Every tuple (2,4,6) has m^-1 + t3 = 0; after 64 attempts blind gives up.
    std::vector<BigInt> degenerate_forever;
    for (int i = 0; i < 64; ++i)
        degenerate_forever.insert(degenerate_forever.end(), {1, 3, 5});
    ScriptedRng rng(degenerate_forever);
    CHECK_THROWS_AS(blind(f.E, SchemeVariant::Generalized, f.session.R, f.keys.Q, f.m, rng),
                    RandomnessError);
    CHECK(rng.remaining() == 0);
}

TEST_CASE("variant factor constraints", "[protocol]") {
    auto E = toy17();
    SeededRng rng(31);
    KeyPair keys = keygen(E, rng);
    MessageScalar m = message_to_scalar(std::string_view("constraints"), E);
    for (int i = 0; i < 50; ++i) {
        SignerSession session = session_init(E, rng);
        auto check_one = [&](SchemeVariant v) {
            BlindResult out = blind(E, v, session.R, keys.Q, m, rng);
            REQUIRE(!out.factors.t1.is_zero());
            if (v == SchemeVariant::EducedI)
                REQUIRE(out.factors.t1 == E.scalar(1));
            if (v == SchemeVariant::EducedII)
                REQUIRE(out.factors.t2.is_zero());
            if (v == SchemeVariant::EducedIII)
                REQUIRE(out.factors.t3.is_zero());
            REQUIRE(!out.m_prime.value().is_zero());
            REQUIRE(!out.X.is_infinity());
            REQUIRE(is_on_curve(E, out.X));
        };
        for (SchemeVariant v : all_variants)
            check_one(v);
    }
}

TEST_CASE("blind validates its inputs", "[protocol]") {
    Fixture f;
    SeededRng rng(5);
    CHECK_THROWS_AS(
        blind(f.E, SchemeVariant::Generalized, Point::infinity(), f.keys.Q, f.m, rng),
        std::invalid_argument);
    CHECK_THROWS_AS(blind(f.E, SchemeVariant::Generalized, pt(f.E, 5, 2), f.keys.Q, f.m, rng),
                    std::invalid_argument);
    // R = 7G = (0,6) has x = 0, so x mod n = 0.
    CHECK_THROWS_AS(blind(f.E, SchemeVariant::Generalized, pt(f.E, 0, 6), f.keys.Q, f.m, rng),
                    std::invalid_argument);
}

TEST_CASE("signing", "[protocol]") {
    Fixture f;
    BlindedMessage m_prime(ModInt(1, 19));
    BlindSignatureShare share = sign(f.E, f.keys, f.session, m_prime);
    CHECK(share.value == ModInt(11, 19));  // 7*9 + 5*1 = 68 = 11 mod 19
    CHECK(f.session.consumed);
    CHECK_THROWS_AS(sign(f.E, f.keys, f.session, m_prime), StateError);
    CHECK_THROWS_AS(BlindedMessage(ModInt(0, 19)), std::invalid_argument);
}

TEST_CASE("unblinding completes the fixture", "[protocol]") {
    Fixture f;
    BlindedMessage m_prime(ModInt(1, 19));
    BlindSignatureShare share{ModInt(11, 19)};
    Point X = pt(f.E, 13, 10);
    Signature sig = unblind(f.E, SchemeVariant::Generalized, f.factors, f.m, m_prime, share, X);
    CHECK(sig.s == ModInt(2, 19));  // 3*(2*11*1 + 4) = 78 = 2 mod 19
    CHECK(sig.X == X);
    CHECK(verify(f.E, f.keys.Q, f.m, sig));  // 2G == 3*(11G) + 7G = 40G
}

TEST_CASE("verification rejects tampering and malformed signatures", "[protocol]") {
    Fixture f;
    Signature good{pt(f.E, 13, 10), ModInt(2, 19)};
    CHECK(verify(f.E, f.keys.Q, f.m, good));

    Signature bumped{good.X, good.s + f.E.scalar(1)};
    CHECK(!verify(f.E, f.keys.Q, f.m, bumped));  // 3G != 2G

    Signature at_infinity{Point::infinity(), good.s};
    CHECK(!verify(f.E, f.keys.Q, f.m, at_infinity));

    Signature off_curve{pt(f.E, 5, 2), good.s};
    CHECK(!verify(f.E, f.keys.Q, f.m, off_curve));

    Signature wrong_ring{good.X, ModInt(2, 17)};
    CHECK(!verify(f.E, f.keys.Q, f.m, wrong_ring));

    CHECK(!verify(f.E, Point::infinity(), f.m, good));
}

TEST_CASE("every variant verifies on both curve classes", "[protocol]") {
    for (const char* name : {"toy17", "secp160r1"}) {
        const CurveParams& E = registry_lookup(name);
        SeededRng rng(101);
        const int rounds = std::string(name) == "toy17" ? 50 : 3;
        for (SchemeVariant v : all_variants) {
            for (int i = 0; i < rounds; ++i) {
                auto run = honest_run(E, v, rng, "round " + std::to_string(i));
                REQUIRE(verify(E, run.keys.Q, MessageScalar(run.m), run.sig));
            }
        }
    }
}

TEST_CASE("share satisfies the public check identity", "[protocol]") {
    // s'G == x_r*Q + m'*R, the identity that lets anyone audit a share
    // against public data without learning d or k.
    auto E = toy17();
    SeededRng rng(55);
    for (int i = 0; i < 100; ++i) {
        auto run = honest_run(E, SchemeVariant::Generalized, rng, "identity");
        Point lhs = scalar_mul(E, run.share.value.value(), E.G);
        Point rhs = add(E, scalar_mul(E, run.session.r_scalar.value(), run.keys.Q),
                        scalar_mul(E, run.blinded.m_prime.value().value(), run.session.R));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("derived factors reproduce a matched transcript", "[protocol]") {
    auto E = toy17();
    SeededRng rng(77);
    for (SchemeVariant v : all_variants) {
        for (int i = 0; i < 25; ++i) {
            auto run = honest_run(E, v, rng, "matched");
            if (v == SchemeVariant::EducedII && run.view().s_prime.is_zero())
                continue;  // the derivation legitimately refuses these views
            std::optional<ModInt> t1_choice;
            if (v == SchemeVariant::Generalized)
                t1_choice = run.blinded.factors.t1;
            BlindingFactors derived =
                derive_unblinding_factors(E, run.view(), run.result(), v, t1_choice);
            REQUIRE(blinding_equations_hold(E, run.keys.Q, v, derived, run.view(),
                                            run.result()));
            if (v == SchemeVariant::EducedI) {
                // With t1 pinned the remaining factors are determined.
                REQUIRE(derived.t2 == run.blinded.factors.t2);
                REQUIRE(derived.t3 == run.blinded.factors.t3);
            }
            if (v == SchemeVariant::Generalized) {
                // Choosing the original t1 recovers the original tuple.
                REQUIRE(derived.t2 == run.blinded.factors.t2);
                REQUIRE(derived.t3 == run.blinded.factors.t3);
            }
        }
    }
}

TEST_CASE("derived factors link any two honest transcripts", "[protocol]") {
    auto E = toy17();
    SeededRng rng(78);
    for (SchemeVariant v : all_variants) {
        int done = 0;
        while (done < 25) {
            KeyPair keys = keygen(E, rng);
            auto run_i = honest_run(E, v, rng, "left", &keys);
            auto run_j = honest_run(E, v, rng, "right", &keys);
            if (v == SchemeVariant::EducedII &&
                (run_i.view().s_prime.is_zero() || run_j.result().s.is_zero()))
                continue;  // the derivation legitimately refuses degenerate transcripts
            std::optional<ModInt> t1_choice;
            if (v == SchemeVariant::Generalized)
                t1_choice = E.scalar(1 + done % 18);
            BlindingFactors derived =
                derive_unblinding_factors(E, run_i.view(), run_j.result(), v, t1_choice);
            REQUIRE(blinding_equations_hold(E, keys.Q, v, derived, run_i.view(),
                                            run_j.result()));
            ++done;
        }
    }
}

TEST_CASE("factor derivation guards", "[protocol]") {
    auto E = toy17();
    SeededRng rng(79);
    auto run = honest_run(E, SchemeVariant::Generalized, rng, "guards");

    CHECK_THROWS_AS(derive_unblinding_factors(E, run.view(), run.result(),
                                              SchemeVariant::Generalized, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(derive_unblinding_factors(E, run.view(), run.result(),
                                              SchemeVariant::Generalized, E.scalar(0)),
                    std::invalid_argument);

    SignerView dead_view = run.view();
    dead_view.s_prime = E.scalar(0);
    CHECK_THROWS_AS(
        derive_unblinding_factors(E, dead_view, run.result(), SchemeVariant::EducedII),
        std::domain_error);

    RequesterResult dead_result = run.result();
    dead_result.s = E.scalar(0);
    CHECK_THROWS_AS(
        derive_unblinding_factors(E, run.view(), dead_result, SchemeVariant::EducedII),
        std::domain_error);
}

TEST_CASE("counting does not perturb outputs", "[protocol]") {
    auto E = toy17();
    for (SchemeVariant v : all_variants) {
        SeededRng rng_plain(91), rng_counted(91);
        auto plain = honest_run(E, v, rng_plain, "counted");
        OpCount tally;
        auto counted = honest_run(E, v, rng_counted, "counted", nullptr, &tally);
        REQUIRE(plain.sig.X == counted.sig.X);
        REQUIRE(plain.sig.s == counted.sig.s);
        REQUIRE(plain.share.value == counted.share.value);
        REQUIRE(plain.blinded.m_prime.value() == counted.blinded.m_prime.value());
        REQUIRE(tally.ec_mul > 0);
    }
}
