// File-based two-role driver for the blind-signature protocol, plus curve
// validation and the cost-comparison report.
//
// Exit codes: 0 success / signature valid, 1 signature invalid, 2 I/O
// failure, 3 bad curve or parameters, 4 malformed envelope or input,
// 5 protocol-state violation (e.g. reusing a consumed session).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecbs/ecbs.hpp"

namespace {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::string text = read_file(path);
    return {text.begin(), text.end()};
}

// All writes go through a temp file and rename, so a state transition such
// as consuming a session is atomic.
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp + " for writing");
        out << content;
        if (!out.good())
            throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("rename failed: " + path + ": " + ec.message());
}

constexpr const char* kSessionSecretHeader =
    "# SECRET: session nonce k; keep with the signer, never transmit\n";

struct CurveOpts {
    std::string name;
    std::string file;
    bool test_mode = false;
};

struct SeedOpt {
    std::optional<std::uint64_t> seed;

    std::unique_ptr<ecbs::RandomSource> make_rng() const {
        if (seed)
            return std::make_unique<ecbs::SeededRng>(*seed);
        return std::make_unique<ecbs::SystemRng>();
    }
};

void add_curve_opts(CLI::App* cmd, CurveOpts& opts) {
    auto* name = cmd->add_option("--curve", opts.name, "named curve from the registry");
    auto* file = cmd->add_option("--curve-file", opts.file, "curve parameter file");
    name->excludes(file);
    cmd->add_flag("--test-mode", opts.test_mode,
                  "allow weak curves (group order at most 2^160)");
}

void add_seed_opt(CLI::App* cmd, SeedOpt& opt) {
    cmd->add_option("--seed", opt.seed,
                    "deterministic randomness seed (system entropy when absent)");
}

ecbs::CurveParams load_curve(const CurveOpts& opts) {
    if (!opts.file.empty())
        return ecbs::parse_curve_file(read_file(opts.file), opts.test_mode);
    if (opts.name.empty())
        throw ecbs::CurveError("no curve given (use --curve or --curve-file)");
    ecbs::CurveParams params = ecbs::registry_lookup(opts.name);
    auto report = ecbs::validate_params(params, opts.test_mode);
    if (!report.all_pass())
        throw ecbs::CurveError("curve '" + params.name + "' rejected: " + report.failures() +
                               (opts.test_mode ? "" : "; weak test curves need --test-mode"));
    return params;
}

ecbs::ProtocolMessage parse_envelope_file(const std::string& path) {
    return ecbs::parse_message(read_file(path));
}

ecbs::SchemeVariant parse_variant(const std::string& name) {
    auto v = ecbs::variant_from_name(name);
    if (!v)
        throw ecbs::ParseError("unknown variant '" + name +
                               "' (generalized, educed-i, educed-ii, educed-iii)");
    return *v;
}

int cmd_keygen(const CurveOpts& curve_opts, const SeedOpt& seed, const std::string& out_private,
               const std::string& out_public) {
    auto E = load_curve(curve_opts);
    auto rng = seed.make_rng();
    ecbs::KeyPair keys = ecbs::keygen(E, *rng);
    write_file_atomic(out_private,
                      "# SECRET: signer private key; never transmit\n" +
                          ecbs::serialize_message(ecbs::make_privkey_message(E, keys.d)));
    write_file_atomic(out_public, ecbs::serialize_message(ecbs::make_pubkey_message(E, keys.Q)));
    std::cout << "wrote " << out_private << " and " << out_public << "\n";
    return 0;
}

int cmd_session(const CurveOpts& curve_opts, const SeedOpt& seed, const std::string& private_path,
                const std::string& out_secret, const std::string& out_r) {
    auto E = load_curve(curve_opts);
    ecbs::ModInt d = ecbs::read_privkey_message(E, parse_envelope_file(private_path));
    (void)ecbs::keypair_from_private(E, d);  // reject a malformed key up front
    auto rng = seed.make_rng();
    ecbs::SignerSession session = ecbs::session_init(E, *rng);
    write_file_atomic(out_secret,
                      kSessionSecretHeader +
                          ecbs::serialize_message(ecbs::make_session_secret_message(E, session)));
    write_file_atomic(out_r, ecbs::serialize_message(ecbs::make_session_message(E, session.R)));
    std::cout << "wrote " << out_secret << " and " << out_r << "\n";
    return 0;
}

int cmd_blind(const CurveOpts& curve_opts, const SeedOpt& seed, const std::string& variant_name,
              const std::string& r_path, const std::string& public_path,
              const std::string& message_path, const std::string& out_blinded,
              const std::string& out_factors) {
    auto E = load_curve(curve_opts);
    ecbs::SchemeVariant variant = parse_variant(variant_name);
    ecbs::Point R = ecbs::read_session_message(E, parse_envelope_file(r_path));
    ecbs::Point Q = ecbs::read_pubkey_message(E, parse_envelope_file(public_path));
    auto message = read_file_bytes(message_path);
    ecbs::MessageScalar m = ecbs::message_to_scalar(message, E);
    auto rng = seed.make_rng();
    ecbs::BlindResult result = ecbs::blind(E, variant, R, Q, m, *rng);
    write_file_atomic(out_blinded,
                      ecbs::serialize_message(ecbs::make_blinded_message(E, result.m_prime)));
    ecbs::FactorsRecord record{variant, result.factors, result.X, m.value(),
                               result.m_prime.value()};
    write_file_atomic(out_factors,
                      "# SECRET: blinding factors; keep with the requester, never transmit\n" +
                          ecbs::serialize_message(ecbs::make_factors_message(E, record)));
    std::cout << "wrote " << out_blinded << " and " << out_factors << "\n";
    return 0;
}

int cmd_sign(const CurveOpts& curve_opts, const std::string& private_path,
             const std::string& session_path, const std::string& blinded_path,
             const std::string& out_share) {
    auto E = load_curve(curve_opts);
    ecbs::ModInt d = ecbs::read_privkey_message(E, parse_envelope_file(private_path));
    ecbs::KeyPair keys = ecbs::keypair_from_private(E, d);
    ecbs::SignerSession session =
        ecbs::read_session_secret_message(E, parse_envelope_file(session_path));
    ecbs::BlindedMessage m_prime =
        ecbs::read_blinded_message(E, parse_envelope_file(blinded_path));
    ecbs::BlindSignatureShare share = ecbs::sign(E, keys, session, m_prime);
    // Mark the session consumed before releasing the share.
    write_file_atomic(session_path,
                      kSessionSecretHeader +
                          ecbs::serialize_message(ecbs::make_session_secret_message(E, session)));
    write_file_atomic(out_share, ecbs::serialize_message(ecbs::make_share_message(E, share)));
    std::cout << "wrote " << out_share << "\n";
    return 0;
}

int cmd_unblind(const CurveOpts& curve_opts, const std::string& variant_name,
                const std::string& factors_path, const std::string& share_path,
                const std::string& out_signature) {
    auto E = load_curve(curve_opts);
    ecbs::FactorsRecord record = ecbs::read_factors_message(E, parse_envelope_file(factors_path));
    if (!variant_name.empty() && parse_variant(variant_name) != record.variant)
        throw ecbs::ParseError("variant '" + variant_name + "' conflicts with factors file ('" +
                               ecbs::variant_name(record.variant) + "')");
    ecbs::BlindSignatureShare share =
        ecbs::read_share_message(E, parse_envelope_file(share_path));
    ecbs::MessageScalar m(record.m);
    ecbs::BlindedMessage m_prime(record.m_prime);
    ecbs::Signature sig =
        ecbs::unblind(E, record.variant, record.factors, m, m_prime, share, record.X);
    write_file_atomic(out_signature,
                      ecbs::serialize_message(ecbs::make_signature_message(E, sig)));
    std::cout << "wrote " << out_signature << "\n";
    return 0;
}

int cmd_verify(const CurveOpts& curve_opts, const std::string& public_path,
               const std::string& message_path, const std::string& signature_path) {
    auto E = load_curve(curve_opts);
    ecbs::Point Q = ecbs::read_pubkey_message(E, parse_envelope_file(public_path));
    auto message = read_file_bytes(message_path);
    ecbs::MessageScalar m = ecbs::message_to_scalar(message, E);
    ecbs::Signature sig = ecbs::read_signature_message(E, parse_envelope_file(signature_path));
    if (ecbs::verify(E, Q, m, sig)) {
        std::cout << "VALID\n";
        return 0;
    }
    std::cout << "INVALID\n";
    return 1;
}

int cmd_demo(const CurveOpts& curve_opts, const SeedOpt& seed, const std::string& variant_name,
             const std::string& message) {
    auto E = load_curve(curve_opts);
    ecbs::SchemeVariant variant = parse_variant(variant_name);
    auto rng = seed.make_rng();
    ecbs::OpCount tally;

    std::cout << "curve: " << E.name << "  variant: " << ecbs::variant_name(variant) << "\n";
    ecbs::KeyPair keys = ecbs::keygen(E, *rng, &tally);
    std::cout << "signer      public key Q        = " << ecbs::encode_point_hex(E, keys.Q)
              << "\n";
    ecbs::SignerSession session = ecbs::session_init(E, *rng, &tally);
    std::cout << "signer    -> requester: R       = " << ecbs::encode_point_hex(E, session.R)
              << "\n";
    ecbs::MessageScalar m = ecbs::message_to_scalar(std::string_view(message), E);
    ecbs::BlindResult blinded = ecbs::blind(E, variant, session.R, keys.Q, m, *rng, &tally);
    std::cout << "requester -> signer:    m'      = " << ecbs::encode_scalar(blinded.m_prime.value())
              << "\n";
    ecbs::BlindSignatureShare share = ecbs::sign(E, keys, session, blinded.m_prime, &tally);
    std::cout << "signer    -> requester: s'      = " << ecbs::encode_scalar(share.value) << "\n";
    ecbs::Signature sig =
        ecbs::unblind(E, variant, blinded.factors, m, blinded.m_prime, share, blinded.X, &tally);
    std::cout << "requester   signature (X, s)    = (" << ecbs::encode_point_hex(E, sig.X) << ", "
              << ecbs::encode_scalar(sig.s) << ")\n";
    bool ok = ecbs::verify(E, keys.Q, m, sig, &tally);
    std::cout << "operation counts: ec_mul=" << tally.ec_mul << " ec_add=" << tally.ec_add
              << " inv=" << tally.inv << " mul=" << tally.mul << " add=" << tally.add << "\n";
    if (!ok) {
        std::cout << "FAILED\n";
        return 1;
    }
    std::cout << "VERIFIED\n";
    return 0;
}

int cmd_report(const std::string& out_path) {
    ecbs::CostReport report = ecbs::cost_comparison_report();
    std::cout << ecbs::format_cost_report(report);
    if (!out_path.empty()) {
        write_file_atomic(out_path,
                          ecbs::serialize_message(ecbs::cost_report_message(report)));
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_validate(const CurveOpts& curve_opts) {
    // Parse without validating so the report can show every failing check.
    ecbs::CurveParams params =
        curve_opts.file.empty()
            ? ecbs::registry_lookup(curve_opts.name)
            : ecbs::parse_curve_file_unchecked(read_file(curve_opts.file));
    auto report = ecbs::validate_params(params, curve_opts.test_mode);
    for (const auto& check : report.checks)
        std::cout << (check.pass ? "PASS  " : "FAIL  ") << check.name
                  << (check.detail.empty() ? "" : "  [" + check.detail + "]") << "\n";
    if (!report.all_pass()) {
        std::cout << "curve '" << params.name << "' REJECTED\n";
        return 3;
    }
    std::cout << "curve '" << params.name << "' OK\n";
    return 0;
}

int dispatch(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const ecbs::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ecbs::CurveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ecbs::StateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elliptic-curve blind signature toolkit"};
    app.require_subcommand(1);

    CurveOpts curve_opts;
    SeedOpt seed;
    std::string out_private, out_public, private_path, out_secret, out_r;
    std::string variant_name, r_path, public_path, message_path, out_blinded, out_factors;
    std::string session_path, blinded_path, out_share, factors_path, share_path;
    std::string out_signature, signature_path, report_out;
    std::string demo_message = "demo message";

    auto* keygen = app.add_subcommand("keygen", "generate a signer key pair");
    add_curve_opts(keygen, curve_opts);
    add_seed_opt(keygen, seed);
    keygen->add_option("--out-private", out_private, "private key envelope")->required();
    keygen->add_option("--out-public", out_public, "public key envelope")->required();

    auto* session = app.add_subcommand("session", "start a signing session and emit R");
    add_curve_opts(session, curve_opts);
    add_seed_opt(session, seed);
    session->add_option("--private", private_path, "signer private key envelope")->required();
    session->add_option("--out-secret", out_secret, "session secret (signer keeps)")->required();
    session->add_option("--out-r", out_r, "session point R envelope (send to requester)")
        ->required();

    auto* blind = app.add_subcommand("blind", "blind a message against a session point R");
    add_curve_opts(blind, curve_opts);
    add_seed_opt(blind, seed);
    blind->add_option("--variant", variant_name,
                      "generalized | educed-i | educed-ii | educed-iii")
        ->required();
    blind->add_option("--r", r_path, "session point R envelope")->required();
    blind->add_option("--public", public_path, "signer public key envelope")->required();
    blind->add_option("--message", message_path, "message file (raw bytes)")->required();
    blind->add_option("--out-blinded", out_blinded, "blinded message envelope (send to signer)")
        ->required();
    blind->add_option("--out-factors", out_factors, "blinding factors (requester keeps)")
        ->required();

    auto* sign = app.add_subcommand("sign", "sign a blinded message (consumes the session)");
    add_curve_opts(sign, curve_opts);
    sign->add_option("--private", private_path, "signer private key envelope")->required();
    sign->add_option("--session", session_path, "session secret from 'session'")->required();
    sign->add_option("--blinded", blinded_path, "blinded message envelope")->required();
    sign->add_option("--out-share", out_share, "blind signature share envelope")->required();

    auto* unblind = app.add_subcommand("unblind", "extract the final signature");
    add_curve_opts(unblind, curve_opts);
    unblind->add_option("--variant", variant_name, "must match the factors file when given");
    unblind->add_option("--factors", factors_path, "blinding factors from 'blind'")->required();
    unblind->add_option("--share", share_path, "share envelope from 'sign'")->required();
    unblind->add_option("--out-signature", out_signature, "signature envelope")->required();

    auto* verify = app.add_subcommand("verify", "verify a signature against a message");
    add_curve_opts(verify, curve_opts);
    verify->add_option("--public", public_path, "signer public key envelope")->required();
    verify->add_option("--message", message_path, "message file (raw bytes)")->required();
    verify->add_option("--signature", signature_path, "signature envelope")->required();

    auto* demo = app.add_subcommand("demo", "run all protocol phases in-process");
    add_curve_opts(demo, curve_opts);
    add_seed_opt(demo, seed);
    demo->add_option("--variant", variant_name,
                     "generalized | educed-i | educed-ii | educed-iii")
        ->required();
    demo->add_option("--message", demo_message, "message text to sign");

    auto* report = app.add_subcommand("report", "print the scheme cost comparison");
    report->add_option("--out", report_out, "also write a machine-readable envelope");

    auto* validate = app.add_subcommand("validate", "check curve parameters");
    add_curve_opts(validate, curve_opts);

    CLI11_PARSE(app, argc, argv);

    if (keygen->parsed())
        return dispatch([&] { return cmd_keygen(curve_opts, seed, out_private, out_public); });
    if (session->parsed())
        return dispatch(
            [&] { return cmd_session(curve_opts, seed, private_path, out_secret, out_r); });
    if (blind->parsed())
        return dispatch([&] {
            return cmd_blind(curve_opts, seed, variant_name, r_path, public_path, message_path,
                             out_blinded, out_factors);
        });
    if (sign->parsed())
        return dispatch([&] {
            return cmd_sign(curve_opts, private_path, session_path, blinded_path, out_share);
        });
    if (unblind->parsed())
        return dispatch([&] {
            return cmd_unblind(curve_opts, variant_name, factors_path, share_path, out_signature);
        });
    if (verify->parsed())
        return dispatch(
            [&] { return cmd_verify(curve_opts, public_path, message_path, signature_path); });
    if (demo->parsed())
        return dispatch(
            [&] { return cmd_demo(curve_opts, seed, variant_name, demo_message); });
    if (report->parsed())
        return dispatch([&] { return cmd_report(report_out); });
    if (validate->parsed())
        return dispatch([&] { return cmd_validate(curve_opts); });
    return 2;
}
