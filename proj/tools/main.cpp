#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "exactpack/pipeline.hpp"

using namespace exactpack;

namespace {

// exit codes by stage, per the pipeline contract
constexpr int kExitParse = 2;
constexpr int kExitDetect = 3;
constexpr int kExitEliminate = 4;
constexpr int kExitCertify = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void add_input_flags(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--input", config.input_path, "input file")->required();
    cmd->add_option("--format", config.format, "input format: packing | gram")
        ->check(CLI::IsMember({"packing", "gram"}));
    cmd->add_option("--d", config.d, "ambient dimension (packing format)");
    cmd->add_option("--n", config.n, "number of lines (packing format)");
    cmd->add_option("--tol", config.tol, "contact detection tolerance");
}

int cmd_inspect(const RunConfig& config) {
    NumericGram gram;
    try {
        gram = load_numeric_gram(config);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    std::cout << "n: " << gram.n << "\n";
    if (config.format == "packing") std::cout << "d: " << config.d << "\n";
    double mu = gram.n >= 2 ? coherence(gram) : 0.0;
    std::cout << "coherence: " << decimal_string(Rational(mu), 6) << "\n";
    if (gram.n > config.d) {
        RadicalValue bound = levenshtein_bound(config.d, gram.n);
        std::cout << "levenshtein bound: ";
        if (bound.exact_root)
            std::cout << rational_to_string(*bound.exact_root) << " = "
                      << decimal_string(*bound.exact_root, 6) << "\n";
        else
            std::cout << "sqrt(" << rational_to_string(bound.radicand) << ") = "
                      << decimal_string(Rational(bound.approx), 6) << "\n";
    }
    try {
        DetectedStructure det = detect_structure(gram, config.tol);
        std::cout << "contact edges: " << det.graph.edges.size() << "\n";
        std::cout << "free variables: " << det.pattern.free_count << "\n";
        std::cout << "pattern:\n";
        for (int i = 0; i < det.pattern.n; ++i) {
            std::cout << "  ";
            for (int j = 0; j < det.pattern.n; ++j) {
                switch (det.pattern.cell(i, j)) {
                    case Cell::diagonal: std::cout << "1      "; break;
                    case Cell::plus_mu: std::cout << "+mu    "; break;
                    case Cell::minus_mu: std::cout << "-mu    "; break;
                    case Cell::free_var: {
                        std::string name = det.pattern.free_name(i, j);
                        name.resize(7, ' ');
                        std::cout << name;
                        break;
                    }
                }
            }
            std::cout << "\n";
        }
    } catch (const StructureError& e) {
        std::cout << "structure: " << e.what() << "\n";
    }
    return 0;
}

int cmd_exactify(const RunConfig& config) {
    try {
        ExactifyResult result = run_exactify(config);

        std::cout << "minimal polynomial (ascending coefficients):";
        for (const Integer& c : result.derivation.minpoly.coeffs()) std::cout << " " << c.get_str();
        std::cout << "\n";
        AlgebraicNumber mu = result.derivation.mu;
        mu.refine_to(pow10_inv(config.digits));
        std::cout << "mu0 = " << decimal_string(mu.midpoint(), static_cast<int>(config.digits))
                  << "\n";
        std::cout << "verification: rank3 ok (" << result.certificate.rank.vanishing.size()
                  << " vanishing minors, nonzero 3x3 at {"
                  << result.certificate.rank.nonzero_rows[0] << ","
                  << result.certificate.rank.nonzero_rows[1] << ","
                  << result.certificate.rank.nonzero_rows[2] << "} sign "
                  << result.certificate.rank.nonzero_sign << ")\n";
        std::cout << "verification: psd ok (" << result.certificate.psd.principal3.size()
                  << " principal 3x3 minors above " << rational_to_string(result.certificate.psd.floor)
                  << " at " << result.certificate.psd.digits << " digits)\n";
        std::cout << "numeric residual: "
                  << decimal_string(result.certificate.numeric_residual, 10) << "\n";
        if (!config.out_path.empty()) {
            std::ofstream out(config.out_path, std::ios::binary);
            if (!out) throw CertifyError("cannot write " + config.out_path);
            out << result.certificate_json;
            std::cout << "certificate: " << config.out_path << "\n";
        }
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const StructureError& e) {
        std::cerr << "structure error: " << e.what() << "\n";
        return kExitDetect;
    } catch (const EliminationError& e) {
        std::cerr << "elimination error: " << e.what() << "\n";
        if (!e.diagnostic_poly.empty()) std::cerr << "  polynomial: " << e.diagnostic_poly << "\n";
        return kExitEliminate;
    } catch (const CertifyError& e) {
        std::cerr << "certification error: " << e.what() << "\n";
        return kExitCertify;
    }
}

int cmd_recheck(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    }
    RecheckReport report = recheck_certificate(text);
    if (report.accepted) {
        std::cout << "certificate accepted\n";
        return 0;
    }
    std::cout << "certificate rejected:\n";
    for (const std::string& f : report.failures) std::cout << "  - " << f << "\n";
    return kExitCertify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact line-packing toolkit"};
    app.require_subcommand(1);

    RunConfig config;
    std::string cert_path;

    CLI::App* inspect = app.add_subcommand("inspect", "report coherence, bounds, and structure");
    add_input_flags(inspect, config);

    CLI::App* exactify =
        app.add_subcommand("exactify", "derive the exact Gram matrix and emit a certificate");
    add_input_flags(exactify, config);
    exactify->add_option("--script", config.script, "derivation script: default | auto | path");
    exactify->add_option("--digits", config.digits, "certification precision digits")
        ->check(CLI::Range(10u, 1000u));
    exactify->add_option("--out", config.out_path, "certificate output path");
    exactify->add_option("--threads", config.threads, "worker thread count");

    CLI::App* recheck = app.add_subcommand("recheck", "independently re-verify a certificate");
    recheck->add_option("certificate", cert_path, "certificate file")->required();

    CLI11_PARSE(app, argc, argv);

    if (inspect->parsed()) return cmd_inspect(config);
    if (exactify->parsed()) return cmd_exactify(config);
    if (recheck->parsed()) return cmd_recheck(cert_path);
    return 1;
}
