#include "exactpack/pipeline.hpp"

#include <fstream>
#include <sstream>

namespace exactpack {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

NumericGram load_numeric_gram(const RunConfig& config) {
    std::string text = read_file(config.input_path);
    if (config.format == "gram") return parse_gram(text);
    if (config.format != "packing")
        throw ParseError("unknown input format '" + config.format + "'");
    PackingMatrix p = parse_packing(text, config.d, config.n);
    return gram_from_packing(p);
}

ExactifyResult run_exactify(const RunConfig& config) {
    NumericGram gram = load_numeric_gram(config);
    DetectedStructure detection = detect_structure(gram, config.tol);

    auto derive = [&]() -> ScriptResult {
        if (config.script == "auto") {
            auto shot = auto_pipeline(detection.pattern, detection.witness, config.auto_budget);
            if (std::holds_alternative<AutoFailure>(shot))
                throw EliminationError(
                    0, "automatic pipeline failed: " + std::get<AutoFailure>(shot).reason);
            return std::get<ScriptResult>(std::move(shot));
        }
        std::vector<StepSpec> steps = config.script == "default"
                                          ? default_script()
                                          : parse_script_json(read_file(config.script));
        return run_script(steps, detection.pattern, detection.witness);
    };
    ScriptResult derivation = derive();

    QuotientRing ring = build_ring(derivation.minpoly, derivation.store, derivation.mu);
    ExactGram exact =
        complete_tail_entries(ring, derivation.store, detection.pattern, detection.witness);
    RankEvidence rank = verify_rank3(exact, ring, config.threads);
    PsdEvidence psd = verify_psd(exact, ring, detection.pattern, config.digits,
                                 make_rational(1, 10000), config.threads);
    Certificate certificate =
        build_certificate(ring, exact, detection.pattern, rank, psd, gram);
    std::string json = emit_certificate(certificate);
    return ExactifyResult{std::move(detection), std::move(derivation), std::move(certificate),
                          std::move(json)};
}

}  // namespace exactpack
