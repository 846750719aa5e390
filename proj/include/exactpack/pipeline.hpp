#pragma once

#include "exactpack/certify.hpp"

namespace exactpack {

struct RunConfig {
    std::string input_path;
    std::string format = "packing";  // "packing" | "gram"
    int d = 3;
    int n = 8;
    double tol = 1e-4;
    std::string script = "default";  // "default" | "auto" | path to a JSON script
    unsigned digits = 100;
    std::string out_path;            // certificate destination; empty = stdout only
    int threads = 1;
    int auto_budget = 500;
};

struct ExactifyResult {
    DetectedStructure detection;
    ScriptResult derivation;
    Certificate certificate;
    std::string certificate_json;
};

NumericGram load_numeric_gram(const RunConfig& config);

// detect -> derive -> ring -> completion -> verification -> certificate
ExactifyResult run_exactify(const RunConfig& config);

}  // namespace exactpack
