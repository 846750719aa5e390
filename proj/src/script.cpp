#include <json.hpp>

#include "exactpack/eliminate.hpp"

namespace exactpack {

namespace {

using nlohmann::json;

StepAction::Kind kind_from_string(const std::string& s) {
    if (s == "solve_linear") return StepAction::Kind::solve_linear;
    if (s == "solve_square") return StepAction::Kind::solve_square;
    if (s == "sign_from_witness") return StepAction::Kind::sign_from_witness;
    if (s == "mu_lower_bound") return StepAction::Kind::mu_lower_bound;
    if (s == "eliminate_to_mu") return StepAction::Kind::eliminate_to_mu;
    throw std::invalid_argument("unknown script action '" + s + "'");
}

std::string kind_to_string(StepAction::Kind k) {
    switch (k) {
        case StepAction::Kind::solve_linear: return "solve_linear";
        case StepAction::Kind::solve_square: return "solve_square";
        case StepAction::Kind::sign_from_witness: return "sign_from_witness";
        case StepAction::Kind::mu_lower_bound: return "mu_lower_bound";
        case StepAction::Kind::eliminate_to_mu: return "eliminate_to_mu";
    }
    return "?";
}

}  // namespace

std::vector<StepSpec> parse_script_json(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.contains("steps") || !doc["steps"].is_array())
        throw std::invalid_argument("script: missing steps array");
    std::vector<StepSpec> out;
    for (const auto& js : doc["steps"]) {
        StepSpec spec;
        spec.step = js.at("step").get<int>();
        spec.rows = js.at("rows").get<std::vector<int>>();
        spec.cols = js.at("cols").get<std::vector<int>>();
        spec.var_order = js.at("var_order").get<std::vector<std::string>>();
        for (const auto& ja : js.at("actions")) {
            StepAction act;
            act.kind = kind_from_string(ja.at("action").get<std::string>());
            if (ja.contains("target")) act.target = ja["target"].get<std::string>();
            if (ja.contains("eliminate"))
                act.eliminate = ja["eliminate"].get<std::vector<std::string>>();
            if (ja.contains("minor")) act.minor_index = ja["minor"].get<int>();
            spec.actions.push_back(std::move(act));
        }
        out.push_back(std::move(spec));
    }
    return out;
}

std::string script_to_json(const std::vector<StepSpec>& script) {
    json steps = json::array();
    for (const StepSpec& spec : script) {
        json js;
        js["step"] = spec.step;
        js["rows"] = spec.rows;
        js["cols"] = spec.cols;
        js["var_order"] = spec.var_order;
        json actions = json::array();
        for (const StepAction& act : spec.actions) {
            json ja;
            ja["action"] = kind_to_string(act.kind);
            if (!act.target.empty()) ja["target"] = act.target;
            if (!act.eliminate.empty()) ja["eliminate"] = act.eliminate;
            if (act.minor_index >= 0) ja["minor"] = act.minor_index;
            actions.push_back(ja);
        }
        js["actions"] = actions;
        steps.push_back(js);
    }
    json doc;
    doc["name"] = "minor-elimination-8lines";
    doc["steps"] = steps;
    return doc.dump(2) + "\n";
}

// The shipped ten-step derivation for the 8-line pattern. Each step fixes a
// row/column block; actions record which derivation move the step performs.
std::vector<StepSpec> default_script() {
    auto lin = [](const std::string& target) {
        StepAction a;
        a.kind = StepAction::Kind::solve_linear;
        a.target = target;
        return a;
    };
    auto sqr = [](const std::string& target) {
        StepAction a;
        a.kind = StepAction::Kind::solve_square;
        a.target = target;
        return a;
    };
    auto sgn = [](const std::string& target) {
        StepAction a;
        a.kind = StepAction::Kind::sign_from_witness;
        a.target = target;
        return a;
    };
    auto mub = [](const std::string& target) {
        StepAction a;
        a.kind = StepAction::Kind::mu_lower_bound;
        a.target = target;
        return a;
    };
    auto elim = [](std::vector<std::string> order) {
        StepAction a;
        a.kind = StepAction::Kind::eliminate_to_mu;
        a.eliminate = std::move(order);
        return a;
    };

    std::vector<StepSpec> script;
    script.push_back({1, {2, 5, 6, 7}, {2, 5, 6, 7}, {"mu", "a6"}, {lin("a6")}});
    script.push_back(
        {2, {2, 3, 5, 6, 7}, {2, 3, 5, 6, 7}, {"mu", "a8", "a9"}, {lin("a9"), sqr("a8")}});
    script.push_back({3,
                      {1, 2, 3, 5, 6, 7},
                      {1, 2, 3, 5, 6, 7},
                      {"mu", "a8", "a3", "a1", "a4"},
                      {mub("a3"), lin("a4")}});
    script.push_back({4, {3, 4, 6, 7}, {3, 4, 6, 7}, {"mu", "a8", "a12"}, {sqr("a12")}});
    script.push_back(
        {5, {2, 3, 4, 6, 7}, {2, 4, 6, 7}, {"mu", "a5", "a12", "a8"}, {lin("a12"), sgn("a8")}});
    script.push_back({6,
                      {2, 3, 5, 6},
                      {1, 2, 3, 5, 6, 7},
                      {"mu", "a8", "a3", "a1"},
                      {lin("a1")}});
    script.push_back({7, {1, 2, 3, 5, 6}, {1, 2, 3, 5, 6}, {"mu", "a3", "a8"}, {lin("a3")}});
    script.push_back(
        {8, {4, 5, 6, 7}, {2, 3, 5, 6, 7}, {"mu", "a8", "a5", "a11"}, {lin("a11")}});
    script.push_back({9, {1, 3, 4, 6, 7}, {1, 3, 4, 6, 7}, {"mu", "a2", "a8"}, {lin("a2")}});
    script.push_back({10,
                      {1, 4, 5, 6, 8},
                      {1, 4, 5, 6, 8},
                      {"mu", "a8", "a5", "a13"},
                      {lin("a13"), lin("a5"), elim({"a8"})}});
    return script;
}

}  // namespace exactpack
