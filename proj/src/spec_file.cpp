// SPDX-License-Identifier: Apache-2.0
#include "skipfree/spec_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "skipfree/errors.hpp"
#include "skipfree/models.hpp"

namespace skipfree {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(std::string(where) + " is missing \"" + key + "\"");
    return *it;
}

double number(const json& obj, const char* key, const char* where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw FormatError(std::string(where) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

std::vector<double> numbers(const json& v, const char* what) {
    if (!v.is_array()) throw FormatError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) throw FormatError(std::string(what) + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

CostFunction cost_from_json(const json& c) {
    if (!c.is_object()) throw FormatError("cost must be an object");
    json p = c.value("params", json::object());
    for (auto it = c.begin(); it != c.end(); ++it) {
        if (it.key() != "params" && it.key() != "kind") p[it.key()] = it.value();
    }
    const json& kind_v = require(c, "kind", "cost");
    if (!kind_v.is_string()) throw FormatError("cost.kind must be a string");
    const std::string kind = kind_v.get<std::string>();
    if (kind == "zero") return CostFunction::zero();
    if (kind == "geometric") {
        const double ratio = number(p, "ratio", "geometric cost");
        const double scale = p.contains("scale") ? number(p, "scale", "geometric cost") : 1.0;
        const bool zero = p.value("zero_at_origin", false);
        return CostFunction::geometric(ratio, scale, zero);
    }
    if (kind == "indicator") {
        std::vector<State> states;
        for (double s : numbers(require(p, "states", "indicator cost"), "indicator states")) {
            if (s < 0.0 || s != static_cast<double>(static_cast<State>(s))) {
                throw FormatError("indicator states must be nonnegative integers");
            }
            states.push_back(static_cast<State>(s));
        }
        return CostFunction::indicator(std::move(states));
    }
    if (kind == "table") {
        std::vector<double> values = numbers(require(p, "values", "table cost"), "table values");
        const double beyond = p.contains("default") ? number(p, "default", "table cost") : 0.0;
        return CostFunction::table(std::move(values), beyond);
    }
    throw FormatError("unknown cost kind \"" + kind + "\"");
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

} // namespace

const RowMatrix& ChainSpec::matrix() const {
    if (kernel) return *kernel;
    if (generator) return *generator;
    throw FormatError("chain spec holds no model");
}

std::string ChainSpec::describe() const { return matrix().describe(); }

CostFunction parse_cost(const std::string& text) {
    try {
        return cost_from_json(parse_json(text));
    } catch (const DomainError& e) {
        throw FormatError(std::string("invalid cost: ") + e.what());
    }
}

ChainSpec parse_spec(const std::string& text, const std::filesystem::path& base_dir) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw FormatError("chain spec must be a JSON object");
    ChainSpec spec;
    spec.source = doc.dump();
    const json& fam = require(doc, "family", "chain spec");
    if (!fam.is_string()) throw FormatError("family must be a string");
    spec.family = fam.get<std::string>();
    const json params = doc.value("params", json::object());
    if (!params.is_object()) throw FormatError("params must be an object");

    try {
        if (spec.family == "gim1" || spec.family == "mg1") {
            const double z = number(params, "z", "params");
            spec.z = z;
            if (spec.family == "gim1") {
                spec.kernel = std::make_shared<GiM1Kernel>(z);
                spec.cost = gim1_example_cost(z);
            } else {
                spec.kernel = std::make_shared<MG1Kernel>(z);
                spec.cost = mg1_example_cost(z);
            }
        } else if (spec.family == "birth_death") {
            if (params.contains("birth") || params.contains("death")) {
                spec.generator = std::make_shared<BirthDeathGenerator>(
                    numbers(require(params, "birth", "params"), "birth rates"),
                    numbers(require(params, "death", "params"), "death rates"));
            } else {
                spec.lambda = number(params, "lambda", "params");
                spec.mu = number(params, "mu", "params");
                spec.generator = std::make_shared<BirthDeathGenerator>(*spec.lambda, *spec.mu);
            }
            spec.cost = CostFunction::indicator({0});
        } else if (spec.family == "finite_matrix" || spec.family == "finite_generator") {
            const json& pv = require(params, "path", "params");
            if (!pv.is_string()) throw FormatError("params.path must be a string");
            std::filesystem::path path = pv.get<std::string>();
            if (path.is_relative()) path = base_dir / path;
            FiniteModel m = load_finite_matrix(path);
            if (auto* k = std::get_if<std::shared_ptr<FiniteKernel>>(&m)) {
                if (spec.family == "finite_generator") {
                    throw FormatError("finite_generator needs a matrix with negative diagonal");
                }
                spec.kernel = *k;
            } else {
                spec.generator = std::get<std::shared_ptr<FiniteGenerator>>(m);
            }
        } else {
            throw FormatError("unknown family \"" + spec.family + "\"");
        }
    } catch (const DomainError& e) {
        throw FormatError(std::string("invalid parameters: ") + e.what());
    } catch (const StructureViolation& e) {
        throw FormatError(std::string("invalid parameters: ") + e.what());
    }

    if (auto it = doc.find("cost"); it != doc.end()) {
        try {
            spec.cost = cost_from_json(*it);
        } catch (const DomainError& e) {
            throw FormatError(std::string("invalid cost: ") + e.what());
        }
    } else if (spec.family == "finite_matrix" || spec.family == "finite_generator") {
        throw FormatError("finite families need an explicit cost");
    } else {
        spec.default_cost = true;
    }
    return spec;
}

ChainSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open spec file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), path.parent_path());
}

} // namespace skipfree
