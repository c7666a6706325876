#include "specs.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "util.hpp"

namespace morphbb {

namespace {

struct BuiltinSpec {
    const char* name;
    std::vector<int> orders;
    std::vector<std::string> A, B;
};

const std::vector<BuiltinSpec>& builtin_table() {
    static const std::vector<BuiltinSpec> table = {
        {"bb72", {6, 6}, {"x^3", "y", "y^2"}, {"y^3", "x", "x^2"}},
        {"bb90", {15, 3}, {"x^9", "y", "y^2"}, {"1", "x^2", "x^7"}},
        {"bb108", {9, 6}, {"x^3", "y", "y^2"}, {"y^3", "x", "x^2"}},
        {"bb144", {12, 6}, {"x^3", "y", "y^2"}, {"y^3", "x", "x^2"}},
        {"bb288", {12, 12}, {"x^3", "y^2", "y^7"}, {"y^3", "x", "x^2"}},
        {"bb360", {30, 6}, {"x^9", "y", "y^2"}, {"y^3", "x^25", "x^26"}},
        {"bb756", {21, 18}, {"x^3", "y^10", "y^17"}, {"y^5", "x^3", "x^19"}},
        {"toric_d4", {4, 4}, {"1", "x"}, {"1", "y"}},
        {"code422", {2}, {"1", "x"}, {"1", "x"}},
    };
    return table;
}

}  // namespace

std::vector<std::string> builtin_code_names() {
    std::vector<std::string> out;
    for (const auto& s : builtin_table()) out.push_back(s.name);
    return out;
}

bool is_builtin_code(const std::string& name) {
    for (const auto& s : builtin_table())
        if (name == s.name) return true;
    return false;
}

BgaCode builtin_code(const std::string& name) {
    for (const auto& s : builtin_table())
        if (name == s.name) return build_code_named(s.orders, s.A, s.B);
    throw error("unknown builtin code '" + name + "'");
}

BgaCode code_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    std::vector<int> orders = j.at("orders").get<std::vector<int>>();
    std::vector<std::string> A = j.at("A").get<std::vector<std::string>>();
    std::vector<std::string> B = j.at("B").get<std::vector<std::string>>();
    return build_code_named(orders, A, B);
}

std::string code_to_json(const BgaCode& code) {
    nlohmann::json j;
    j["orders"] = code.group.orders;
    std::vector<std::string> a, b;
    for (uint32_t e : code.a_order) a.push_back(code.group.element_name(e));
    for (uint32_t e : code.b_order) b.push_back(code.group.element_name(e));
    j["A"] = a;
    j["B"] = b;
    return j.dump(2);
}

BgaCode load_code(const std::string& name_or_path) {
    if (is_builtin_code(name_or_path)) return builtin_code(name_or_path);
    std::ifstream in(name_or_path);
    if (!in) throw error("not a builtin code and not a readable file: " + name_or_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return code_from_json(ss.str());
}

std::vector<Round2Instance> round2_reversal_instances() {
    return {
        {"bb72", {"x^3", "y", "y^2"}, {"x", "x^2", "y^3"}, "f_x"},
        {"bb72", {"x^3", "y^2", "y"}, {"x", "y^3", "x^2"}, "f_x"},
        {"bb72", {"y", "y^2", "x^3"}, {"y^3", "x", "x^2"}, "f_y"},
        {"bb72", {"y", "x^3", "y^2"}, {"y^3", "x^2", "x"}, "f_y"},
        {"bb72", {"y^2", "y", "x^3"}, {"x^2", "x", "y^3"}, "f_xy"},
        {"bb72", {"y^2", "x^3", "y"}, {"x^2", "y^3", "x"}, "f_xy"},
        {"bb144", {"x^3", "y^2", "y"}, {"x", "y^3", "x^2"}, "f_x"},
        {"bb144", {"x^3", "y", "y^2"}, {"x", "x^2", "y^3"}, "f_x"},
        {"bb144", {"y", "y^2", "x^3"}, {"y^3", "x", "x^2"}, "f_y"},
        {"bb144", {"y", "x^3", "y^2"}, {"y^3", "x^2", "x"}, "f_y"},
    };
}

}  // namespace morphbb
