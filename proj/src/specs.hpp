#pragma once

#include <string>
#include <vector>

#include "bga.hpp"

namespace morphbb {

// Built-in code definitions used throughout: the seven weight-6 bivariate
// bicycle codes, the d=4 toric code, and the [[4,2,2]] code.
std::vector<std::string> builtin_code_names();
bool is_builtin_code(const std::string& name);
BgaCode builtin_code(const std::string& name);

// {"orders":[6,6],"A":["x^3","y","y^2"],"B":["y^3","x","x^2"]}
BgaCode code_from_json(const std::string& json_text);
std::string code_to_json(const BgaCode& code);

// Resolves a builtin name or a JSON file path.
BgaCode load_code(const std::string& name_or_path);

// Orderings from the round-2-reversal study: (A, B, hom) tuples over l=m=6
// and l=12, m=6 whose reversed-round-2 protocols improve the distance.
struct Round2Instance {
    std::string code_name;
    std::vector<std::string> A, B;
    std::string hom;
};
std::vector<Round2Instance> round2_reversal_instances();

}  // namespace morphbb
