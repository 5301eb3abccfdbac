#pragma once

#include <string>

#include "mg1/model.hpp"

namespace mg1 {

/// JSON model document:
///   { "m0": 1, "m1": 1,
///     "a_blocks": [{"k": -1, "matrix": [[0.6]]}, ...],
///     "b_down": [[0.6]],
///     "b_blocks": [{"k": 0, "matrix": [[0.5]]}, ...],
///     "a_tail": {"family": "pareto", "params": {"alpha": 3, "gamma": 1},
///                "row_scale": [0.3], "col_profile": [1.0]} }
/// Missing block indices are zero; "a_tail"/"b_tail" may be absent, null or family "none".
/// Malformed documents raise ParseError; structural defects raise the model's own errors.
MG1Model parse_model(const std::string& text);
MG1Model load_model(const std::string& path);

std::string model_to_json(const MG1Model& model);

}  // namespace mg1
