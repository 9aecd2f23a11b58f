#pragma once

// JSON persistence for models, evidence and LP points.
//
// Model schema:
//   {"variables":  [{"id": "x1", "alphabet": ["0", "1"]}, ...],
//    "behaviours": [{"scope": ["x1", "x2"], "allowed": [["0","0"], ["1","1"]]}, ...],
//    "evidence":   [{"id": "x1", "weights": {"0": "1", "1": "2.5"}}, ...]}
// Ids and symbols may be given as strings or integers. Weights are decimal
// strings (numbers are accepted too) and every alphabet symbol needs one.

#include "lprx/lp.hpp"
#include "lprx/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lprx {

/// `source` prefixes every error message (typically the file name). Syntax
/// errors report line and column; schema errors report the JSON path.
FactorGraphModel parse_model_json(std::string_view text, const std::string& source = "<model>");
FactorGraphModel load_model(const std::string& path);
/// Deterministic, pretty-printed; weights are written with 17 significant digits.
std::string model_to_json(const FactorGraphModel& model);

/// {"evidence": [...]} or a bare evidence array, resolved against the model.
std::vector<EvidenceTable> parse_evidence_json(const FactorGraphModel& model, std::string_view text,
                                               const std::string& source = "<evidence>");

/// {"values": {"<variable name>": "num/den", ...}}; omitted coordinates are zero.
LpPoint parse_point_json(const LinearProgram& program, std::string_view text,
                         const std::string& source = "<point>");
/// Nonzero coordinates only, in catalog order.
std::string point_to_json(const LinearProgram& program, const LpPoint& point);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

} // namespace lprx
