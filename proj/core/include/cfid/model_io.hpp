#ifndef CFID_MODEL_IO_HPP
#define CFID_MODEL_IO_HPP

#include <string>
#include <variant>

#include "cfid/model.hpp"

namespace cfid::scm {

/// Model file schema (JSON):
///   {"family":"A"|"B", "K":int, "M":int, "N":int,
///    "a":[K], "c": [N] (A) | [K][N] (B), "d":[K][N] (B only),
///    "b":[K][N][M], "u":[K][N][M]}
/// Summary file schema:
///   {"family":"A"|"B", "K":int, "M":int, "N":int,
///    "a":[K], "c":[N], "b0":[N][M]}
/// Validation failures raise ParseError citing the offending JSON path.

Model model_from_json_text(const std::string& text);
std::string model_to_json_text(const Model& m, int indent = -1);

ObservedSummary summary_from_json_text(const std::string& text);
std::string summary_to_json_text(const ObservedSummary& s, int indent = -1);

/// A file holding either a full model (keys b/u present) or a summary
/// (key b0 present).
using ModelOrSummary = std::variant<Model, ObservedSummary>;
ModelOrSummary model_or_summary_from_json_text(const std::string& text);

Model load_model(const std::string& path);
ModelOrSummary load_model_or_summary(const std::string& path);
void save_model(const Model& m, const std::string& path);

}  // namespace cfid::scm

#endif
