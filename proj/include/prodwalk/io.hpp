#pragma once

// JSON input parsing and JSON/CSV serialisation of every result type.

#include "prodwalk/adversary.hpp"
#include "prodwalk/certificates.hpp"
#include "prodwalk/coefficients.hpp"
#include "prodwalk/distributions.hpp"
#include "prodwalk/evaluator.hpp"
#include "prodwalk/lemmas.hpp"
#include "prodwalk/riesz.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prodwalk {

using Json = nlohmann::json;

// Parse errors come back as SchemaError naming the line/column or the
// offending field path (e.g. "atoms[1][0]").
[[nodiscard]] Json parse_json_text(std::string_view text, std::string_view source);

// {"kind":"finite","atoms":[[0,0.5],[2,0.5]]} or {"kind":"one_plus_cosine"}.
[[nodiscard]] Distribution distribution_from_json(const Json& j);

// {"norm":"linf","coeffs":[[1,0],[0,1]]}; scalar lists like [1,-1] are d = 1.
// `norm_override` replaces the file's norm when given.
[[nodiscard]] CoefficientVector coefficients_from_json(const Json& j, std::optional<Norm> norm_override = {});

// Plain JSON integer array.
[[nodiscard]] std::vector<std::int64_t> sequence_from_json(const Json& j);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

[[nodiscard]] Json to_json(const ValidationReport& r);
[[nodiscard]] Json to_json(const MomentProfile& p);
[[nodiscard]] Json to_json(const Certificate& c);
[[nodiscard]] Json to_json(const EstimateResult& e);
[[nodiscard]] Json to_json(const CoefficientVector& cv);
[[nodiscard]] Json to_json(const RademacherResult& r);
[[nodiscard]] Json to_json(const SuiteReport& r);
[[nodiscard]] Json to_json(const LacunarySequence& s);
[[nodiscard]] Json to_json(const QuadratureResult& q);
[[nodiscard]] Json to_json(const SweepReport& r);
[[nodiscard]] Json to_json(const SearchConfig& c);
[[nodiscard]] Json to_json(const SearchResult& r);

// Columns: trial, ratio, a0..an.
[[nodiscard]] std::string sweep_csv(const SweepReport& r);
// Columns: restart, start, step, value.
[[nodiscard]] std::string trace_csv(const SearchResult& r);

} // namespace prodwalk
