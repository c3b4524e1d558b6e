#pragma once

#include "prodwalk/io.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace prodwalk::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Executes one subcommand. `args` excludes the program name. Writes the JSON
// report to --out (or `out` when --out is absent) and a CSV companion for
// sweep/adversary runs. Returns 0 on success, 1 on a domain error (embedded in
// the report), 2 on a usage error (message on `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// {"manifest": manifest, "result": result} or {"manifest": ..., "error": ...}
// with sorted keys; `csv` (if nonempty) goes next to `path`.
void write_report(const Json& body, const Json& manifest, const std::string& path, const std::string& csv,
                  std::ostream& fallback);

// foo.json -> foo.csv, anything else -> anything.csv
[[nodiscard]] std::string csv_path_for(const std::string& json_path);

} // namespace prodwalk::cli
