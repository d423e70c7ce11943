#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace roulette::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitCheckFailed = 2;

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `--out` (written atomically) or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Decodes a subcommand's JSON output into its typed structs by its "schema"
/// field and encodes it again. Throws ValidationError if the document does
/// not follow the schema.
nlohmann::json reparse(const nlohmann::json& report);

}  // namespace roulette::cli
