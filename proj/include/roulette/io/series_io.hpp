#pragma once

// Text formats for p_n series and survivor pmfs.
//
// CSV: one "# roulette <kind> csv v1" line, then the column line
//   n,k,numerator,denominator,value_decimal,err_radius,provenance,reps
// k is blank for series rows. numerator/denominator are the reduced exact
// rational for exact rows and blank otherwise. value_decimal has 17
// significant digits: the correctly rounded rational for exact rows, the
// stored double (or MPFR value) otherwise. Series CSV carries the flag and
// warnings as "# flagged" and "# warning: ..." lines after the schema line.
//
// JSON mirrors the rows; exact integers are decimal strings.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "roulette/exact/recurrence.hpp"
#include "roulette/exact/survivor_pmf.hpp"
#include "roulette/sim/game.hpp"

namespace roulette::io {

inline constexpr std::string_view kSeriesSchema = "roulette pseries csv v1";
inline constexpr std::string_view kPmfSchema = "roulette pmf csv v1";
inline constexpr std::string_view kMcSchema = "roulette mc csv v1";
inline constexpr std::string_view kSeriesJsonSchema = "roulette.pseries.v1";
inline constexpr std::string_view kPmfJsonSchema = "roulette.pmf.v1";
inline constexpr std::string_view kRowColumns = "n,k,numerator,denominator,value_decimal,err_radius,provenance,reps";

/// "%.17g"; reads back to the same double.
std::string decimal17(double v);
/// Correctly rounded 17-significant-digit rendering of an exact rational.
std::string decimal17(const mpq_class& q);

struct PmfRow {
    unsigned k = 0;
    exact::Provenance provenance = exact::Provenance::exact;
    std::optional<mpq_class> exact;  ///< set iff provenance == exact
    std::string value_decimal;
    double err_radius = 0.0;

    friend bool operator==(const PmfRow& a, const PmfRow& b) {
        return a.k == b.k && a.provenance == b.provenance && a.exact.has_value() == b.exact.has_value() &&
               (!a.exact || *a.exact == *b.exact) && a.value_decimal == b.value_decimal &&
               a.err_radius == b.err_radius;
    }
};

struct PmfTable {
    unsigned n = 0;
    std::vector<PmfRow> rows;  ///< k = 0..n-2

    friend bool operator==(const PmfTable& a, const PmfTable& b) { return a.n == b.n && a.rows == b.rows; }
};

PmfTable pmf_table(const exact::SurvivorPmf& pmf);
PmfTable pmf_table(const exact::CertifiedPmf& pmf);
/// Requires every row to be exact; rebuilds the integer weights over (n-1)^n.
exact::SurvivorPmf to_survivor_pmf(const PmfTable& table);

std::string pmf_csv(const PmfTable& table);
PmfTable parse_pmf_csv(std::string_view text);
nlohmann::json pmf_json(const PmfTable& table);
PmfTable pmf_from_json(const nlohmann::json& j);

std::string pseries_csv(const exact::PSeries& series);
exact::PSeries parse_pseries_csv(std::string_view text);
nlohmann::json pseries_json(const exact::PSeries& series);
exact::PSeries pseries_from_json(const nlohmann::json& j);
/// Accepts either format, choosing by the first non-blank character.
exact::PSeries parse_pseries(std::string_view text);

/// n,reps,seed,point,stderr
std::string mc_csv(const std::vector<std::pair<std::uint64_t, sim::McEstimate>>& rows);

}  // namespace roulette::io
