#include "roulette/io/series_io.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "roulette/common.hpp"

namespace roulette::io {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out(1);
    for (const char ch : line) {
        if (ch == ',')
            out.emplace_back();
        else if (ch != '\r')
            out.back().push_back(ch);
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        out.push_back(text.substr(0, nl));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
    require(!s.empty() && s.find_first_not_of("0123456789") == std::string::npos,
            std::string("malformed ") + what + " '" + s + "'");
    return std::stoull(s);
}

double parse_double(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    require(!s.empty() && end == s.c_str() + s.size(), std::string("malformed ") + what + " '" + s + "'");
    return v;
}

mpz_class parse_mpz(const std::string& s) {
    mpz_class z;
    require(!s.empty() && z.set_str(s, 10) == 0, "malformed integer '" + s + "'");
    return z;
}

double nearest_double(const mpq_class& q) {
    mpfr_t t;
    mpfr_init2(t, 53);
    mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
    const double d = mpfr_get_d(t, MPFR_RNDN);
    mpfr_clear(t);
    return d;
}

struct Row {
    std::uint64_t n = 0;
    std::optional<unsigned> k;
    exact::Provenance provenance = exact::Provenance::exact;
    std::optional<mpq_class> exact;
    std::string value_decimal;
    double err_radius = 0.0;
    std::uint64_t reps = 0;
};

std::string render_row(const Row& r) {
    std::string s = std::to_string(r.n) + ',';
    if (r.k) s += std::to_string(*r.k);
    s += ',';
    if (r.exact) s += r.exact->get_num().get_str() + ',' + r.exact->get_den().get_str();
    else s += ',';
    s += ',' + r.value_decimal + ',' + decimal17(r.err_radius) + ',' + exact::provenance_name(r.provenance) + ',' +
         std::to_string(r.reps) + '\n';
    return s;
}

struct Parsed {
    std::vector<Row> rows;
    bool flagged = false;
    std::vector<std::string> warnings;
};

Parsed parse_rows(std::string_view text, std::string_view schema) {
    const auto lines = lines_of(text);
    require(!lines.empty() && lines[0] == "# " + std::string(schema),
            "expected CSV schema line '# " + std::string(schema) + "'");
    Parsed out;
    std::size_t i = 1;
    for (; i < lines.size() && !lines[i].empty() && lines[i][0] == '#'; ++i) {
        const std::string_view l = lines[i];
        if (l == "# flagged") out.flagged = true;
        else if (l.starts_with("# warning: ")) out.warnings.emplace_back(l.substr(11));
    }
    require(i < lines.size() && lines[i] == kRowColumns, "expected CSV column line '" + std::string(kRowColumns) + "'");
    for (++i; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv_line(lines[i]);
        require(f.size() == 8, "CSV row needs 8 fields: '" + std::string(lines[i]) + "'");
        Row r;
        r.n = parse_u64(f[0], "n");
        if (!f[1].empty()) r.k = static_cast<unsigned>(parse_u64(f[1], "k"));
        r.provenance = exact::parse_provenance(f[6]);
        if (r.provenance == exact::Provenance::exact) {
            const mpz_class num = parse_mpz(f[2]), den = parse_mpz(f[3]);
            require(den > 0, "zero denominator");
            mpq_class q(num, den);
            q.canonicalize();
            r.exact = q;
        } else {
            require(f[2].empty() && f[3].empty(), "only exact rows carry numerator/denominator");
        }
        parse_double(f[4], "value_decimal");
        r.value_decimal = f[4];
        r.err_radius = parse_double(f[5], "err_radius");
        r.reps = parse_u64(f[7], "reps");
        out.rows.push_back(std::move(r));
    }
    return out;
}

std::string rational_string(const mpz_class& z) { return z.get_str(); }

json exact_fields(const std::optional<mpq_class>& q) {
    json j;
    if (q) {
        j["numerator"] = rational_string(q->get_num());
        j["denominator"] = rational_string(q->get_den());
    } else {
        j["numerator"] = nullptr;
        j["denominator"] = nullptr;
    }
    return j;
}

std::optional<mpq_class> exact_from(const json& j, exact::Provenance p) {
    if (p != exact::Provenance::exact) {
        require(j.at("numerator").is_null() && j.at("denominator").is_null(),
                "only exact entries carry numerator/denominator");
        return std::nullopt;
    }
    mpq_class q(parse_mpz(j.at("numerator").get<std::string>()), parse_mpz(j.at("denominator").get<std::string>()));
    require(q.get_den() != 0, "zero denominator");
    q.canonicalize();
    return q;
}

void require_schema(const json& j, std::string_view schema) {
    require(j.is_object() && j.value("schema", std::string()) == schema,
            "expected JSON schema '" + std::string(schema) + "'");
}

}  // namespace

std::string decimal17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string decimal17(const mpq_class& q) {
    mpfr_t t;
    mpfr_init2(t, 256);
    mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDN);
    char buf[64];
    mpfr_snprintf(buf, sizeof buf, "%.17Rg", t);
    mpfr_clear(t);
    return buf;
}

PmfTable pmf_table(const exact::SurvivorPmf& pmf) {
    PmfTable t{pmf.n, {}};
    for (unsigned k = 0; k < pmf.weights.size(); ++k) {
        const mpq_class q = pmf.probability(k);
        t.rows.push_back({k, exact::Provenance::exact, q, decimal17(q), 0.0});
    }
    return t;
}

PmfTable pmf_table(const exact::CertifiedPmf& pmf) {
    PmfTable t{pmf.n, {}};
    for (unsigned k = 0; k < pmf.probability.size(); ++k)
        t.rows.push_back({k, exact::Provenance::certified, std::nullopt, pmf.probability[k].to_string(17),
                          pmf.radius[k]});
    return t;
}

exact::SurvivorPmf to_survivor_pmf(const PmfTable& table) {
    require(table.n >= 2 && table.rows.size() == table.n - 1, "pmf table needs rows k = 0..n-2");
    exact::SurvivorPmf pmf;
    pmf.n = table.n;
    mpz_ui_pow_ui(pmf.denominator.get_mpz_t(), table.n - 1, table.n);
    mpz_class total = 0;
    for (unsigned k = 0; k < table.rows.size(); ++k) {
        const PmfRow& r = table.rows[k];
        require(r.k == k && r.exact.has_value(), "pmf table rows must be exact and ordered by k");
        const mpq_class w = *r.exact * pmf.denominator;
        require(w.get_den() == 1, "pmf entry is not a multiple of 1/(n-1)^n");
        pmf.weights.push_back(w.get_num());
        total += w.get_num();
    }
    require(total == pmf.denominator, "pmf entries do not sum to 1");
    return pmf;
}

std::string pmf_csv(const PmfTable& table) {
    std::string s = "# " + std::string(kPmfSchema) + '\n' + std::string(kRowColumns) + '\n';
    for (const PmfRow& r : table.rows)
        s += render_row({table.n, r.k, r.provenance, r.exact, r.value_decimal, r.err_radius, 0});
    return s;
}

PmfTable parse_pmf_csv(std::string_view text) {
    const Parsed p = parse_rows(text, kPmfSchema);
    require(!p.rows.empty(), "empty pmf CSV");
    PmfTable t{static_cast<unsigned>(p.rows.front().n), {}};
    for (const Row& r : p.rows) {
        require(r.n == t.n && r.k.has_value(), "pmf CSV rows need one n and a k on every row");
        t.rows.push_back({*r.k, r.provenance, r.exact, r.value_decimal, r.err_radius});
    }
    return t;
}

json pmf_json(const PmfTable& table) {
    json rows = json::array();
    for (const PmfRow& r : table.rows) {
        json row = exact_fields(r.exact);
        row["k"] = r.k;
        row["provenance"] = exact::provenance_name(r.provenance);
        row["value_decimal"] = r.value_decimal;
        row["err_radius"] = r.err_radius;
        rows.push_back(std::move(row));
    }
    return {{"schema", kPmfJsonSchema}, {"n", table.n}, {"rows", std::move(rows)}};
}

PmfTable pmf_from_json(const json& j) {
    require_schema(j, kPmfJsonSchema);
    PmfTable t{j.at("n").get<unsigned>(), {}};
    for (const json& row : j.at("rows")) {
        const auto prov = exact::parse_provenance(row.at("provenance").get<std::string>());
        t.rows.push_back({row.at("k").get<unsigned>(), prov, exact_from(row, prov),
                          row.at("value_decimal").get<std::string>(), row.at("err_radius").get<double>()});
    }
    return t;
}

std::string pseries_csv(const exact::PSeries& series) {
    std::string s = "# " + std::string(kSeriesSchema) + '\n';
    if (series.flagged) s += "# flagged\n";
    for (const auto& w : series.warnings) s += "# warning: " + w + '\n';
    s += std::string(kRowColumns) + '\n';
    for (const auto& e : series.entries) {
        const std::string dec = e.exact ? decimal17(*e.exact) : decimal17(e.value);
        s += render_row({e.n, std::nullopt, e.provenance, e.exact, dec, e.err_radius, e.reps});
    }
    return s;
}

exact::PSeries parse_pseries_csv(std::string_view text) {
    Parsed p = parse_rows(text, kSeriesSchema);
    exact::PSeries series;
    series.flagged = p.flagged;
    series.warnings = std::move(p.warnings);
    for (Row& r : p.rows) {
        require(!r.k.has_value(), "series CSV rows leave k blank");
        exact::PEntry e;
        e.n = r.n;
        e.provenance = r.provenance;
        e.value = r.exact ? nearest_double(*r.exact) : parse_double(r.value_decimal, "value_decimal");
        e.exact = std::move(r.exact);
        e.err_radius = r.err_radius;
        e.reps = r.reps;
        series.entries.push_back(std::move(e));
    }
    return series;
}

json pseries_json(const exact::PSeries& series) {
    json entries = json::array();
    for (const auto& e : series.entries) {
        json row = exact_fields(e.exact);
        row["n"] = e.n;
        row["provenance"] = exact::provenance_name(e.provenance);
        row["value"] = e.value;
        row["value_decimal"] = e.exact ? decimal17(*e.exact) : decimal17(e.value);
        row["err_radius"] = e.err_radius;
        row["reps"] = e.reps;
        entries.push_back(std::move(row));
    }
    return {{"schema", kSeriesJsonSchema},
            {"flagged", series.flagged},
            {"warnings", series.warnings},
            {"entries", std::move(entries)}};
}

exact::PSeries pseries_from_json(const json& j) {
    require_schema(j, kSeriesJsonSchema);
    exact::PSeries series;
    series.flagged = j.at("flagged").get<bool>();
    series.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const json& row : j.at("entries")) {
        exact::PEntry e;
        e.n = row.at("n").get<std::uint64_t>();
        e.provenance = exact::parse_provenance(row.at("provenance").get<std::string>());
        e.exact = exact_from(row, e.provenance);
        e.value = row.at("value").get<double>();
        if (e.exact) require(e.value == nearest_double(*e.exact), "exact entry value is not its nearest double");
        e.err_radius = row.at("err_radius").get<double>();
        e.reps = row.at("reps").get<std::uint64_t>();
        series.entries.push_back(std::move(e));
    }
    return series;
}

exact::PSeries parse_pseries(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    require(first != std::string_view::npos, "empty series input");
    if (text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ValidationError(std::string("malformed series JSON: ") + e.what());
        }
        return pseries_from_json(j);
    }
    return parse_pseries_csv(text);
}

std::string mc_csv(const std::vector<std::pair<std::uint64_t, sim::McEstimate>>& rows) {
    std::string s = "# " + std::string(kMcSchema) + "\nn,reps,seed,point,stderr\n";
    for (const auto& [n, e] : rows)
        s += std::to_string(n) + ',' + std::to_string(e.reps) + ',' + std::to_string(e.seed) + ',' +
             decimal17(e.point) + ',' + decimal17(e.std_error) + '\n';
    return s;
}

}  // namespace roulette::io
