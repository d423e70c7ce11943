#include "roulette/io/report_io.hpp"

#include <cstdlib>

#include "roulette/common.hpp"
#include "roulette/io/series_io.hpp"

namespace roulette::io {

std::string wave_plot_csv(const waves::WaveModel& model) {
    std::string s = "# " + std::string(kWavePlotSchema) + "\nlog_n,p,err,smoothed,c\n";
    const std::string c = decimal17(model.c);
    for (const auto& pt : model.points)
        s += decimal17(pt.log_n) + ',' + decimal17(pt.p) + ',' + decimal17(pt.err) + ',' + decimal17(pt.smoothed) +
             ',' + c + '\n';
    return s;
}

std::string grid_function_csv(const analytic::GridFunction& g) {
    std::string s = "# " + std::string(kGridSchema) + '\n';
    s += "# truncation_bound " + decimal17(g.truncation_bound) + '\n';
    s += "# discretization_bound " + decimal17(g.discretization_bound) + '\n';
    s += "# rounding_bound " + decimal17(g.rounding_bound) + '\n';
    s += "x,re,im\n";
    for (std::size_t i = 0; i < g.grid.size(); ++i)
        s += decimal17(g.grid[i]) + ',' + decimal17(g.re[i]) + ',' + decimal17(g.im[i]) + '\n';
    return s;
}

std::string paired_csv(const energy::PairedSample& s) {
    std::string out = "# " + std::string(kPairedSchema) + "\nx,y\n";
    for (std::size_t i = 0; i < s.size(); ++i) out += decimal17(s.xs[i]) + ',' + decimal17(s.ys[i]) + '\n';
    return out;
}

energy::PairedSample parse_paired_csv(std::string_view text) {
    energy::PairedSample s;
    bool header = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string line(text.substr(0, nl));
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            require(line == "x,y", "paired CSV needs the column line 'x,y'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        require(comma != std::string::npos && line.find(',', comma + 1) == std::string::npos,
                "paired CSV line " + std::to_string(line_no) + " needs two fields");
        const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        char* ea = nullptr;
        char* eb = nullptr;
        const double x = std::strtod(a.c_str(), &ea), y = std::strtod(b.c_str(), &eb);
        require(!a.empty() && !b.empty() && *ea == '\0' && *eb == '\0',
                "paired CSV line " + std::to_string(line_no) + " is not numeric");
        s.xs.push_back(x);
        s.ys.push_back(y);
    }
    require(header, "paired CSV needs the column line 'x,y'");
    return s;
}

nlohmann::json parse_json(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace roulette::io
