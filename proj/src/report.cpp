#include "wnl/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "wnl/experiments.hpp"

namespace wnl {

using nlohmann::json;

namespace {

std::string num(const json& v) {
    if (!v.is_number()) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
}

std::string flag(const json& v) {
    if (!v.is_boolean()) return "-";
    return v.get<bool>() ? "pass" : "FAIL";
}

bool is_experiment(const StoredRecord& r) { return r.payload.is_object() && r.payload.contains("per_delta"); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

ReportBundle build_report(const std::vector<StoredRecord>& records, const std::string& filter) {
    std::vector<const StoredRecord*> sel;
    for (const auto& r : records)
        if (filter.empty() || r.command == filter) sel.push_back(&r);
    ReportBundle b;
    b.records = sel.size();
    if (sel.empty()) return b;

    std::ostringstream md;
    md << "# Results" << (filter.empty() ? "" : " for " + filter) << "\n\n";
    md << sel.size() << " record(s).\n\n";

    std::ostringstream slopes_csv;
    slopes_csv << "experiment,params_hash,k,p,slope,predicted,residual_max,pass\r\n";
    std::ostringstream slopes_md;
    std::size_t n_exp = 0, index = 0;
    for (const auto* r : sel) {
        ++index;
        if (!is_experiment(*r)) continue;
        ++n_exp;
        const json& p = r->payload;
        const json& params = p.value("params", json::object());
        md << "## " << r->command << " (params " << r->hash << ", seed " << p.value("seed", 0) << ")\n\n";
        md << "| δ | [w] estimate | ratio | margin |\n|---|---|---|---|\n";
        for (const auto& d : p.at("per_delta"))
            md << "| " << num(d.at("delta")) << " | " << num(d.at("a2_estimate")) << " | " << num(d.at("norm_ratio"))
               << " | " << num(d.value("pointwise_min_margin", json())) << " |\n";
        md << "\nslope " << num(p.at("slope")) << " vs predicted " << num(p.at("predicted")) << " (residual "
           << num(p.value("residual_max", json())) << "): " << flag(p.at("pass")) << "\n\n";
        slopes_md << "| " << r->command << " | " << params.value("k", json()).dump() << " | "
                  << num(params.value("p", json())) << " | " << num(p.at("slope")) << " | " << num(p.at("predicted"))
                  << " | " << num(p.value("residual_max", json())) << " | " << flag(p.at("pass")) << " |\n";
        char res[32];
        std::snprintf(res, sizeof res, "%.17g", p.value("residual_max", 0.0));
        slopes_csv << csv_field(r->command) << ',' << r->hash << ',' << params.value("k", json()).dump() << ','
                   << params.value("p", 0.0) << ',' << p.at("slope").get<double>() << ','
                   << p.at("predicted").get<double>() << ',' << res << ','
                   << (p.at("pass").get<bool>() ? "true" : "false") << "\r\n";
        b.csv_files.emplace_back(r->command + "-" + r->hash + "-" + std::to_string(index) + ".csv",
                                 record_to_csv(record_from_json(p)));
    }
    if (n_exp > 0) {
        md << "## Slopes\n\n| experiment | k | p | slope | predicted | residual | result |\n|---|---|---|---|---|---|---|\n"
           << slopes_md.str() << "\n";
        b.csv_files.emplace_back("slopes.csv", slopes_csv.str());
    }

    std::ostringstream checks;
    std::size_t n_checks = 0;
    for (const auto* r : sel) {
        if (is_experiment(*r)) continue;
        ++n_checks;
        const json& p = r->payload;
        checks << "| " << r->command << " | " << r->hash << " | " << num(p.value("estimate", json())) << " | "
               << num(p.value("ceiling", json())) << " | " << flag(p.value("pass", json())) << " |\n";
    }
    if (n_checks > 0)
        md << "## Checks\n\n| command | params | estimate | ceiling | result |\n|---|---|---|---|---|\n" << checks.str()
           << "\n";

    std::map<std::pair<std::string, std::string>, std::vector<const StoredRecord*>> groups;
    for (const auto* r : sel) groups[{r->command, r->hash}].push_back(r);
    md << "## Determinism\n\n| command | params | runs | payloads |\n|---|---|---|---|\n";
    for (const auto& [key, rs] : groups) {
        bool same = true;
        for (const auto* r : rs) same = same && r->payload == rs.front()->payload;
        md << "| " << key.first << " | " << key.second << " | " << rs.size() << " | "
           << (rs.size() == 1 ? "single run" : same ? "identical" : "DIFFER") << " |\n";
    }
    b.markdown = md.str();
    return b;
}

}  // namespace wnl
