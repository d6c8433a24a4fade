#include "fl3/report.hpp"

#include <algorithm>
#include <iomanip>

#include "json.hpp"

namespace fl3 {

const char* provenance_str(Provenance p) {
    switch (p) {
        case Provenance::Paper: return "paper";
        case Provenance::Trivial: return "trivial";
        case Provenance::DerivedOracle: return "derived-oracle";
    }
    return "?";
}

void Report::add(std::string name, bool pass, std::string computed, std::string expected,
                 Provenance prov, double ms) {
    checks.push_back({std::move(name), pass, std::move(computed), std::move(expected), prov, ms});
}

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void Report::print(std::ostream& os) const {
    os << "# " << kReportSchema << " suite=" << suite << " version=" << kVersion << "\n";
    for (const auto& [k, v] : scenario) os << "# " << k << "=" << v << "\n";
    auto sorted = checks;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    for (const auto& c : sorted) {
        os << (c.pass ? "PASS" : "FAIL") << " " << c.name << " computed=" << c.computed
           << " expected=" << c.expected << " provenance=" << provenance_str(c.provenance);
        if (show_timings) os << " ms=" << std::fixed << std::setprecision(1) << c.ms;
        os << "\n";
    }
    size_t npass = 0;
    for (const auto& c : checks) npass += c.pass ? 1 : 0;
    os << (all_pass() ? "OK" : "FAILED") << " " << npass << "/" << checks.size() << " checks\n";
}

void Report::print_json(std::ostream& os) const {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["version"] = kVersion;
    j["suite"] = suite;
    nlohmann::json sc = nlohmann::json::object();
    for (const auto& [k, v] : scenario) sc[k] = v;
    j["scenario"] = sc;
    auto sorted = checks;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    j["checks"] = nlohmann::json::array();
    for (const auto& c : sorted) {
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["computed"] = c.computed;
        cj["expected"] = c.expected;
        cj["provenance"] = provenance_str(c.provenance);
        if (show_timings) cj["ms"] = c.ms;
        j["checks"].push_back(cj);
    }
    j["pass"] = all_pass();
    os << j.dump(2) << "\n";
}

}  // namespace fl3
