#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fl3 {

inline constexpr const char* kReportSchema = "fl3-report/1";
inline constexpr const char* kVersion = "0.1.0";

// provenance of an expected value, mirrored into every record
enum class Provenance { Paper, Trivial, DerivedOracle };
const char* provenance_str(Provenance p);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string computed;
    std::string expected;
    Provenance provenance = Provenance::Trivial;
    double ms = 0.0;
};

struct Report {
    std::string suite;
    std::vector<std::pair<std::string, std::string>> scenario;  // echo of the inputs
    std::vector<CheckResult> checks;
    bool show_timings = false;

    void add(std::string name, bool pass, std::string computed, std::string expected, Provenance prov,
             double ms = 0.0);
    bool all_pass() const;
    // line-delimited records plus a summary line; checks ordered by name
    void print(std::ostream& os) const;
    void print_json(std::ostream& os) const;
};

}  // namespace fl3
