#pragma once

// Batch front end: a validated job description is dispatched to the owning
// module and comes back as a report with a one-line summary, a labeled text
// rendering and a JSON result.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eqdiff/complexes.hpp"

namespace eqdiff::workbench {

using json = nlohmann::json;

enum class Command { Cohomology, Diffcoh, Hexagon, Cartan, Chern, Verify };
enum class Format { Text, Json };

std::string to_string(Command c);
Command command_from_string(const std::string& s);  // throws SchemaError
Format format_from_string(const std::string& s);

struct Options {
    std::optional<std::pair<int, int>> degrees;  // inclusive; the command picks a default
    complexes::Coefficients coeff = complexes::Coefficients::Z;
    std::size_t truncation = 0;  // bar levels; 0 lets the module choose
    unsigned bound = 6;          // Cartan weight bound
    Format format = Format::Text;
    std::uint64_t seed = 1;
    friend bool operator==(const Options&, const Options&) = default;
};

// "3" or "0..5"
std::pair<int, int> parse_degrees(const std::string& s);

struct JobSpec {
    Command command = Command::Cohomology;
    json inputs = json::object();
    Options options;
    friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

// {"command", "inputs", "options"}; unknown fields raise SchemaError.
JobSpec parse_job(const json& j);
json to_json(const JobSpec& job);

struct Report {
    std::string command;
    std::string summary;  // e.g. "ℤ, 0, ℤ/3, 0, ℤ/3, 0"
    std::string text;     // labeled, one line per degree or check
    json result;
    // Verification suites set this when a check failed.
    bool passed = true;
    friend bool operator==(const Report&, const Report&) = default;
};

json to_json(const Report& r);
Report report_from_json(const json& j);
std::string render(const Report& r, Format f);

// Schema problems in the inputs surface as SchemaError; malformed JSON
// accessors from the parser are converted as well.
Report run(const JobSpec& job);

struct Example {
    std::string name;
    std::string description;
    JobSpec job;
    std::string expected_summary;
};

// Directory of the example corpus: EQDIFF_EXAMPLES_DIR from the environment,
// else the source tree location fixed at build time.
std::string examples_dir();
// Every *.json file of the corpus, sorted by name.
std::vector<Example> bundled_examples();
Example example_from_json(const json& j);

// 0 ok, 1 a verification found a failure, 2 schema, 3 math precondition, 4 internal.
int exit_code_for(const std::exception& e);
json error_json(const std::exception& e);

}  // namespace eqdiff::workbench
