// Command-line front end for the workbench.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eqdiff/workbench.hpp"

namespace wb = eqdiff::workbench;
using json = nlohmann::json;

namespace {

// Inline JSON when the text starts like a JSON value, otherwise a file path
// ("-" reads standard input).
json load_json(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return json::parse(arg);
    if (arg == "-") return json::parse(std::cin);
    std::ifstream in(arg);
    if (!in) throw eqdiff::SchemaError("cannot open input file '" + arg + "'");
    return json::parse(in);
}

struct Common {
    std::string group;
    std::string space;
    std::string action_file;
    std::string degrees;
    std::string coeff;
    std::size_t truncation = 0;
    std::string format = "text";

    void add_action(CLI::App* app) {
        app->add_option("--group", group, "group name (cyclic:3, symmetric:3, ...) or a JSON table");
        app->add_option("--space", space,
                        "point, points:N, two-points, regular, coset:a,b, free-circle, trivial-circle, lens-s3:Q");
        app->add_option("--action", action_file, "action JSON (inline or file)");
    }
    void add_degrees(CLI::App* app) {
        app->add_option("--degrees,--degree", degrees, "a single degree n or a range a..b");
    }
    void add_format(CLI::App* app) { app->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"})); }

    bool has_action() const { return !action_file.empty() || !group.empty() || !space.empty(); }

    json action() const {
        if (!action_file.empty()) {
            if (!group.empty() || !space.empty()) throw eqdiff::SchemaError("give --action or --group/--space, not both");
            return load_json(action_file);
        }
        if (group.empty() || space.empty()) throw eqdiff::SchemaError("an action needs --group and --space");
        json g = group.front() == '{' ? json::parse(group) : json(group);
        return {{"group", g}, {"space", space}};
    }

    json options() const {
        json o = json::object();
        if (!degrees.empty()) o["degrees"] = degrees;
        if (!coeff.empty()) o["coeff"] = coeff;
        if (truncation) o["truncation"] = truncation;
        o["format"] = format;
        return o;
    }
};

int emit(const wb::Report& r, const std::string& format) {
    std::cout << wb::render(r, wb::format_from_string(format));
    return r.passed ? 0 : 1;
}

int run_job(const json& job_json, const std::string& format_override) {
    wb::JobSpec job = wb::parse_job(job_json);
    std::string format = format_override.empty() ? (job.options.format == wb::Format::Json ? "json" : "text")
                                                 : format_override;
    return emit(wb::run(job), format);
}

int report_error(const std::exception& e) {
    std::cerr << wb::error_json(e).dump(2) << "\n";
    return wb::exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivariant cohomology and differential cohomology workbench"};
    app.require_subcommand(1);
    int status = 0;

    Common cohom;
    auto* c = app.add_subcommand("cohomology", "equivariant cohomology of a finite group action or a double complex");
    cohom.add_action(c);
    std::string dc_file;
    c->add_option("--double-complex", dc_file, "double complex JSON (inline or file)");
    cohom.add_degrees(c);
    c->add_option("--coeff", cohom.coeff, "z, q or qz");
    c->add_option("--truncation", cohom.truncation, "bar levels P (default: top degree + 2)");
    cohom.add_format(c);
    c->callback([&] {
        json inputs = dc_file.empty() ? json{{"action", cohom.action()}} : json{{"double_complex", load_json(dc_file)}};
        if (!dc_file.empty() && cohom.has_action()) throw eqdiff::SchemaError("give an action or a double complex");
        status = run_job({{"command", "cohomology"}, {"inputs", inputs}, {"options", cohom.options()}}, cohom.format);
    });

    Common diff;
    std::vector<std::string> lens;
    auto* d = app.add_subcommand("diffcoh", "differential cohomology of a 0-dimensional action, or lens classes");
    diff.add_action(d);
    d->add_option("--lens", lens, "p,q pairs of the flat lens bundles");
    diff.add_degrees(d);
    diff.add_format(d);
    d->callback([&] {
        json inputs;
        if (!lens.empty()) {
            if (diff.has_action()) throw eqdiff::SchemaError("give an action or --lens, not both");
            json pairs = json::array();
            for (const auto& s : lens) {
                auto comma = s.find(',');
                if (comma == std::string::npos) throw eqdiff::SchemaError("--lens takes p,q");
                try {
                    pairs.push_back({{"p", std::stoi(s.substr(0, comma))}, {"q", std::stoi(s.substr(comma + 1))}});
                } catch (const std::logic_error&) {
                    throw eqdiff::SchemaError("--lens takes integers p,q");
                }
            }
            inputs = {{"lens", pairs}};
        } else {
            inputs = {{"action", diff.action()}};
        }
        status = run_job({{"command", "diffcoh"}, {"inputs", inputs}, {"options", diff.options()}}, diff.format);
    });

    Common hex;
    std::string hex_dc, hex_forms;
    int forms_degree = -1;
    auto* h = app.add_subcommand("hexagon", "assemble and check the differential cohomology hexagon");
    hex.add_action(h);
    h->add_option("--double-complex", hex_dc, "double complex JSON for supplied corners");
    h->add_option("--forms", hex_forms, "supplied forms JSON");
    h->add_option("--forms-degree", forms_degree, "degree the supplied forms belong to");
    hex.add_degrees(h);
    hex.add_format(h);
    h->callback([&] {
        json inputs;
        if (!hex_dc.empty()) {
            if (hex.has_action()) throw eqdiff::SchemaError("give an action or a double complex");
            inputs = {{"double_complex", load_json(hex_dc)}};
            if (!hex_forms.empty()) inputs["forms"] = load_json(hex_forms);
            if (forms_degree >= 0) inputs["forms_degree"] = forms_degree;
        } else {
            inputs = {{"action", hex.action()}};
        }
        status = run_job({{"command", "hexagon"}, {"inputs", inputs}, {"options", hex.options()}}, hex.format);
    });

    Common cart;
    std::string linear = "rotation";
    std::vector<std::string> forms;
    unsigned bound = 6;
    auto* ca = app.add_subcommand("cartan", "Cartan differential or truncated Cartan cohomology of a linear action");
    ca->add_option("--action", linear, "rotation, su2, trivial:k,m or linear action JSON");
    ca->add_option("--form", forms, "equivariant form, e.g. \"x1*dx2 - x2*dx1\" (repeatable)");
    ca->add_option("--bound", bound, "weight bound D");
    cart.add_degrees(ca);
    cart.add_format(ca);
    ca->callback([&] {
        json act = linear.front() == '{' ? json::parse(linear) : json(linear);
        json inputs = {{"action", act}};
        if (!forms.empty()) inputs["forms"] = forms;
        json options = cart.options();
        options["bound"] = bound;
        status = run_job({{"command", "cartan"}, {"inputs", inputs}, {"options", options}}, cart.format);
    });

    Common chern;
    std::string ch_action = "rotation", bundle, connection, other;
    std::vector<std::string> polys;
    std::size_t rank = 0;
    auto* cw = app.add_subcommand("chern", "equivariant characteristic forms of a connection");
    cw->add_option("--action", ch_action, "rotation, su2, trivial:k,m or linear action JSON");
    cw->add_option("--bundle", bundle, "bundle action JSON {\"drho\": [...]}");
    cw->add_option("--connection", connection, "connection JSON, a square array of form strings (default: zero)");
    cw->add_option("--other-connection", other, "second connection for the transgression form");
    cw->add_option("--rank", rank, "fiber rank when neither bundle nor connection fixes it");
    cw->add_option("--polynomial", polys, "total_chern, chern:k, trace_power:k, pontryagin:k (repeatable)")
        ->required();
    chern.add_format(cw);
    cw->callback([&] {
        json inputs = {{"action", ch_action.front() == '{' ? json::parse(ch_action) : json(ch_action)},
                       {"polynomial", polys}};
        if (!bundle.empty()) inputs["bundle"] = load_json(bundle);
        if (!connection.empty()) inputs["connection"] = load_json(connection);
        if (!other.empty()) inputs["other_connection"] = load_json(other);
        if (rank) inputs["rank"] = rank;
        status = run_job({{"command", "chern"}, {"inputs", inputs}, {"options", chern.options()}}, chern.format);
    });

    Common ver;
    std::string suite;
    std::uint64_t seed = 1;
    std::size_t max_points = 0;
    auto* v = app.add_subcommand("verify", "run a verification suite");
    v->add_option("--suite", suite, "hexagon, sweep, bockstein, contraction, getzler, counterexample, lens")->required();
    ver.add_action(v);
    ver.add_degrees(v);
    v->add_option("--truncation", ver.truncation, "bar levels where the suite uses them");
    v->add_option("--seed", seed, "random seed");
    v->add_option("--max-points", max_points, "largest point count in the sweep");
    ver.add_format(v);
    v->callback([&] {
        json inputs = {{"suite", suite}};
        if (ver.has_action()) inputs["action"] = ver.action();
        if (max_points) inputs["max_points"] = max_points;
        json options = ver.options();
        options["seed"] = seed;
        status = run_job({{"command", "verify"}, {"inputs", inputs}, {"options", options}}, ver.format);
    });

    std::string job_file, run_format;
    auto* r = app.add_subcommand("run", "run a job file {\"command\", \"inputs\", \"options\"}");
    r->add_option("job", job_file, "job JSON file, or - for standard input")->required();
    r->add_option("--format", run_format, "text or json (overrides the job)")->check(CLI::IsMember({"text", "json"}));
    r->callback([&] { status = run_job(load_json(job_file), run_format); });

    auto* ex = app.add_subcommand("examples", "bundled example corpus");
    ex->require_subcommand(1);
    auto* ex_list = ex->add_subcommand("list", "list the bundled examples");
    ex_list->callback([&] {
        for (const auto& e : wb::bundled_examples()) std::cout << e.name << "  " << e.description << "\n";
    });
    std::string ex_name, ex_format = "text";
    auto* ex_run = ex->add_subcommand("run", "rerun examples and compare with the recorded summaries");
    ex_run->add_option("name", ex_name, "example name (default: all)");
    ex_run->add_option("--format", ex_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    ex_run->callback([&] {
        bool found = false, all_ok = true;
        for (const auto& e : wb::bundled_examples()) {
            if (!ex_name.empty() && e.name != ex_name) continue;
            found = true;
            wb::Report rep = wb::run(e.job);
            bool ok = rep.passed && rep.summary == e.expected_summary;
            all_ok = all_ok && ok;
            if (ex_format == "json") {
                std::cout << json{{"example", e.name}, {"matches", ok}, {"expected", e.expected_summary},
                                  {"report", wb::to_json(rep)}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << (ok ? "OK   " : "DIFF ") << e.name << ": " << rep.summary;
                if (!ok) std::cout << "   (expected " << e.expected_summary << ")";
                std::cout << "\n";
            }
        }
        if (!found) throw eqdiff::SchemaError("no example named '" + ex_name + "'");
        status = all_ok ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << wb::error_json(eqdiff::SchemaError(e.what())).dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        return report_error(e);
    }
    return status;
}
