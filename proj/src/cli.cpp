#include "wellform/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wellform/grading.hpp"
#include "wellform/json_out.hpp"
#include "wellform/linter.hpp"
#include "wellform/parser.hpp"
#include "wellform/seqcheck.hpp"
#include "wellform/simulator.hpp"
#include "wellform/structuring.hpp"

namespace wellform {

namespace {

// Thrown by helpers for input-level failures; carries the final exit code
// (2 = unreadable/unparsable input, 3 = bad usage).
struct CliError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{2, "cannot read '" + path + "'"};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string format_parse_error(const std::string& path, const ParseError& e) {
    std::string text = path + ":" + std::to_string(e.line) + ":" +
                       std::to_string(e.column) + ": " + e.message;
    if (!e.snippet.empty()) text += "\n  " + e.snippet;
    return text;
}

template <typename T>
T unwrap(Parsed<T> parsed, const std::string& path) {
    if (!parse_ok(parsed)) throw CliError{2, format_parse_error(path, parse_error(parsed))};
    return std::get<T>(std::move(parsed));
}

ActivityGraph load_activity(const std::string& path) {
    return unwrap(parse_activity(read_file(path)), path);
}

SequenceModel load_sequence(const std::string& path) {
    return unwrap(parse_sequence(read_file(path)), path);
}

Rubric load_rubric(const std::string& path) {
    return unwrap(parse_rubric(read_file(path)), path);
}

ordered_json envelope(const std::string& command) {
    ordered_json doc;
    doc["tool"] = "wellform";
    doc["version"] = kToolVersion;
    doc["command"] = command;
    return doc;
}

void emit(std::ostream& out, const ordered_json& doc) { out << doc.dump(2) << "\n"; }

void print_diagnostics(std::ostream& out, const std::vector<Diagnostic>& diagnostics) {
    for (const Diagnostic& d : diagnostics) {
        out << d.rule << " " << (d.severity == Severity::Error ? "error" : "warning");
        if (!d.locus.empty()) out << " at " << d.locus;
        out << ": " << d.message << "\n";
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t");
        lines.push_back(line.substr(b, e - b + 1));
    }
    return lines;
}

long resolve_budget(long flag_value, bool flag_given) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("WELLFORM_BUDGET")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return kDefaultBudget;
}

Env parse_env_bindings(const std::vector<std::string>& sets) {
    Env env;
    for (const std::string& binding : sets) {
        std::size_t eq = binding.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw CliError{3, "--set expects <name>=<value>, got '" + binding + "'"};
        }
        std::string name = binding.substr(0, eq);
        std::string value = binding.substr(eq + 1);
        if (value == "true") {
            env.bindings[name] = true;
        } else if (value == "false") {
            env.bindings[name] = false;
        } else {
            try {
                std::size_t used = 0;
                std::int64_t v = std::stoll(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                env.bindings[name] = v;
            } catch (const std::exception&) {
                throw CliError{3, "--set value '" + value +
                                      "' is neither an integer nor true/false"};
            }
        }
    }
    return env;
}

int cmd_lint(const std::vector<std::string>& files, bool json, std::ostream& out,
             std::ostream& err) {
    int worst = 0;
    for (const std::string& path : files) {
        try {
            ActivityGraph graph = load_activity(path);
            LintReport report = lint(graph);
            if (json) {
                ordered_json doc = envelope("lint");
                doc["file"] = path;
                doc["wellFormed"] = report.well_formed;
                doc["diagnostics"] = diagnostics_to_json(report.diagnostics);
                emit(out, doc);
            } else {
                if (files.size() > 1) out << "== " << path << " ==\n";
                print_diagnostics(out, report.diagnostics);
                out << "well-formed: " << (report.well_formed ? "true" : "false") << "\n";
            }
            if (!report.diagnostics.empty()) worst = std::max(worst, 1);
        } catch (const CliError& e) {
            err << e.message << "\n";
            worst = std::max(worst, e.code);
        }
    }
    return worst;
}

int cmd_codegen(const std::string& file, const std::string& output, bool json,
                std::ostream& out, std::ostream& err) {
    ActivityGraph graph = load_activity(file);
    ReduceResult result = reduce(graph);
    if (const Residue* residue = std::get_if<Residue>(&result)) {
        if (json) {
            ordered_json doc = envelope("codegen");
            doc["file"] = file;
            doc["residue"] = residue_to_json(*residue);
            emit(out, doc);
        }
        err << file << ": not reducible: " << residue->stuck_reason << "\n";
        return 1;
    }
    std::string code = emit_pseudocode(std::get<ReductionTree>(result));
    if (!output.empty()) {
        std::ofstream sink(output, std::ios::binary);
        if (!sink) throw CliError{2, "cannot write '" + output + "'"};
        sink << code;
    }
    if (json) {
        ordered_json doc = envelope("codegen");
        doc["file"] = file;
        doc["pseudocode"] = code;
        emit(out, doc);
    } else if (output.empty()) {
        out << code;
    }
    return 0;
}

int cmd_simulate(const std::string& file, const Env& env, long budget, bool json,
                 std::ostream& out) {
    ActivityGraph graph = load_activity(file);
    Trace trace = run(graph, env, budget);
    if (json) {
        ordered_json doc = envelope("simulate");
        doc["file"] = file;
        doc["trace"] = trace_to_json(trace);
        emit(out, doc);
    } else {
        for (const std::string& step : trace.steps) out << step << "\n";
        out << "terminated: " << to_keyword(trace.terminated) << "\n";
        if (!trace.message.empty()) out << "message: " << trace.message << "\n";
        for (const auto& [name, value] : trace.final_env.bindings) {
            out << "env: " << name << " = " << to_string(value) << "\n";
        }
    }
    return trace.terminated == Termination::Completed ? 0 : 1;
}

int cmd_check_seq(const std::vector<std::string>& files, bool json, std::ostream& out,
                  std::ostream& err) {
    int worst = 0;
    for (const std::string& path : files) {
        try {
            SequenceModel model = load_sequence(path);
            std::vector<Diagnostic> diagnostics = check_nesting(model);
            if (json) {
                ordered_json doc = envelope("check-seq");
                doc["file"] = path;
                doc["diagnostics"] = diagnostics_to_json(diagnostics);
                emit(out, doc);
            } else {
                if (files.size() > 1) out << "== " << path << " ==\n";
                print_diagnostics(out, diagnostics);
                out << "nesting: " << (diagnostics.empty() ? "ok" : "broken") << "\n";
            }
            if (!diagnostics.empty()) worst = std::max(worst, 1);
        } catch (const CliError& e) {
            err << e.message << "\n";
            worst = std::max(worst, e.code);
        }
    }
    return worst;
}

int cmd_check_consistency(const std::string& act_path, const std::string& seq_path,
                          bool json, std::ostream& out, std::ostream& err) {
    ActivityGraph graph = load_activity(act_path);
    SequenceModel model = load_sequence(seq_path);

    std::vector<Diagnostic> pre;
    if (!is_well_formed(graph)) {
        for (const Diagnostic& d : lint(graph).diagnostics) {
            if (d.severity == Severity::Error) pre.push_back(d);
        }
        if (pre.empty()) {
            pre.push_back({"C0-PRECONDITION", Severity::Error, graph.name,
                           "activity diagram does not reduce to structured form"});
        }
    }
    for (Diagnostic& d : check_nesting(model)) pre.push_back(std::move(d));
    if (!pre.empty()) {
        if (json) {
            ordered_json doc = envelope("check-consistency");
            doc["activity"] = act_path;
            doc["sequence"] = seq_path;
            doc["consistent"] = false;
            doc["preconditionFailed"] = true;
            doc["diagnostics"] = diagnostics_to_json(pre);
            emit(out, doc);
        } else {
            print_diagnostics(out, pre);
        }
        err << "consistency requires a well-formed activity diagram and a cleanly "
               "nested sequence diagram\n";
        return 1;
    }

    ConsistencyReport report = check_consistency(graph, model);
    if (json) {
        ordered_json doc = envelope("check-consistency");
        doc["activity"] = act_path;
        doc["sequence"] = seq_path;
        doc["consistent"] = report.consistent;
        ordered_json pairs = ordered_json::array();
        for (const auto& [a, s] : report.matched_pairs) {
            pairs.push_back(ordered_json::array({a, s}));
        }
        doc["matchedPairs"] = std::move(pairs);
        doc["diagnostics"] = diagnostics_to_json(report.mismatches);
        emit(out, doc);
    } else {
        print_diagnostics(out, report.mismatches);
        out << "consistent: " << (report.consistent ? "true" : "false") << "\n";
    }
    return report.consistent ? 0 : 1;
}

int cmd_grade(const std::string& mode, const std::string& rubric_path,
              const std::string& submission, const std::string& reference,
              double penalty, bool json, std::ostream& out) {
    Rubric rubric = load_rubric(rubric_path);
    if (mode != to_keyword(rubric.mode)) {
        throw CliError{3, "--mode is '" + mode + "' but rubric '" + rubric.name +
                              "' declares mode '" + to_keyword(rubric.mode) + "'"};
    }

    GradeReport report;
    switch (rubric.mode) {
        case RubricMode::Annotation:
            report = grade_annotation(rubric, read_lines(submission));
            break;
        case RubricMode::Hotspot:
            report = grade_hotspot(rubric, read_lines(submission));
            break;
        case RubricMode::Placement: {
            std::vector<std::pair<std::string, std::string>> placements;
            for (const std::string& line : read_lines(submission)) {
                std::size_t sep = line.find(':');
                if (sep == std::string::npos) sep = line.find_first_of(" \t");
                if (sep == std::string::npos) {
                    throw CliError{2, submission + ": placement line '" + line +
                                          "' is not <spot>:<kind>"};
                }
                std::string spot = line.substr(0, sep);
                std::string kind = line.substr(sep + 1);
                std::size_t b = kind.find_first_not_of(" \t");
                if (b == std::string::npos) {
                    throw CliError{2, submission + ": placement line '" + line +
                                          "' is missing the element kind"};
                }
                placements.emplace_back(spot, kind.substr(b));
            }
            report = grade_placement(rubric, placements);
            break;
        }
        case RubricMode::ElementDiff: {
            if (reference.empty()) {
                throw CliError{3, "--mode element_diff requires --reference <file.act>"};
            }
            ActivityGraph ref = load_activity(reference);
            ActivityGraph student = load_activity(submission);
            report = grade_element_diff(ref, student, rubric, penalty);
            break;
        }
    }

    if (json) {
        ordered_json doc = envelope("grade");
        doc["rubric"] = rubric.name;
        doc["submission"] = submission;
        doc["grade"] = grade_to_json(report);
        emit(out, doc);
    } else {
        for (const GradeLine& line : report.items) {
            out << (line.matched ? "[x] " : "[ ] ") << line.key << " " << line.earned
                << "/" << line.expected << "\n";
        }
        out << "score: " << report.earned << "/" << report.max << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"activity/sequence diagram linter, structurer, simulator and grader"};
    app.name("wellform");
    app.set_version_flag("--version,-V", std::string(kToolVersion));
    app.require_subcommand(1);

    std::vector<std::string> lint_files;
    std::string lint_format = "text";
    CLI::App* lint_cmd =
        app.add_subcommand("lint", "Check activity diagrams against the rule catalog");
    lint_cmd->add_option("files", lint_files, "Activity diagram files (.act)")
        ->required()
        ->expected(-1);
    lint_cmd->add_option("--format", lint_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string codegen_file;
    std::string codegen_output;
    std::string codegen_format = "text";
    CLI::App* codegen_cmd =
        app.add_subcommand("codegen", "Reduce a diagram and print structured pseudocode");
    codegen_cmd->add_option("file", codegen_file, "Activity diagram file (.act)")
        ->required();
    codegen_cmd->add_option("-o,--output", codegen_output, "Write pseudocode to a file");
    codegen_cmd->add_option("--format", codegen_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string sim_file;
    std::vector<std::string> sim_sets;
    long sim_budget = kDefaultBudget;
    std::string sim_format = "text";
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Run the token simulation over a diagram");
    sim_cmd->add_option("file", sim_file, "Activity diagram file (.act)")->required();
    sim_cmd->add_option("--set", sim_sets, "Initial binding <name>=<value>");
    CLI::Option* budget_opt =
        sim_cmd->add_option("--budget", sim_budget, "Node-visit budget")
            ->check(CLI::PositiveNumber);
    sim_cmd->add_option("--format", sim_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::vector<std::string> seq_files;
    std::string seq_format = "text";
    CLI::App* seq_cmd =
        app.add_subcommand("check-seq", "Check combined-fragment nesting in sequence diagrams");
    seq_cmd->add_option("files", seq_files, "Sequence diagram files (.seq)")
        ->required()
        ->expected(-1);
    seq_cmd->add_option("--format", seq_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string cons_act;
    std::string cons_seq;
    std::string cons_format = "text";
    CLI::App* cons_cmd = app.add_subcommand(
        "check-consistency", "Compare an activity diagram against a sequence diagram");
    cons_cmd->add_option("activity", cons_act, "Activity diagram file (.act)")->required();
    cons_cmd->add_option("sequence", cons_seq, "Sequence diagram file (.seq)")->required();
    cons_cmd->add_option("--format", cons_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string grade_mode;
    std::string grade_rubric;
    std::string grade_submission;
    std::string grade_reference;
    double grade_penalty = 1.0;
    std::string grade_format = "text";
    CLI::App* grade_cmd = app.add_subcommand("grade", "Score a submission against a rubric");
    grade_cmd->add_option("--mode", grade_mode, "Grading mode")
        ->required()
        ->check(CLI::IsMember({"annotation", "hotspot", "placement", "element_diff"}));
    grade_cmd->add_option("--rubric", grade_rubric, "Rubric file (.rub)")->required();
    grade_cmd->add_option("--submission", grade_submission, "Submission file")->required();
    grade_cmd->add_option("--reference", grade_reference,
                          "Reference diagram (element_diff mode)");
    grade_cmd->add_option("--penalty", grade_penalty, "Points deducted per lint error")
        ->check(CLI::NonNegativeNumber);
    grade_cmd->add_option("--format", grade_format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (*lint_cmd) return cmd_lint(lint_files, lint_format == "json", out, err);
        if (*codegen_cmd) {
            return cmd_codegen(codegen_file, codegen_output, codegen_format == "json",
                               out, err);
        }
        if (*sim_cmd) {
            Env env = parse_env_bindings(sim_sets);
            long budget = resolve_budget(sim_budget, budget_opt->count() > 0);
            return cmd_simulate(sim_file, env, budget, sim_format == "json", out);
        }
        if (*seq_cmd) return cmd_check_seq(seq_files, seq_format == "json", out, err);
        if (*cons_cmd) {
            return cmd_check_consistency(cons_act, cons_seq, cons_format == "json", out,
                                         err);
        }
        if (*grade_cmd) {
            return cmd_grade(grade_mode, grade_rubric, grade_submission, grade_reference,
                             grade_penalty, grade_format == "json", out);
        }
    } catch (const CliError& e) {
        err << e.message << "\n";
        return e.code;
    }
    return 3;
}

}  // namespace wellform
