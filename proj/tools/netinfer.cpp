// netinfer: evaluate Datalog programs, infer integration networks from
// discovered facts, generate synthetic landscapes and print the fact catalog.
//
// Exit codes: 0 ok, 1 I/O, 2 language error, 3 schema violation, 4 bad configuration.

#include <CLI11.hpp>

#include <iostream>

#include "netinfer/datalog/engine.hpp"
#include "netinfer/datalog/parser.hpp"
#include "netinfer/inference/pipeline.hpp"
#include "netinfer/io/io.hpp"
#include "netinfer/nim/schema.hpp"
#include "netinfer/sim/landscape.hpp"

namespace {

using namespace netinfer;

enum Exit { kOk = 0, kIo = 1, kLanguage = 2, kSchema = 3, kConfig = 4 };

/// "-" writes to stdout.
void emit(const std::string& path, const std::string& content) {
    if (path == "-") std::cout << content;
    else io::write_file(path, content);
}

struct EvalArgs {
    std::vector<std::string> files;
    bool naive = false;
    unsigned threads = 1;
};

int cmd_eval(const EvalArgs& a) {
    dl::Program program;
    for (const auto& f : a.files) {
        std::string text = io::read_file(f);
        try {
            program.merge(dl::parse_program(text));
        } catch (const dl::ParseError& e) {
            throw dl::ParseError(e.line(), e.column(), f + ": " + e.detail());
        }
    }
    auto sp = dl::stratify(program);
    dl::FactStore store;
    for (const auto& fact : program.facts) store.insert(fact, dl::Origin::Discovered);
    dl::FactStore result = a.naive ? dl::evaluate_naive(sp, store) : dl::evaluate_seminaive(sp, store, {a.threads});
    std::cout << io::format_facts(result.derived_facts());
    return kOk;
}

struct InferArgs {
    std::vector<std::string> files;
    std::string rules;
    std::string json, dot, report, truth;
    bool lenient = false;
};

int cmd_infer(const InferArgs& a) {
    std::vector<std::filesystem::path> paths(a.files.begin(), a.files.end());
    auto facts = io::read_fact_files(paths);
    const auto& catalog = nim::Catalog::standard();
    auto validation = nim::validate_facts(catalog, facts);
    if (!validation.ok()) {
        for (const auto& v : validation.violations) {
            std::cerr << "fact " << v.fact_index + 1 << ": " << nim::to_string(v.kind) << ": " << v.message << "\n";
        }
        if (!a.lenient) return kSchema;
        std::cerr << "ignoring " << validation.violations.size() << " invalid facts\n";
        facts = validation.valid;
    }
    infer::RuleSet rules = a.rules.empty() ? infer::RuleSet::bundled() : infer::RuleSet::load(a.rules);
    auto store = infer::make_store(facts, catalog);
    auto graph = infer::run_pipeline(store, rules, catalog);

    std::optional<sim::ScoreReport> score;
    if (!a.truth.empty()) score = sim::score(graph, io::import_truth(io::read_file(a.truth)));

    if (!a.json.empty()) emit(a.json, io::export_network(graph));
    if (!a.dot.empty()) emit(a.dot, io::to_dot(graph));
    std::string report = io::format_report(graph, score ? &*score : nullptr);
    if (!a.report.empty()) emit(a.report, report);
    if (a.json.empty() && a.dot.empty() && a.report.empty()) std::cout << report;
    return kOk;
}

struct SimulateArgs {
    sim::ScenarioConfig config;
    std::string out_facts, out_truth;
};

int cmd_simulate(const SimulateArgs& a) {
    auto scenario = sim::generate(a.config);
    if (!a.out_facts.empty()) emit(a.out_facts, io::format_facts(scenario.facts));
    if (!a.out_truth.empty()) emit(a.out_truth, io::export_truth(scenario.truth));
    std::ostream& log = (a.out_facts == "-" || a.out_truth == "-") ? std::cerr : std::cout;
    log << "facts: " << scenario.facts.size() << "\n"
        << "systems: " << scenario.truth.systems.size() << "\n"
        << "hosts: " << scenario.truth.hosts.size() << "\n"
        << "flows: " << scenario.truth.flows.size() << "\n"
        << "groups: " << scenario.truth.groups().size() << "\n"
        << "attributes: " << scenario.truth.attribute_count() << "\n";
    return kOk;
}

int cmd_fixtures(const std::string& dir) {
    std::filesystem::path out(dir);
    std::filesystem::create_directories(out);
    auto fx = sim::build_fixtures();
    for (const auto& [name, s] : {std::pair{"hxp", &fx.hxp}, std::pair{"h73", &fx.h73}}) {
        io::write_file(out / (std::string(name) + ".facts"), io::format_facts(s->facts));
        io::write_file(out / (std::string(name) + ".truth.json"), io::export_truth(s->truth));
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Infer integration networks from discovered facts"};
    app.require_subcommand(1);

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate Datalog files and print the derived facts");
    eval->add_option("files", eval_args.files, ".dl and .facts files")->required();
    eval->add_flag("--naive", eval_args.naive, "Use the naive reference evaluator");
    eval->add_option("--threads", eval_args.threads, "Worker threads")->check(CLI::Range(1u, 256u));

    InferArgs infer_args;
    auto* infer = app.add_subcommand("infer", "Run the inference pipeline over fact files");
    infer->add_option("files", infer_args.files, "Fact files")->required();
    infer->add_option("--rules", infer_args.rules, "Directory overriding the bundled rule files");
    infer->add_option("--json", infer_args.json, "Write the network as JSON ('-' for stdout)");
    infer->add_option("--dot", infer_args.dot, "Write the network as DOT ('-' for stdout)");
    infer->add_option("--report", infer_args.report, "Write a text report ('-' for stdout)");
    infer->add_option("--truth", infer_args.truth, "Truth file; adds score rows to the report");
    infer->add_flag("--lenient", infer_args.lenient, "Drop facts that violate the catalog instead of failing");

    SimulateArgs sim_args;
    auto& c = sim_args.config;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic landscape and its truth");
    simulate->add_option("--systems", c.n_systems, "Application systems");
    simulate->add_option("--hosts", c.n_hosts, "Hosts");
    simulate->add_option("--middlewares", c.n_middlewares, "Middleware systems");
    simulate->add_option("--flows", c.n_flows, "Message flows");
    simulate->add_option("--duplication", c.duplication_rate, "Probability an entity has several ids");
    simulate->add_option("--attr-loss", c.attr_loss_rate, "Probability an attribute is dropped");
    simulate->add_option("--seed", c.rng_seed, "Random seed");
    simulate->add_option("--out-facts", sim_args.out_facts, "Fact file to write ('-' for stdout)");
    simulate->add_option("--out-truth", sim_args.out_truth, "Truth file to write ('-' for stdout)");

    bool markdown = false;
    auto* schema = app.add_subcommand("schema", "Print the predicate catalog");
    schema->add_flag("--markdown", markdown, "Markdown table");

    std::string fixtures_dir;
    auto* fixtures = app.add_subcommand("fixtures", "Write the bundled middleware fixtures");
    fixtures->add_option("--out", fixtures_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*eval) return cmd_eval(eval_args);
        if (*infer) return cmd_infer(infer_args);
        if (*simulate) return cmd_simulate(sim_args);
        if (*schema) {
            std::cout << nim::catalog_as_declarations(nim::Catalog::standard(), markdown);
            return kOk;
        }
        if (*fixtures) return cmd_fixtures(fixtures_dir);
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const io::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const dl::UnstratifiableError& e) {
        std::cerr << "error: " << e.what() << "\ncycle:";
        for (const auto& p : e.cycle()) std::cerr << " " << p;
        std::cerr << "\n";
        return kLanguage;
    } catch (const dl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kLanguage;
    } catch (const dl::UnsafeRuleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kLanguage;
    } catch (const dl::ArityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kLanguage;
    } catch (const nim::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSchema;
    } catch (const sim::InfeasibleConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kOk;
}
