#include "flow/cli.hpp"

#include "flow/extension.hpp"
#include "flow/harris.hpp"
#include "flow/json_io.hpp"
#include "flow/oracle.hpp"
#include "flow/pip.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace flow {

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

/// Reports are JSON objects with a "status" key; the JSON rendering is
/// byte-identical across runs, so timing goes to the text rendering only.
void emit(std::ostream& out, const std::string& format, const Json& rep, double ms) {
    if (format == "json") {
        out << dump_json(rep);
        return;
    }
    out << "status: " << rep.value("status", "?") << "\n";
    for (const auto& [key, val] : rep.items()) {
        if (key == "status") continue;
        if (key == "trace") {
            out << "trace: " << val.size() << " entries\n";
            continue;
        }
        out << key << ": " << val.dump() << "\n";
    }
    out << "timing_ms: " << ms << "\n";
}

/// Load a graph file and reconstruct its unique inflow from the flow values.
/// The declared inflow is ignored here; it feeds `solve` only.
FlowGraph load_flow_graph(const std::string& path, const std::string& role) {
    GraphFile gf = graph_file_from_json(load_json_file(path));
    if (!gf.flow)
        throw InputError(role + ": " + path + " has no \"flow\" entry");
    ValidateResult v = validate_flow_graph(gf.graph, *gf.flow);
    if (const auto* bad = std::get_if<NoInflow>(&v))
        throw InputError(role + ": " + path + " is not a flow graph (negative inflow at " +
                         bad->node + ")");
    return std::get<FlowGraph>(std::move(v));
}

Json law_report_json(const LawReport& r) {
    Json j;
    j["ok"] = r.ok;
    j["cases"] = r.cases;
    j["failures"] = Json::array();
    for (const auto& f : r.failures)
        j["failures"].push_back({{"law", f.law}, {"witness", f.witness}});
    return j;
}

Json algebra_report_json(const AlgebraLawReport& r) {
    Json j;
    j["ok"] = r.ok;
    j["cases"] = r.cases;
    j["failures"] = r.failures;
    return j;
}

Domain domain_by_name(const std::string& name, int arity) {
    if (name == "path_count") return Domain::path_count();
    if (name == "pip") return Domain::pip();
    if (name == "shortest_path") return Domain::shortest_path();
    if (name == "inverse_reach") return Domain::inverse_reach();
    if (name == "product") {
        if (arity < 2) throw InputError("product arity must be at least 2");
        Domain d = make_product_domain(Domain::path_count(), Domain::path_count());
        for (int i = 2; i < arity; ++i) d = make_product_domain(d, Domain::path_count());
        return d;
    }
    throw InputError("unknown domain: " + name);
}

struct Opts {
    std::string format = "json";
    std::string file;
    std::string file2;
    std::string strategy = "auto";
    int max_iters = -1;
    std::string base;
    std::string extra;
    std::string mode;
    int brute_max_len = 0;
    std::string domain = "path_count";
    int arity = 2;
    std::uint64_t seed = 1;
    int cases = 200;
    std::string state;
    std::string scenario;
    int procs = 4;
    int res = 3;
    int steps = 200;
    int threads = 3;
    int ops = 200;
    std::int64_t keys = 32;
    std::string trace_path;
};

int cmd_solve(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    GraphFile gf = graph_file_from_json(load_json_file(o.file));
    static const std::map<std::string, SolveStrategy> strategies = {
        {"auto", SolveStrategy::Auto},         {"topo", SolveStrategy::Topo},
        {"capacity", SolveStrategy::Capacity}, {"kleene", SolveStrategy::Kleene},
        {"oracle", SolveStrategy::Oracle},
    };
    SolveLimits lim;
    if (o.max_iters >= 0) lim.max_iters = o.max_iters;
    SolveResult r = solve_flow(gf.graph, gf.inflow, strategies.at(o.strategy), lim);
    Json rep;
    rep["outcome"] = solve_outcome_name(r.outcome);
    rep["iterations"] = r.iterations;
    if (!r.detail.empty()) rep["detail"] = r.detail;
    switch (r.outcome) {
    case SolveOutcome::Solved:
        rep["status"] = "pass";
        rep["flow"] = assignment_to_json(*r.flow);
        break;
    case SolveOutcome::NotConverged:
        rep["status"] = "not_converged";
        break;
    default:
        rep["status"] = "undefined";
        break;
    }
    emit(out, o.format, rep, watch.ms());
    return r.outcome == SolveOutcome::Solved ? 0 : 2;
}

int cmd_check(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    GraphFile gf = graph_file_from_json(load_json_file(o.file));
    if (!gf.flow) throw InputError(o.file + " has no \"flow\" entry to check");
    ValidateResult v = validate_flow_graph(gf.graph, *gf.flow);
    Json rep;
    int rc = 0;
    if (const auto* fg = std::get_if<FlowGraph>(&v)) {
        rep["status"] = "pass";
        rep["inflow"] = assignment_to_json(fg->inflow);
    } else {
        rep["status"] = "fail";
        rep["witness"] = std::get<NoInflow>(v).node;
        rc = 1;
    }
    emit(out, o.format, rep, watch.ms());
    return rc;
}

int cmd_interface(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    FlowGraph fg = load_flow_graph(o.file, "interface");
    Json rep;
    rep["status"] = "pass";
    rep["interface"] = interface_to_json(interface_of(fg));
    emit(out, o.format, rep, watch.ms());
    return 0;
}

int cmd_compose(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    FlowGraph a = load_flow_graph(o.file, "left operand");
    FlowGraph b = load_flow_graph(o.file2, "right operand");
    std::optional<FlowGraph> c = compose_flow_graphs(a, b);
    Json rep;
    if (c) {
        rep["status"] = "pass";
        rep["graph"] = graph_file_to_json({c->graph, c->inflow, c->flow});
        emit(out, o.format, rep, watch.ms());
        return 0;
    }
    rep["status"] = "undefined";
    bool overlap = false;
    for (const auto& n : a.graph.nodes)
        if (b.graph.nodes.count(n)) overlap = true;
    rep["detail"] = overlap ? "node sets overlap" : "union admits no inflow";
    emit(out, o.format, rep, watch.ms());
    return 2;
}

int cmd_iface_compose(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    Interface a = interface_from_json(load_json_file(o.file));
    Interface b = interface_from_json(load_json_file(o.file2));
    std::optional<Interface> c = interface_compose(a, b);
    Json rep;
    if (c) {
        rep["status"] = "pass";
        rep["interface"] = interface_to_json(*c);
        emit(out, o.format, rep, watch.ms());
        return 0;
    }
    rep["status"] = "undefined";
    rep["detail"] = "interfaces do not compose";
    emit(out, o.format, rep, watch.ms());
    return 2;
}

int cmd_extend(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    FlowGraph base = load_flow_graph(o.base, "base");
    FlowGraph next = load_flow_graph(o.extra, "replacement");
    bool holds = false;
    if (o.mode == "contextual")
        holds = contextual_extension(interface_of(base), interface_of(next));
    else
        holds = subflow_preserving_extension(base, next);
    Json rep;
    rep["status"] = holds ? "pass" : "fail";
    rep["mode"] = o.mode;
    rep["holds"] = holds;
    emit(out, o.format, rep, watch.ms());
    return holds ? 0 : 1;
}

int cmd_ea(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    FlowGraph fg = load_flow_graph(o.file, "ea");
    EaResult r = check_effectively_acyclic(fg);
    Json rep;
    rep["status"] = r.ea ? "pass" : "fail";
    rep["ea"] = r.ea;
    if (!r.ea) rep["witness_cycle"] = r.witness_cycle;
    if (o.brute_max_len > 0) {
        auto cycle = oracle::brute_cycle_check(fg, o.brute_max_len);
        Json b;
        b["max_len"] = o.brute_max_len;
        b["violation"] = cycle ? Json(*cycle) : Json(nullptr);
        b["agree"] = (r.ea == !cycle);
        rep["brute"] = b;
    }
    emit(out, o.format, rep, watch.ms());
    return r.ea ? 0 : 1;
}

int cmd_footprint(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    FlowGraph before = load_flow_graph(o.file, "before");
    FlowGraph after = load_flow_graph(o.file2, "after");
    std::set<NodeId> fp = footprint(before, after);
    Json rep;
    rep["status"] = "pass";
    rep["footprint"] = fp;
    emit(out, o.format, rep, watch.ms());
    return 0;
}

int cmd_laws(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    Domain d = domain_by_name(o.domain, o.arity);
    LawReport monoid = check_monoid_laws(d, o.seed, o.cases);
    AlgebraLawReport algebra = check_separation_algebra_laws(d, o.seed, o.cases);
    AlgebraLawReport congruence = check_congruence(d, o.seed, o.cases);
    bool ok = monoid.ok && algebra.ok && congruence.ok;
    Json rep;
    rep["status"] = ok ? "pass" : "fail";
    rep["domain"] = o.domain;
    rep["monoid"] = law_report_json(monoid);
    rep["separation_algebra"] = algebra_report_json(algebra);
    rep["congruence"] = algebra_report_json(congruence);
    emit(out, o.format, rep, watch.ms());
    return ok ? 0 : 1;
}

int cmd_pip(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    PipRunReport rr;
    if (!o.scenario.empty()) {
        if (o.state.empty()) throw InputError("--scenario requires --state");
        PipState st = pip_state_from_json(load_json_file(o.state));
        std::vector<PipOp> ops = pip_scenario_from_json(load_json_file(o.scenario));
        rr = pip_run_scenario(st, ops);
    } else {
        if (!o.state.empty()) throw InputError("--state requires --scenario");
        rr = pip_run_random(o.seed, o.procs, o.res, o.steps);
    }
    Json rep = pip_report_to_json(rr);
    rep["status"] = rr.ok ? "pass" : "fail";
    emit(out, o.format, rep, watch.ms());
    return rr.ok ? 0 : 1;
}

int cmd_harris(const Opts& o, std::ostream& out, const Stopwatch& watch) {
    HarrisRunReport rr = run_simulation(o.seed, o.threads, o.ops, o.keys);
    Json full = harris_report_to_json(rr);
    if (!o.trace_path.empty()) save_json_file(o.trace_path, full["trace"]);
    Json rep = full;
    rep.erase("trace");
    rep["status"] = rr.ok ? "pass" : "fail";
    emit(out, o.format, rep, watch.ms());
    return rr.ok ? 0 : 1;
}

void add_format(CLI::App* sub, Opts& o) {
    sub->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"flow graph toolkit: solve, compose, and check flow graphs; "
                 "run the PIP and lock-free list models"};
    app.require_subcommand(1);
    Opts o;
    std::function<int(const Opts&, std::ostream&, const Stopwatch&)> todo;

    CLI::App* solve = app.add_subcommand("solve", "Solve the flow equation of a graph file");
    solve->add_option("file", o.file, "Graph file (domain, nodes, edges, inflow)")->required();
    solve->add_option("--strategy", o.strategy, "Solver strategy")
        ->check(CLI::IsMember({"auto", "topo", "capacity", "kleene", "oracle"}))
        ->capture_default_str();
    solve->add_option("--max-iters", o.max_iters, "Fixpoint iteration bound");
    add_format(solve, o);
    solve->callback([&] { todo = cmd_solve; });

    CLI::App* check = app.add_subcommand("check", "Check the flow equation of a graph file");
    check->add_option("file", o.file, "Graph file carrying a flow")->required();
    add_format(check, o);
    check->callback([&] { todo = cmd_check; });

    CLI::App* iface = app.add_subcommand("interface", "Print the interface of a flow graph");
    iface->add_option("file", o.file, "Graph file carrying a flow")->required();
    add_format(iface, o);
    iface->callback([&] { todo = cmd_interface; });

    CLI::App* compose = app.add_subcommand("compose", "Compose two flow graphs");
    compose->add_option("left", o.file, "Left graph file")->required();
    compose->add_option("right", o.file2, "Right graph file")->required();
    add_format(compose, o);
    compose->callback([&] { todo = cmd_compose; });

    CLI::App* icompose = app.add_subcommand("iface-compose", "Compose two interface files");
    icompose->add_option("left", o.file, "Left interface file")->required();
    icompose->add_option("right", o.file2, "Right interface file")->required();
    add_format(icompose, o);
    icompose->callback([&] { todo = cmd_iface_compose; });

    CLI::App* extend = app.add_subcommand("extend", "Check an extension relation");
    extend->add_option("--base", o.base, "Region before the rewrite")->required();
    extend->add_option("--new", o.extra, "Region after the rewrite")->required();
    extend->add_option("--mode", o.mode, "contextual or subflow")
        ->check(CLI::IsMember({"contextual", "subflow"}))
        ->required();
    add_format(extend, o);
    extend->callback([&] { todo = cmd_extend; });

    CLI::App* ea = app.add_subcommand("ea", "Check effective acyclicity of a flow graph");
    ea->add_option("file", o.file, "Graph file carrying a flow")->required();
    ea->add_option("--brute-max-len", o.brute_max_len,
                   "Also brute-force path compositions up to this length");
    add_format(ea, o);
    ea->callback([&] { todo = cmd_ea; });

    CLI::App* fp = app.add_subcommand("footprint", "Footprint of an interface-preserving rewrite");
    fp->add_option("before", o.file, "Graph file before the rewrite")->required();
    fp->add_option("after", o.file2, "Graph file after the rewrite")->required();
    add_format(fp, o);
    fp->callback([&] { todo = cmd_footprint; });

    CLI::App* laws = app.add_subcommand("laws", "Randomized algebraic law suites for a domain");
    laws->add_option("--domain", o.domain, "Flow domain name")
        ->check(CLI::IsMember({"path_count", "pip", "shortest_path", "inverse_reach", "product"}))
        ->capture_default_str();
    laws->add_option("--arity", o.arity, "Component count for the product domain")
        ->capture_default_str();
    laws->add_option("--seed", o.seed, "Case generator seed")->capture_default_str();
    laws->add_option("--cases", o.cases, "Cases per law")->capture_default_str();
    add_format(laws, o);
    laws->callback([&] { todo = cmd_laws; });

    CLI::App* pip = app.add_subcommand("pip", "Run the priority-inheritance model");
    pip->add_option("--state", o.state, "Initial state file");
    pip->add_option("--scenario", o.scenario, "Scripted op list (JSON)");
    pip->add_option("--seed", o.seed, "Random scenario seed")->capture_default_str();
    pip->add_option("--procs", o.procs, "Process count (random mode)")->capture_default_str();
    pip->add_option("--res", o.res, "Resource count (random mode)")->capture_default_str();
    pip->add_option("--steps", o.steps, "Op count (random mode)")->capture_default_str();
    add_format(pip, o);
    pip->callback([&] { todo = cmd_pip; });

    CLI::App* harris = app.add_subcommand("harris", "Run the lock-free list model");
    harris->add_option("--seed", o.seed, "Schedule seed")->capture_default_str();
    harris->add_option("--threads", o.threads, "Worker count")->capture_default_str();
    harris->add_option("--ops", o.ops, "Operation count")->capture_default_str();
    harris->add_option("--keys", o.keys, "Key range")->capture_default_str();
    harris->add_option("--trace", o.trace_path, "Write the step trace to this file");
    add_format(harris, o);
    harris->callback([&] { todo = cmd_harris; });

    std::vector<const char*> argv;
    argv.push_back("flowgraph");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 3;
    }

    try {
        return todo(o, out, Stopwatch{});
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 3;
    } catch (const CapabilityError& e) {
        err << "input error: " << e.what() << "\n";
        return 3;
    } catch (const ResourceError& e) {
        err << "resource bound: " << e.what() << "\n";
        return 4;
    } catch (const ModelError& e) {
        err << "check failed: " << e.what() << "\n";
        return 1;
    } catch (const Json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return 3;
    }
}

CliResult cli_run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    int rc = cli_run(args, out, err);
    return {rc, out.str(), err.str()};
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_run(args, std::cout, std::cerr);
}

} // namespace flow
