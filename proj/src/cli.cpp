#include "normlap/cli.hpp"

#include "normlap/eigen.hpp"
#include "normlap/perturb.hpp"
#include "normlap/reproduce.hpp"
#include "normlap/search.hpp"
#include "normlap/spectral.hpp"
#include "normlap/theorems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace normlap::cli {

namespace {

/// Bad flags or input; mapped to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { Table, Json, Csv };

struct Common {
    std::string format = "table";
    double tol = 1e-8;
    bool no_timestamp = false;
    int jobs = 1;

    Format fmt() const {
        if (format == "json") return Format::Json;
        if (format == "csv") return Format::Csv;
        return Format::Table;
    }
};

struct Input {
    std::string g6;
    std::string file;
    std::string family;
};

struct Params {
    std::string theorem;
    std::string op;
    std::string g1;
    std::string g2;
    std::optional<int> u;
    std::optional<int> v;
    std::vector<int> targets;
    std::string edges;
    std::vector<int> subtree;
    std::optional<int> n;
    int nmax = 6;
    int max_transfer = 2;
    int witness_cap = 3;
    int pair_order_max = 6;
    std::string stream;
    std::string state;
    std::string direction;
};

std::string num(double x) {
    std::ostringstream s;
    s << std::setprecision(6) << x;
    return s.str();
}

Graph load_input(const Input& in) {
    const int given = !in.g6.empty() + !in.file.empty() + !in.family.empty();
    if (given != 1) throw UsageError("give exactly one of --g6, --file, --family");
    if (!in.g6.empty()) return parse_graph6(in.g6);
    if (!in.file.empty()) return read_edge_list_file(in.file);
    return make_named(parse_family(in.family));
}

/// "kind:n" or graph6 (':' never occurs in graph6).
Graph graph_spec(const std::string& text, const char* flag) {
    if (text.empty()) throw UsageError(std::string(flag) + " is required");
    if (text.find(':') != std::string::npos) return make_named(parse_family(text));
    return parse_graph6(text);
}

int need(const std::optional<int>& x, const char* flag) {
    if (!x) throw UsageError(std::string(flag) + " is required");
    return *x;
}

std::vector<Edge> parse_edges(const std::string& text) {
    std::vector<Edge> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw UsageError("edges look like 0-1,2-3; got '" + item + "'");
        try {
            out.push_back({std::stoi(item.substr(0, dash)), std::stoi(item.substr(dash + 1))});
        } catch (const std::logic_error&) {
            throw UsageError("bad edge '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("--edges is required");
    return out;
}

void timestamp(std::ostream& out, const Common& c) {
    if (c.no_timestamp || c.fmt() != Format::Table) return;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    out << "# generated " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
}

TheoremId theorem_arg(const std::string& text) {
    const auto id = parse_theorem(text);
    if (!id) throw UsageError("unknown theorem '" + text + "'");
    return *id;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const Common& c, const Input& in, std::ostream& out) {
    const Graph g = load_input(in);
    const Spectrum s = spectrum(g);
    const auto& values = s.values();
    switch (c.fmt()) {
    case Format::Json: {
        nlohmann::json j = {{"graph6", to_graph6(g)},
                            {"n", g.order()},
                            {"eigenvalues", values},
                            {"rho", s.rho()},
                            {"hygiene",
                             {{"residual", s.hygiene.residual},
                              {"orthonormality", s.hygiene.orthonormality},
                              {"trace", s.hygiene.trace}}}};
        if (g.order() >= 2) j["lambda2"] = s.lambda2();
        out << j.dump() << '\n';
        break;
    }
    case Format::Csv:
        out << "index,eigenvalue\n";
        for (std::size_t k = 0; k < values.size(); ++k) out << k << ',' << num(values[k]) << '\n';
        break;
    case Format::Table:
        timestamp(out, c);
        out << "graph6 " << to_graph6(g) << "  n " << g.order() << "  m " << g.size() << '\n';
        out << "eigenvalues";
        for (double x : values) out << ' ' << num(std::abs(x) < 1e-12 ? 0.0 : x);
        out << '\n';
        if (g.order() >= 2) out << "lambda2 " << num(s.lambda2()) << '\n';
        out << "rho " << num(s.rho()) << '\n';
        break;
    }
    return kExitOk;
}

int cmd_perturb(const Common& c, const Input& in, const Params& p, std::ostream& out) {
    PerturbResult r;
    Graph before;
    if (p.op == "subdivide") {
        before = load_input(in);
        if (!p.edges.empty()) {
            r = subdivision_graph(before, parse_edges(p.edges));
        } else {
            r = subdivide_edge(before, need(p.u, "--u"), need(p.v, "--v"));
        }
    } else if (p.op == "identify") {
        before = p.g1.empty() ? load_input(in) : graph_spec(p.g1, "--g1");
        r = identify(before, need(p.u, "--u"), graph_spec(p.g2, "--g2"), need(p.v, "--v"));
    } else if (p.op == "transfer") {
        before = load_input(in);
        r = transfer_edges(before, need(p.u, "--u"), need(p.v, "--v"), p.targets);
    } else {
        throw UsageError("--op must be subdivide, identify or transfer");
    }
    const Spectrum s0 = spectrum(before);
    const Spectrum s1 = spectrum(r.result);
    const double l0 = before.order() >= 2 ? s0.lambda2() : 0.0;
    const double l1 = r.result.order() >= 2 ? s1.lambda2() : 0.0;
    switch (c.fmt()) {
    case Format::Json: {
        nlohmann::json j = {{"op", p.op},
                            {"before", to_graph6(before)},
                            {"after", to_graph6(r.result)},
                            {"lambda2_before", l0},
                            {"lambda2_after", l1},
                            {"rho_before", s0.rho()},
                            {"rho_after", s1.rho()},
                            {"new_vertices", r.new_vertices},
                            {"disconnected", r.disconnected}};
        out << j.dump() << '\n';
        break;
    }
    case Format::Csv:
        out << "op,before,after,lambda2_before,lambda2_after,rho_before,rho_after\n";
        out << p.op << ',' << to_graph6(before) << ',' << to_graph6(r.result) << ',' << num(l0) << ',' << num(l1) << ','
            << num(s0.rho()) << ',' << num(s1.rho()) << '\n';
        break;
    case Format::Table:
        timestamp(out, c);
        out << "before  " << to_graph6(before) << "  lambda2 " << num(l0) << "  rho " << num(s0.rho()) << '\n';
        out << "after   " << to_graph6(r.result) << "  lambda2 " << num(l1) << "  rho " << num(s1.rho())
            << (r.disconnected ? "  (disconnected)" : "") << '\n';
        out << "edges\n";
        write_edge_list(out, r.result);
        break;
    }
    return kExitOk;
}

Verdict run_check(TheoremId id, const Input& in, const Params& p, const CheckOptions& opts) {
    switch (id) {
    case TheoremId::C2_3:
        return check_cor_2_3(need(p.n, "--n"), opts);
    case TheoremId::T3_3:
    case TheoremId::C3_4:
    case TheoremId::T4_2: {
        const Graph g1 = p.g1.empty() ? load_input(in) : graph_spec(p.g1, "--g1");
        const Graph g2 = graph_spec(p.g2, "--g2");
        const int u = need(p.u, "--u");
        const int v = need(p.v, "--v");
        if (id == TheoremId::T3_3) return check_thm_3_3(g1, u, g2, v, opts);
        if (id == TheoremId::C3_4) return check_cor_3_4(g1, u, g2, v, opts);
        return check_thm_4_2(g1, u, g2, v, opts);
    }
    default:
        break;
    }
    const Graph g = load_input(in);
    switch (id) {
    case TheoremId::L2_4: return check_lemma_2_4(g, opts);
    case TheoremId::C2_2: return check_cor_2_2(g, opts);
    case TheoremId::T3_1: return check_thm_3_1(g, need(p.u, "--u"), need(p.v, "--v"), opts);
    case TheoremId::T4_1: return check_thm_4_1(g, need(p.u, "--u"), need(p.v, "--v"), opts);
    case TheoremId::C3_2: return check_cor_3_2(g, parse_edges(p.edges), opts);
    case TheoremId::C3_5:
        if (p.subtree.empty()) throw UsageError("--subtree is required");
        return check_cor_3_5(g, p.subtree, opts);
    case TheoremId::T3_6:
    case TheoremId::T4_3:
        if (p.targets.empty()) throw UsageError("--targets is required");
        return id == TheoremId::T3_6 ? check_thm_3_6(g, need(p.u, "--u"), need(p.v, "--v"), p.targets, opts)
                                     : check_thm_4_3(g, need(p.u, "--u"), need(p.v, "--v"), p.targets, opts);
    default:
        break;
    }
    throw UsageError("unsupported theorem");
}

void write_verdict(std::ostream& out, const Verdict& v, const Common& c) {
    switch (c.fmt()) {
    case Format::Json:
        out << to_json(v).dump() << '\n';
        return;
    case Format::Csv:
        out << "theorem,graph6,precondition,lhs,relation,rhs,strict_expected,pass\n";
        out << theorem_name(v.theorem) << ',' << v.graph6 << ',' << to_string(v.precondition) << ',' << num(v.lhs) << ','
            << to_string(v.relation) << ',' << num(v.rhs) << ',' << (v.strict_expected ? "true" : "false") << ','
            << (v.pass ? "true" : "false") << '\n';
        return;
    case Format::Table:
        timestamp(out, c);
        out << "theorem       " << theorem_name(v.theorem) << '\n';
        out << "graph6        " << v.graph6 << '\n';
        out << "params        " << v.params.dump() << '\n';
        out << "precondition  " << to_string(v.precondition) << '\n';
        out << "relation      " << num(v.lhs) << ' ' << to_string(v.relation) << ' ' << num(v.rhs) << '\n';
        out << "strict        " << (v.strict_expected ? "expected" : "not expected") << '\n';
        for (std::size_t k = 0; k < v.basis.size(); ++k) {
            out << "basis " << k << "       f(u) " << num(v.basis[k].at_u) << "  f(v) " << num(v.basis[k].at_v)
                << (v.basis[k].satisfies ? "  satisfies" : "") << '\n';
        }
        out << "verdict       " << (v.pass ? "PASS" : "FAIL") << (v.vacuous() ? " (vacuous)" : "") << '\n';
        return;
    }
}

ScanConfig scan_config(const Common& c, const Params& p) {
    ScanConfig cfg;
    cfg.n_max = p.nmax;
    cfg.max_transfer = p.max_transfer;
    cfg.witness_cap = p.witness_cap;
    cfg.pair_order_max = p.pair_order_max;
    cfg.jobs = c.jobs;
    cfg.options.tol = c.tol;
    if (!p.stream.empty()) {
        if (p.stream == "-") throw UsageError("read graph6 streams from a file path");
        std::ifstream f(p.stream);
        if (!f) throw UsageError("cannot read " + p.stream);
        cfg.graphs = read_graph6_stream(f);
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

int cmd_scan(const Common& c, const Params& p, std::ostream& out) {
    const TheoremId id = theorem_arg(p.theorem);
    const ScanResult r = scan_theorem(id, scan_config(c, p));
    switch (c.fmt()) {
    case Format::Json: write_scan_jsonl(out, r); break;
    case Format::Csv: write_scan_csv(out, r); break;
    case Format::Table:
        timestamp(out, c);
        write_scan_table(out, r);
        break;
    }
    return r.violations == 0 ? kExitOk : kExitFailedCheck;
}

int cmd_witness(const Common& c, const Params& p, std::ostream& out) {
    const TheoremId id = theorem_arg(p.theorem);
    const auto state = parse_precondition(p.state);
    if (!state) throw UsageError("--state must be Holds, Fails, Ambiguous or Unconditional");
    const auto direction = parse_direction(p.direction);
    if (!direction) throw UsageError("--direction must be less, equal or greater");
    const auto w = find_witness(id, *state, *direction, scan_config(c, p));
    if (c.fmt() == Format::Json) {
        out << (w ? to_json(*w) : nlohmann::json{{"found", false}}).dump() << '\n';
        return kExitOk;
    }
    if (!w) {
        if (c.fmt() == Format::Table) timestamp(out, c);
        out << "not found up to n=" << p.nmax << '\n';
        return kExitOk;
    }
    write_verdict(out, w->verdict, c);
    return kExitOk;
}

int cmd_reproduce(const Common& c, std::ostream& out) {
    const auto rows = reproduce({c.jobs});
    switch (c.fmt()) {
    case Format::Json: write_rows_json(out, rows); break;
    case Format::Csv: write_rows_csv(out, rows); break;
    case Format::Table:
        timestamp(out, c);
        write_rows_table(out, rows);
        break;
    }
    const bool all = std::all_of(rows.begin(), rows.end(), [](const ReproduceRow& r) { return r.pass; });
    return all ? kExitOk : kExitFailedCheck;
}

void add_input(CLI::App* app, Input& in) {
    app->add_option("--g6", in.g6, "graph6 string");
    app->add_option("--file", in.file, "edge-list file");
    app->add_option("--family", in.family, "named family kind:n (path, cycle, star, complete)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"normalized Laplacian perturbation toolkit", "normlap"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    Input input;
    Params p;
    app.add_option("--format", common.format, "table, json or csv")->check(CLI::IsMember({"table", "json", "csv"}));
    app.add_option("--tol", common.tol, "eigenvalue inequality tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--no-timestamp", common.no_timestamp, "omit the timestamp line");
    app.add_option("--jobs", common.jobs, "scan worker threads")->check(CLI::Range(1, 256));

    auto* spectrum_cmd = app.add_subcommand("spectrum", "normalized Laplacian eigenvalues");
    add_input(spectrum_cmd, input);

    auto* perturb_cmd = app.add_subcommand("perturb", "apply a graph operation");
    add_input(perturb_cmd, input);
    perturb_cmd->add_option("--op", p.op, "subdivide, identify or transfer")->required();
    perturb_cmd->add_option("--g1", p.g1, "first graph for identify (kind:n or graph6)");
    perturb_cmd->add_option("--g2", p.g2, "second graph for identify (kind:n or graph6)");
    perturb_cmd->add_option("--u", p.u);
    perturb_cmd->add_option("--v", p.v);
    perturb_cmd->add_option("--targets", p.targets)->delimiter(',');
    perturb_cmd->add_option("--edges", p.edges, "edges to subdivide, e.g. 0-1,2-3");

    auto* check_cmd = app.add_subcommand("check", "check one theorem instance");
    add_input(check_cmd, input);
    check_cmd->add_option("theorem", p.theorem, "L2.4, C2.2, C2.3, T3.1, C3.2, T3.3, C3.4, C3.5, T3.6, T4.1, T4.2, T4.3")
        ->required();
    check_cmd->add_option("--g1", p.g1, "first graph (kind:n or graph6)");
    check_cmd->add_option("--g2", p.g2, "second graph (kind:n or graph6)");
    check_cmd->add_option("--u", p.u);
    check_cmd->add_option("--v", p.v);
    check_cmd->add_option("--targets", p.targets)->delimiter(',');
    check_cmd->add_option("--edges", p.edges, "edge list, e.g. 0-1,2-3");
    check_cmd->add_option("--subtree", p.subtree)->delimiter(',');
    check_cmd->add_option("--n", p.n, "star order for C2.3");

    auto add_scan_options = [&](CLI::App* cmd) {
        cmd->add_option("theorem", p.theorem)->required();
        cmd->add_option("--nmax", p.nmax, "largest order scanned");
        cmd->add_option("--max-transfer", p.max_transfer, "cap on transferred edges");
        cmd->add_option("--witness-cap", p.witness_cap, "witnesses kept per bucket");
        cmd->add_option("--pair-order-max", p.pair_order_max, "largest glued order for enumerated pairs");
        cmd->add_option("--graphs", p.stream, "graph6 file scanned instead of enumeration");
    };
    auto* scan_cmd = app.add_subcommand("scan", "exhaustive scan of one theorem");
    add_scan_options(scan_cmd);
    auto* witness_cmd = app.add_subcommand("witness", "first instance in a stratum and direction");
    add_scan_options(witness_cmd);
    witness_cmd->add_option("--state", p.state, "Holds, Fails, Ambiguous or Unconditional")->required();
    witness_cmd->add_option("--direction", p.direction, "less, equal or greater")->required();

    auto* reproduce_cmd = app.add_subcommand("reproduce", "run every anchor and exhaustive check");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (spectrum_cmd->parsed()) return cmd_spectrum(common, input, out);
        if (perturb_cmd->parsed()) return cmd_perturb(common, input, p, out);
        if (check_cmd->parsed()) {
            CheckOptions opts;
            opts.tol = common.tol;
            const Verdict v = run_check(theorem_arg(p.theorem), input, p, opts);
            write_verdict(out, v, common);
            return v.pass ? kExitOk : kExitFailedCheck;
        }
        if (scan_cmd->parsed()) return cmd_scan(common, p, out);
        if (witness_cmd->parsed()) return cmd_witness(common, p, out);
        if (reproduce_cmd->parsed()) return cmd_reproduce(common, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitFailedCheck;
    } catch (const ConvergenceError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitFailedCheck;
    } catch (const std::invalid_argument& e) {
        // GraphError, Graph6Error, PreconditionError and bad parameters.
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace normlap::cli
