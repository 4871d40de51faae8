// Command-line front end. Every subcommand prints one JSON document with a
// "config" echo; --pretty switches to an indented key/value listing.

#include "chroma/chromatic.hpp"
#include "chroma/cross_check.hpp"
#include "chroma/dirichlet.hpp"
#include "chroma/fixtures.hpp"
#include "chroma/hqd.hpp"
#include "chroma/integral.hpp"
#include "chroma/io.hpp"
#include "chroma/lc_circuit.hpp"
#include "chroma/orientations.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using namespace chroma;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_numerical = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    bool pretty = false;
    double tol = 1.0;
    unsigned threads = 1;
    std::string output;
};

struct Outcome {
    Json body;
    int code = exit_ok;
};

// "fixture:name" (optionally "fixture:star_k:3") or a JSON file.
GraphDocument load_graph(const std::string& source)
{
    const std::string prefix = "fixture:";
    if (source.rfind(prefix, 0) != 0)
        return read_graph_file(source);
    std::string name = source.substr(prefix.size());
    int k = 2;
    if (auto colon = name.find(':'); colon != std::string::npos) {
        k = std::stoi(name.substr(colon + 1));
        name = name.substr(0, colon);
    }
    Fixture f = make_fixture(name, k);
    GraphDocument doc;
    doc.graph = std::move(f.graph);
    for (const auto& [v, x] : f.boundary_values)
        doc.boundary_values[v] = x;
    return doc;
}

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        }
        catch (const std::exception&) {
            throw UsageError("--values expects comma-separated numbers, got '" + item + "'");
        }
    }
    return out;
}

Json string_list(const std::vector<std::string>& xs) { return Json(xs); }

Json polynomial_json(const IntPolynomial& p)
{
    Json coeffs = Json::array();
    for (const auto& c : p.coefficients())
        coeffs.push_back(bigint_to_json(c));
    return {{"coefficients", coeffs}, {"text", p.to_string()}};
}

QAssignment q_from(const GraphDocument& doc, const EdgeMap<Complex>& values)
{
    QAssignment q;
    for (const auto& e : doc.graph.edges()) {
        auto it = values.find(e.id);
        if (it == values.end())
            throw FormatError("no q value for edge " + std::to_string(e.id.value));
        q.values[e.id] = it->second;
        if (it->second.imag() != 0.0)
            q.complex_valued = true;
    }
    return q;
}

Json residual_json(const Graph& g, const ResidualReport& r)
{
    Json balance = Json::object(), reciprocal = Json::object(), skipped = Json::array();
    for (const auto& [v, x] : r.balance)
        balance[g.name(v)] = complex_to_json(x);
    for (const auto& [v, x] : r.reciprocal)
        reciprocal[g.name(v)] = complex_to_json(x);
    for (auto v : r.skipped)
        skipped.push_back(g.name(v));
    return {{"balance", balance},
            {"reciprocal", reciprocal},
            {"max_balance", r.max_balance},
            {"max_reciprocal", r.max_reciprocal},
            {"skipped_at_infinity", skipped}};
}

Json estimate_json(const IntegralEstimate& e)
{
    return {{"estimate", e.mean},
            {"stderr", e.standard_error},
            {"samples", e.samples},
            {"k", e.k},
            {"boundary_values", e.boundary_values},
            {"seed", e.seed},
            {"sampler", e.sampler == Sampler::fiber ? "fiber" : "simplex"},
            {"min_value", e.min_value},
            {"max_value", e.max_value}};
}

Sampler sampler_named(const std::string& name)
{
    if (name == "simplex")
        return Sampler::simplex;
    if (name == "fiber")
        return Sampler::fiber;
    throw UsageError("--sampler must be 'simplex' or 'fiber'");
}

// ---- subcommands ----

Outcome run_chromatic(const std::string& input, std::optional<long> at)
{
    const auto doc = load_graph(input);
    const auto chi = chromatic_polynomial(doc.graph);
    Outcome out;
    out.body["chromatic"] = polynomial_json(chi);
    out.body["tutte_x_slice"] = polynomial_json(tutte_x_slice(doc.graph));
    if (at) {
        out.body["at"] = *at;
        out.body["value"] = bigint_to_json(chi.evaluate(BigInt(*at)));
        if (*at < 0)
            out.body["tutte_check"] = bigint_to_json(chi_at_negative(doc.graph, static_cast<int>(-*at)));
    }
    return out;
}

Outcome run_predict(const std::string& input)
{
    const auto doc = load_graph(input);
    const auto r = count_report(doc.graph, input);
    Outcome out;
    out.body = {{"graph_id", r.graph_id},
                {"k", r.k},
                {"chi_value", bigint_to_json(r.chi_value)},
                {"predicted_realization_count", bigint_to_json(r.predicted_realization_count)}};
    return out;
}

Outcome run_orient_count(const std::string& input, std::optional<int> k, const std::string& values,
                         const Globals& globals)
{
    const auto doc = load_graph(input);
    OrientationCountOptions options;
    options.threads = globals.threads;
    Outcome out;
    if (k) {
        const auto vals = values.empty() ? default_boundary_values(*k) : parse_values(values);
        const auto aug = augment_k(doc.graph, *k, vals);
        const BigInt count = count_compatible(aug.graph, aug.boundary_values, options);
        const BigInt chi = abs(chi_at_negative(doc.graph, *k));
        out.body = {{"count", bigint_to_json(count)},
                    {"chi_check", {{"abs_chi", bigint_to_json(chi)}, {"equal", count == chi}}}};
        if (count != chi)
            out.code = exit_numerical;
    }
    else {
        if (!values.empty())
            throw UsageError("--values needs --k");
        out.body = {{"count", bigint_to_json(count_compatible(doc.graph, doc.real_boundary_values(), options))}};
    }
    return out;
}

Outcome run_mc_chi(const std::string& input, int k, std::size_t samples, std::uint64_t seed,
                   const std::string& values, const std::string& sampler, const Globals& globals)
{
    const auto doc = load_graph(input);
    EstimateOptions options;
    options.threads = globals.threads;
    options.sampler = sampler_named(sampler);
    if (!values.empty())
        options.values = parse_values(values);
    const auto e = estimate_chi(doc.graph, k, samples, seed, options);
    Outcome out;
    out.body = estimate_json(e);
    try {
        const BigInt exact = abs(chi_at_negative(doc.graph, k));
        const double x = exact.convert_to<double>();
        out.body["exact"] = bigint_to_json(exact);
        out.body["z_score"] = z_score(e.mean, e.standard_error, x);
    }
    catch (const std::length_error&) {
        out.body["exact"] = nullptr;
        out.body["z_score"] = nullptr;
    }
    return out;
}

Outcome run_dirichlet(const std::string& input, const std::string& conductances)
{
    const auto doc = load_graph(input);
    const auto raw = parse_edge_values(read_json_file(conductances), doc.graph);
    bool complex = doc.complex_boundary;
    for (const auto& [id, c] : raw)
        complex = complex || c.imag() != 0.0;
    for (const auto& [v, b] : doc.boundary_values)
        complex = complex || b.imag() != 0.0;

    Outcome out;
    auto emit = [&](const auto& h, const Graph& g) {
        Json values = Json::object(), energies = Json::object();
        for (VertexIndex v = 0; v < g.vertex_count(); ++v)
            values[g.name(v)] = complex_to_json(Complex(h.values[v]));
        for (const auto& [id, q] : h.energies)
            energies[std::to_string(id.value)] = complex_to_json(Complex(q));
        out.body = {{"values", values},
                    {"energies", energies},
                    {"Z", complex_to_json(Complex(h.total_energy))},
                    {"residual", h.residual},
                    {"complex", complex}};
    };
    if (complex) {
        emit(solve_dirichlet(doc.graph, raw, doc.boundary_values), doc.graph);
    }
    else {
        EdgeMap<double> c;
        for (const auto& [id, x] : raw)
            c[id] = x.real();
        emit(solve_dirichlet(doc.graph, c, doc.real_boundary_values()), doc.graph);
    }
    return out;
}

Outcome run_hqd_check(const std::string& input, const Globals& globals)
{
    const auto doc = load_graph(input);
    const auto q = q_from(doc, doc.q);
    std::vector<Complex> z(doc.graph.vertex_count());
    for (VertexIndex v = 0; v < doc.graph.vertex_count(); ++v) {
        if (auto it = doc.z.find(v); it != doc.z.end())
            z[v] = it->second;
        else if (auto b = doc.boundary_values.find(v); b != doc.boundary_values.end())
            z[v] = b->second;
        else
            throw FormatError("no position for vertex '" + doc.graph.name(v) + "'");
    }
    const auto report = residuals(doc.graph, q, z);
    const double tol = 1e-10 * globals.tol;
    Outcome out;
    out.body = residual_json(doc.graph, report);
    out.body["reciprocal_holds"] = report.max_reciprocal < tol;
    out.body["balanced"] = report.max_balance < tol;
    out.body["tolerance"] = tol;
    if (!(report.max_reciprocal < tol))
        out.code = exit_numerical;
    return out;
}

Outcome run_hqd_solve(const std::string& input, const std::string& q_source, std::size_t starts, std::uint64_t seed,
                      const Globals& globals)
{
    const auto doc = load_graph(input);
    QAssignment q;
    const std::string sample = "sample:";
    if (q_source.rfind(sample, 0) == 0) {
        q = sample_balanced_q(doc.graph, std::stoull(q_source.substr(sample.size())));
    }
    else if (q_source.empty()) {
        q = q_from(doc, doc.q);
    }
    else {
        q = q_from(doc, parse_edge_values(read_json_file(q_source), doc.graph));
    }
    for (auto v : doc.graph.boundary_vertices())
        if (!doc.boundary_values.contains(v))
            throw FormatError("boundary vertex '" + doc.graph.name(v) + "' has no position");

    std::optional<BigInt> predicted;
    std::string unavailable;
    try {
        predicted = predicted_realizations(doc.graph);
    }
    catch (const std::invalid_argument& err) {
        unavailable = err.what();
    }
    // 200 starts per predicted solution unless told otherwise
    if (starts == 0)
        starts = 200 * (predicted && *predicted > 1 ? predicted->convert_to<std::size_t>() : 1);

    SolveOptions options;
    options.starts = starts;
    options.seed = seed;
    options.threads = globals.threads;
    options.residual_tol *= globals.tol;
    options.dedup_tol *= globals.tol;
    options.relative_tol *= globals.tol;
    const auto result = solve_realizations(doc.graph, q, doc.boundary_values, options);

    Json solutions = Json::array();
    for (std::size_t i = 0; i < result.solutions.size(); ++i)
        solutions.push_back({{"z", vertex_values_to_json(doc.graph, result.solutions[i].z)},
                             {"residual", result.solutions[i].residual},
                             {"found_by_start", result.found_by[i]}});
    Outcome out;
    out.body = {{"q", edge_values_to_json(q.values)},
                {"count", result.solutions.size()},
                {"converged_starts", result.converged_starts},
                {"solutions", solutions},
                {"warnings", string_list(result.warnings)}};
    out.body["starts"] = starts;
    if (predicted) {
        out.body["predicted"] = bigint_to_json(*predicted);
        out.body["matches_prediction"] = BigInt(result.solutions.size()) == *predicted;
    }
    else {
        out.body["predicted"] = nullptr;
        out.body["prediction_unavailable"] = unavailable;
    }
    return out;
}

PhasorDrive drive_from(const GraphDocument& doc, double omega)
{
    if (doc.netlist.empty())
        throw FormatError("the graph carries no circuit elements");
    PhasorDrive drive;
    drive.omega = omega;
    for (auto v : doc.graph.boundary_vertices()) {
        auto it = doc.boundary_values.find(v);
        if (it == doc.boundary_values.end())
            throw FormatError("boundary vertex '" + doc.graph.name(v) + "' has no drive amplitude");
        drive.u[v] = it->second;
    }
    return drive;
}

Outcome run_circuit(const std::string& input, double omega)
{
    const auto doc = load_graph(input);
    const auto drive = drive_from(doc, omega);
    const auto sol = solve_circuit(doc.graph, doc.netlist, drive);
    Json edges = Json::object();
    bool resistorless = true;
    for (const auto& e : doc.graph.edges()) {
        const auto& p = sol.power.edges.at(e.id);
        resistorless = resistorless && !doc.netlist.at(e.id).R;
        edges[std::to_string(e.id.value)] = {{"u", doc.graph.name(e.u)},
                                             {"v", doc.graph.name(e.v)},
                                             {"impedance", complex_to_json(impedance(doc.netlist.at(e.id), omega))},
                                             {"voltage_drop", complex_to_json(p.voltage_drop)},
                                             {"current", complex_to_json(p.current)},
                                             {"complex_power", complex_to_json(p.complex_power)},
                                             {"real_power", p.real_power},
                                             {"reactive_power", p.reactive_power}};
    }
    Outcome out;
    out.body = {{"voltages", vertex_values_to_json(doc.graph, sol.u)},
                {"edges", edges},
                {"convention", PowerReport::convention},
                {"kirchhoff_residual", sol.kirchhoff_residual}};
    if (resistorless) {
        try {
            const auto h = reactive_power_as_hqd(doc.graph, doc.netlist, drive);
            out.body["reactive_hqd"] = residual_json(doc.graph, h.report);
        }
        catch (const CoincidentVerticesError& err) {
            out.body["reactive_hqd"] = {{"error", err.what()}};
        }
    }
    return out;
}

Outcome run_resonance(const std::string& input)
{
    const auto doc = load_graph(input);
    if (doc.netlist.empty())
        throw FormatError("the graph carries no circuit elements");
    const auto r = resonant_frequencies(doc.graph, doc.netlist);
    Json roots = Json::array();
    for (auto x : r.roots)
        roots.push_back(complex_to_json(x));
    Outcome out;
    out.body = {{"frequencies", r.frequencies},
                {"degenerate", r.degenerate},
                {"roots", roots},
                {"all_roots_real_negative", r.all_roots_real_negative},
                {"n", r.n},
                {"polynomial", r.polynomial.polynomial.coefficients},
                {"warnings", string_list(r.warnings)}};
    if (r.degenerate)
        out.body["note"] = "every spanning tree has the same number of inductors: no resonance";
    return out;
}

Outcome run_cross_check(const std::string& input, std::vector<int> ks, std::size_t samples, std::uint64_t seed,
                        const std::string& sampler, double sigmas, const Globals& globals)
{
    const auto doc = load_graph(input);
    CrossCheckOptions options;
    options.samples = samples;
    options.seed = seed;
    options.threads = globals.threads;
    options.sampler = sampler_named(sampler);
    options.sigmas = sigmas * globals.tol;
    if (ks.empty())
        ks = {2};
    Outcome out;
    Json reports = Json::array();
    bool all = true;
    for (int k : ks) {
        const auto r = cross_check(doc.graph, k, options);
        reports.push_back({{"k", k},
                           {"exact", bigint_to_json(r.exact)},
                           {"orientations", bigint_to_json(r.orientations)},
                           {"monte_carlo", estimate_json(r.estimate)},
                           {"z_score", r.z_score},
                           {"exact_routes_agree", r.exact_routes_agree},
                           {"estimate_within", r.estimate_within},
                           {"passed", r.passed()}});
        all = all && r.passed();
    }
    out.body = {{"reports", reports}, {"sigmas", options.sigmas}, {"passed", all}};
    if (!all)
        out.code = exit_numerical;
    return out;
}

Outcome run_fixture(const std::string& name, int k, std::optional<std::uint64_t> q_seed)
{
    const auto f = make_fixture(name, k);
    Outcome out;
    out.body = graph_to_json(f.graph, f.boundary_values);
    if (q_seed) {
        const auto q = f.name == "fig332" ? fig332_balanced_q(f.graph, *q_seed) : sample_balanced_q(f.graph, *q_seed);
        out.body["q"] = edge_values_to_json(q.values);
    }
    return out;
}

// ---- output ----

void flatten(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows)
{
    if (j.is_object() && !j.empty()) {
        for (const auto& [key, value] : j.items())
            flatten(value, path.empty() ? key : path + "." + key, rows);
    }
    else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
    }
    else {
        rows.emplace_back(path, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

void emit(const Json& doc, const Globals& globals)
{
    std::ostringstream text;
    if (globals.pretty) {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(doc, "", rows);
        std::size_t width = 0;
        for (const auto& [k, v] : rows)
            width = std::max(width, k.size());
        for (const auto& [k, v] : rows)
            text << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
    }
    else {
        text << doc.dump() << '\n';
    }
    if (globals.output.empty()) {
        std::cout << text.str();
        return;
    }
    std::ofstream file(globals.output);
    if (!file)
        throw UsageError("cannot write " + globals.output);
    file << text.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Chromatic polynomials at negative integers, quadratic differentials and LC circuits on graphs"};
    app.require_subcommand(1);
    Globals globals;
    app.add_flag("--pretty", globals.pretty, "Indented key/value listing instead of JSON");
    app.add_option("--tol", globals.tol, "Multiplier applied to every numerical tolerance")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", globals.threads, "Worker threads (1 gives identical results)")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("-o,--output", globals.output, "Write the result here instead of stdout");
    app.fallthrough();

    std::string input, conductances, values, q_source, sampler = "simplex", name;
    std::optional<long> at;
    std::optional<int> k_opt;
    std::optional<std::uint64_t> q_seed;
    std::vector<int> ks;
    int k = 2;
    std::size_t samples = 1'000'000, starts = 0;
    std::uint64_t seed = 1;
    double omega = 0.0, sigmas = 4.0;
    Json config;
    std::function<Outcome()> action;

    const char* graph_help = "Graph JSON file or fixture:<name>[:k]";

    auto* chromatic = app.add_subcommand("chromatic", "Chromatic polynomial by deletion-contraction");
    chromatic->add_option("graph", input, graph_help)->required();
    chromatic->add_option("--at", at, "Evaluate at this integer, e.g. --at=-2");
    chromatic->callback([&] {
        action = [&] { return run_chromatic(input, at); };
        config = {{"graph", input}};
        if (at)
            config["at"] = *at;
    });

    auto* predict = app.add_subcommand("predict", "Predicted number of realizations");
    predict->add_option("graph", input, graph_help)->required();
    predict->callback([&] {
        action = [&] { return run_predict(input); };
        config = {{"graph", input}};
    });

    auto* orient = app.add_subcommand("orient-count", "Count compatible orientations (of G_k with --k)");
    orient->add_option("graph", input, graph_help)->required();
    orient->add_option("--k", k_opt, "Augment with k+1 terminals first")->check(CLI::PositiveNumber);
    orient->add_option("--values", values, "Comma-separated terminal values");
    orient->callback([&] {
        action = [&] { return run_orient_count(input, k_opt, values, globals); };
        config = {{"graph", input}, {"values", values}};
        config["k"] = k_opt ? Json(*k_opt) : Json(nullptr);
    });

    auto* mc = app.add_subcommand("mc-chi", "Monte-Carlo estimate of |chi(-k)|");
    mc->add_option("graph", input, graph_help)->required();
    mc->add_option("--k", k, "k >= 1")->required()->check(CLI::PositiveNumber);
    mc->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "Random seed");
    mc->add_option("--values", values, "Comma-separated terminal values");
    mc->add_option("--sampler", sampler, "simplex (uniform conductances) or fiber")
        ->check(CLI::IsMember({"simplex", "fiber"}));
    mc->callback([&] {
        action = [&] { return run_mc_chi(input, k, samples, seed, values, sampler, globals); };
        config = {{"graph", input}, {"k", k}, {"samples", samples}, {"seed", seed}, {"values", values},
                  {"sampler", sampler}};
    });

    auto* dirichlet = app.add_subcommand("dirichlet", "Harmonic extension for given conductances");
    dirichlet->add_option("graph", input, graph_help)->required();
    dirichlet->add_option("--conductances", conductances, "JSON map edge id -> conductance")->required();
    dirichlet->callback([&] {
        action = [&] { return run_dirichlet(input, conductances); };
        config = {{"graph", input}, {"conductances", conductances}};
    });

    auto* hqd_check = app.add_subcommand("hqd-check", "Residuals of a (q, z) instance");
    hqd_check->add_option("instance", input, "Graph JSON with q and z")->required();
    hqd_check->callback([&] {
        action = [&] { return run_hqd_check(input, globals); };
        config = {{"instance", input}};
    });

    auto* hqd_solve = app.add_subcommand("hqd-solve", "Multi-start Newton search for realizations");
    hqd_solve->add_option("graph", input, graph_help)->required();
    hqd_solve->add_option("--q", q_source, "q JSON file or sample:<seed> (default: q in the graph file)");
    hqd_solve->add_option("--starts", starts, "Newton starts (default 200 per predicted solution)")
        ->check(CLI::PositiveNumber);
    hqd_solve->add_option("--seed", seed, "Random seed for the starts");
    hqd_solve->callback([&] {
        action = [&] { return run_hqd_solve(input, q_source, starts, seed, globals); };
        config = {{"graph", input}, {"q", q_source}, {"starts", starts}, {"seed", seed}};
    });

    auto* circuit = app.add_subcommand("circuit", "Phasor solution and power of an LC(R) netlist");
    circuit->add_option("netlist", input, "Graph JSON with L/C/R on every edge")->required();
    circuit->add_option("--omega", omega, "Angular frequency")->required()->check(CLI::PositiveNumber);
    circuit->callback([&] {
        action = [&] { return run_circuit(input, omega); };
        config = {{"netlist", input}, {"omega", omega}};
    });

    auto* resonance = app.add_subcommand("resonance", "Resonant frequencies of a pure LC netlist");
    resonance->add_option("netlist", input, "Graph JSON with L or C on every edge")->required();
    resonance->callback([&] {
        action = [&] { return run_resonance(input); };
        config = {{"netlist", input}};
    });

    auto* cross = app.add_subcommand("cross-check", "|chi(-k)| by exact, orientation and Monte-Carlo routes");
    cross->add_option("graph", input, graph_help)->required();
    cross->add_option("--k", ks, "One or more k (default 2)")->check(CLI::PositiveNumber);
    cross->add_option("--samples", samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
    cross->add_option("--seed", seed, "Random seed");
    cross->add_option("--sampler", sampler, "fiber (default) or simplex")
        ->check(CLI::IsMember({"simplex", "fiber"}));
    cross->add_option("--sigmas", sigmas, "Allowed deviation in standard errors")->check(CLI::PositiveNumber);
    cross->callback([&] {
        if (cross->count("--sampler") == 0)
            sampler = "fiber";
        action = [&] { return run_cross_check(input, ks, samples, seed, sampler, sigmas, globals); };
        config = {{"graph", input}, {"k", ks.empty() ? std::vector<int>{2} : ks}, {"samples", samples},
                  {"seed", seed}, {"sampler", sampler}};
    });

    auto* fixture = app.add_subcommand("fixture", "Emit a built-in graph");
    fixture->add_option("name", name, "point, k2, path3, triangle, star_k, star_<k> or fig332")->required();
    fixture->add_option("--k", k, "Boundary parameter for star_k")->check(CLI::PositiveNumber);
    fixture->add_option("--q-seed", q_seed, "Also emit a balanced q drawn with this seed");
    fixture->callback([&] {
        action = [&] { return run_fixture(name, k, q_seed); };
        config = {{"name", name}, {"k", k}};
        if (q_seed)
            config["q_seed"] = *q_seed;
    });

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? exit_ok : exit_usage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    auto fail = [&](int code, const std::string& kind, const std::string& what) {
        Json doc = {{"command", command}, {"error", {{"kind", kind}, {"message", what}}}};
        std::cerr << doc.dump() << '\n';
        return code;
    };
    try {
        Outcome outcome = action();
        config["command"] = command;
        config["tol"] = globals.tol;
        config["threads"] = globals.threads;
        Json doc = {{"config", config}};
        for (const auto& [key, value] : outcome.body.items())
            doc[key] = value;
        emit(doc, globals);
        return outcome.code;
    }
    catch (const UsageError& err) {
        return fail(exit_usage, "usage", err.what());
    }
    catch (const FormatError& err) {
        return fail(exit_usage, "input", err.what());
    }
    catch (const SingularSystemError& err) {
        return fail(exit_numerical, "singular", err.what());
    }
    catch (const CoincidentVerticesError& err) {
        return fail(exit_numerical, "coincident", err.what());
    }
    catch (const std::invalid_argument& err) {
        return fail(exit_usage, "invalid_argument", err.what());
    }
    catch (const std::length_error& err) {
        return fail(exit_usage, "too_large", err.what());
    }
    catch (const std::out_of_range& err) {
        return fail(exit_usage, "out_of_range", err.what());
    }
    catch (const std::exception& err) {
        return fail(exit_numerical, "numerical", err.what());
    }
}
