#include "chroma/io.hpp"

#include <fstream>
#include <sstream>

namespace chroma {

namespace {

    VertexIndex vertex_named(const Graph& g, const Json& name)
    {
        if (!name.is_string())
            throw FormatError("vertex references must be names");
        auto v = g.find_vertex(name.get<std::string>());
        if (!v)
            throw FormatError("unknown vertex '" + name.get<std::string>() + "'");
        return *v;
    }

    std::optional<double> element(const Json& e, const char* key)
    {
        if (!e.contains(key))
            return std::nullopt;
        if (!e[key].is_number())
            throw FormatError(std::string("element value '") + key + "' must be a number");
        const double x = e[key].get<double>();
        if (!(x > 0.0))
            throw FormatError(std::string("element value '") + key + "' must be positive");
        return x;
    }

    EdgeId edge_key(const std::string& key, const Graph& g)
    {
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(key, &used);
        }
        catch (const std::exception&) {
            throw FormatError("edge key '" + key + "' is not an integer id");
        }
        if (used != key.size() || !g.has_edge(EdgeId{id}))
            throw FormatError("unknown edge id '" + key + "'");
        return EdgeId{id};
    }

}  // namespace

VertexMap<double> GraphDocument::real_boundary_values() const
{
    VertexMap<double> out;
    for (const auto& [v, x] : boundary_values) {
        if (x.imag() != 0.0)
            throw FormatError("boundary value of '" + graph.name(v) + "' is complex where a real value is needed");
        out[v] = x.real();
    }
    return out;
}

Complex complex_from_json(const Json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw FormatError("expected a number or an [re, im] pair, got " + j.dump());
}

Json complex_to_json(Complex z)
{
    if (z.imag() == 0.0)
        return z.real();
    return Json::array({z.real(), z.imag()});
}

Json bigint_to_json(const BigInt& x) { return x.str(); }

GraphDocument parse_graph(const Json& j)
{
    if (!j.is_object())
        throw FormatError("graph document must be a JSON object");
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw FormatError("graph document needs a 'vertices' array");

    GraphDocument doc;
    Graph& g = doc.graph;
    const Json boundary = j.value("boundary", Json::object());
    std::vector<std::string> boundary_names;
    if (boundary.is_array()) {
        for (const auto& b : boundary)
            boundary_names.push_back(b.get<std::string>());
    }
    else if (boundary.is_object()) {
        for (const auto& [name, value] : boundary.items())
            boundary_names.push_back(name);
    }
    else {
        throw FormatError("'boundary' must be an object or an array of names");
    }

    for (const auto& v : j["vertices"]) {
        if (!v.is_string())
            throw FormatError("vertex names must be strings");
        const auto name = v.get<std::string>();
        if (g.find_vertex(name))
            throw FormatError("duplicate vertex '" + name + "'");
        g.add_vertex(name);
    }
    for (const auto& name : boundary_names) {
        const auto v = vertex_named(g, Json(name));
        g.set_boundary(v, true);
        if (boundary.is_object() && !boundary[name].is_null()) {
            doc.boundary_values[v] = complex_from_json(boundary[name]);
            if (boundary[name].is_array())
                doc.complex_boundary = true;
        }
    }

    for (const auto& e : j.value("edges", Json::array())) {
        if (!e.is_object() || !e.contains("u") || !e.contains("v"))
            throw FormatError("each edge needs 'u' and 'v'");
        const auto u = vertex_named(g, e["u"]);
        const auto v = vertex_named(g, e["v"]);
        EdgeId id;
        try {
            id = e.contains("id") ? g.add_edge(EdgeId{e["id"].get<int>()}, u, v) : g.add_edge(u, v);
        }
        catch (const nlohmann::json::exception&) {
            throw FormatError("edge id must be an integer");
        }
        catch (const std::invalid_argument& err) {
            throw FormatError(err.what());
        }
        ElementStack s{element(e, "L"), element(e, "C"), element(e, "R")};
        if (!s.empty())
            doc.netlist[id] = s;
        if (e.contains("q"))
            doc.q[id] = complex_from_json(e["q"]);
    }
    if (!doc.netlist.empty() && doc.netlist.size() != g.edge_count())
        throw FormatError("either every edge or no edge must carry circuit elements");

    if (j.contains("q")) {
        for (const auto& [id, value] : parse_edge_values(j["q"], g))
            doc.q[id] = value;
    }
    if (j.contains("z")) {
        if (!j["z"].is_object())
            throw FormatError("'z' must map vertex names to positions");
        for (const auto& [name, value] : j["z"].items()) {
            const auto v = vertex_named(g, Json(name));
            doc.z[v] = value.is_string() && value.get<std::string>() == "inf" ? infinity() : complex_from_json(value);
        }
    }
    return doc;
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path.string());
    try {
        return Json::parse(in);
    }
    catch (const nlohmann::json::parse_error& err) {
        throw FormatError(path.string() + ": " + err.what());
    }
}

GraphDocument read_graph_file(const std::filesystem::path& path) { return parse_graph(read_json_file(path)); }

EdgeMap<Complex> parse_edge_values(const Json& j, const Graph& g)
{
    if (j.is_object() && j.size() == 1 && (j.contains("q") || j.contains("conductances")))
        return parse_edge_values(j.begin().value(), g);
    if (!j.is_object())
        throw FormatError("edge values must be an object keyed by edge id");
    EdgeMap<Complex> out;
    for (const auto& [key, value] : j.items())
        out[edge_key(key, g)] = complex_from_json(value);
    return out;
}

Json graph_to_json(const Graph& g, const VertexMap<Complex>& boundary_values)
{
    Json j;
    j["vertices"] = Json::array();
    for (VertexIndex v = 0; v < g.vertex_count(); ++v)
        j["vertices"].push_back(g.name(v));
    j["boundary"] = Json::object();
    for (auto v : g.boundary_vertices()) {
        auto it = boundary_values.find(v);
        j["boundary"][g.name(v)] = it == boundary_values.end() ? Json(nullptr) : complex_to_json(it->second);
    }
    j["edges"] = Json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({{"id", e.id.value}, {"u", g.name(e.u)}, {"v", g.name(e.v)}});
    return j;
}

Json graph_to_json(const Graph& g, const VertexMap<double>& boundary_values)
{
    VertexMap<Complex> values;
    for (const auto& [v, x] : boundary_values)
        values[v] = x;
    return graph_to_json(g, values);
}

Json vertex_values_to_json(const Graph& g, const std::vector<Complex>& values)
{
    Json j = Json::object();
    for (VertexIndex v = 0; v < g.vertex_count() && v < values.size(); ++v)
        j[g.name(v)] = is_infinite(values[v]) ? Json("inf") : complex_to_json(values[v]);
    return j;
}

Json edge_values_to_json(const EdgeMap<Complex>& values)
{
    Json j = Json::object();
    for (const auto& [id, x] : values)
        j[std::to_string(id.value)] = complex_to_json(x);
    return j;
}

}  // namespace chroma
