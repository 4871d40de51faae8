#pragma once

#include "chroma/graph.hpp"
#include "chroma/hqd.hpp"
#include "chroma/lc_circuit.hpp"
#include "chroma/polynomial.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace chroma {

using Json = nlohmann::json;

/// Malformed input file or JSON document.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a graph file may carry. Edges can hold circuit elements
/// ("L", "C", "R") and a weight "q"; "z" maps vertex names to positions.
struct GraphDocument {
    Graph graph;
    /// Boundary vertices that were given a value.
    VertexMap<Complex> boundary_values;
    /// Some boundary value had a nonzero imaginary part or was written as [re, im].
    bool complex_boundary = false;
    Netlist netlist;
    EdgeMap<Complex> q;
    VertexMap<Complex> z;

    VertexMap<double> real_boundary_values() const;
};

GraphDocument parse_graph(const Json& j);
GraphDocument read_graph_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

/// Numbers or [re, im] pairs.
Complex complex_from_json(const Json& j);
/// A plain number when the imaginary part is zero, else [re, im].
Json complex_to_json(Complex z);
Json bigint_to_json(const BigInt& x);

/// Edge values keyed by edge id, e.g. {"0": 1.5}; "q" or "conductances"
/// wrappers are unwrapped.
EdgeMap<Complex> parse_edge_values(const Json& j, const Graph& g);

Json graph_to_json(const Graph& g, const VertexMap<double>& boundary_values = {});
Json graph_to_json(const Graph& g, const VertexMap<Complex>& boundary_values);
/// Vertex name -> value.
Json vertex_values_to_json(const Graph& g, const std::vector<Complex>& values);
Json edge_values_to_json(const EdgeMap<Complex>& values);

}  // namespace chroma
