#pragma once

#include "flow/interface.hpp"

#include <nlohmann/json.hpp>

namespace flow {

using Json = nlohmann::json;

/// Wire encodings. Decoding is strict: unknown keys, malformed numbers,
/// zero multiset counts, and values of the wrong shape are input errors.

/// InputError unless every key of o is in the allowed list.
void require_keys(const Json& o, std::initializer_list<const char*> allowed,
                  const std::string& where);

Json value_to_json(const Value& v);
Value value_from_json(const Domain& d, const Json& j, const std::string& where);

Json domain_to_json(const Domain& d);
Domain domain_from_json(const Json& j);

Json edge_to_json(const EdgeFunction& e);
EdgeFunction edge_from_json(const Json& j);

Json assignment_to_json(const FlowAssignment& a);

/// Graph file: {"domain", "nodes", "inflow", "edges", "flow"?}. Inflow and
/// flow entries default to zero per node; edge targets may dangle (outflow).
struct GraphFile {
    Graph graph;
    FlowAssignment inflow;
    std::optional<FlowAssignment> flow;
};

Json graph_file_to_json(const GraphFile& f);
GraphFile graph_file_from_json(const Json& j);

/// Interface file: {"domain": [nodes], "in", "out", "flow_domain"?}; the
/// value domain defaults to path_count when absent.
Json interface_to_json(const Interface& i);
Interface interface_from_json(const Json& j);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

/// Canonical text form: 2-space indent, sorted keys, trailing newline.
std::string dump_json(const Json& j);

} // namespace flow
