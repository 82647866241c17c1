#include "flow/json_io.hpp"

#include <fstream>

namespace flow {

void require_keys(const Json& o, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    if (!o.is_object()) throw InputError(where + ": expected a JSON object");
    for (const auto& [key, v] : o.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw InputError(where + ": unknown key '" + key + "'");
    }
}

namespace {

Nat nat_from_json(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned())
        throw InputError(where + ": expected a non-negative integer");
    return j.get<Nat>();
}

Nat nat_from_key(const std::string& key, const std::string& where) {
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
        throw InputError(where + ": malformed numeric key '" + key + "'");
    return std::stoull(key);
}

Nat count_from_json(const Json& j, const std::string& where) {
    Nat c = nat_from_json(j, where);
    if (c == 0) throw InputError(where + ": multiset counts must be positive");
    return c;
}

std::string cost_key(const Cost& c) {
    return c.inf ? "inf" : std::to_string(c.finite);
}

Cost cost_from_key(const std::string& key, const std::string& where) {
    if (key == "inf") return Cost::infinity();
    return Cost::of(nat_from_key(key, where));
}

} // namespace

Json value_to_json(const Value& v) {
    switch (v.kind) {
    case ValueKind::Nat:
        return v.nat;
    case ValueKind::NatVec:
        return v.vec;
    case ValueKind::MultisetNat: {
        Json o = Json::object();
        for (const auto& [e, c] : v.ms_nat) o[std::to_string(e)] = c;
        return o;
    }
    case ValueKind::MultisetCost: {
        Json o = Json::object();
        for (const auto& [e, c] : v.ms_cost) o[cost_key(e)] = c;
        return o;
    }
    case ValueKind::MultisetNodeSet: {
        Json arr = Json::array();
        for (const auto& [s, c] : v.ms_sets) {
            Json entry = Json::object();
            entry["set"] = s;
            entry["count"] = c;
            arr.push_back(std::move(entry));
        }
        return arr;
    }
    }
    throw InputError("value_to_json: unknown value kind");
}

Value value_from_json(const Domain& d, const Json& j, const std::string& where) {
    switch (d.value_kind()) {
    case ValueKind::Nat:
        return Value::of_nat(nat_from_json(j, where));
    case ValueKind::NatVec: {
        if (!j.is_array())
            throw InputError(where + ": expected an array of " + std::to_string(d.arity) +
                             " components");
        if (j.size() != static_cast<size_t>(d.arity))
            throw InputError(where + ": expected " + std::to_string(d.arity) +
                             " components, got " + std::to_string(j.size()));
        std::vector<Nat> v;
        for (const auto& c : j) v.push_back(nat_from_json(c, where));
        return Value::of_vec(std::move(v));
    }
    case ValueKind::MultisetNat: {
        if (!j.is_object()) throw InputError(where + ": expected an {element: count} object");
        Value v = d.zero();
        for (const auto& [key, c] : j.items())
            v.ms_nat[nat_from_key(key, where)] = count_from_json(c, where);
        return v;
    }
    case ValueKind::MultisetCost: {
        if (!j.is_object()) throw InputError(where + ": expected a {cost: count} object");
        Value v = d.zero();
        for (const auto& [key, c] : j.items())
            v.ms_cost[cost_from_key(key, where)] = count_from_json(c, where);
        return v;
    }
    case ValueKind::MultisetNodeSet: {
        if (!j.is_array()) throw InputError(where + ": expected an array of {set, count}");
        Value v = d.zero();
        for (const auto& entry : j) {
            require_keys(entry, {"set", "count"}, where);
            if (!entry.contains("set") || !entry.contains("count"))
                throw InputError(where + ": entry needs both 'set' and 'count'");
            if (!entry["set"].is_array()) throw InputError(where + ": 'set' must be an array");
            std::set<NodeId> s;
            for (const auto& n : entry["set"]) {
                if (!n.is_string()) throw InputError(where + ": set members must be node ids");
                if (!s.insert(n.get<NodeId>()).second)
                    throw InputError(where + ": duplicate node in set");
            }
            auto [it, fresh] = v.ms_sets.emplace(std::move(s), 0);
            if (!fresh) throw InputError(where + ": duplicate set entry");
            it->second = count_from_json(entry["count"], where);
        }
        return v;
    }
    }
    throw InputError(where + ": unknown value kind");
}

Json domain_to_json(const Domain& d) {
    Json o = Json::object();
    switch (d.kind) {
    case DomainKind::PathCount: o["kind"] = "path_count"; break;
    case DomainKind::Pip: o["kind"] = "pip"; break;
    case DomainKind::ShortestPath: o["kind"] = "shortest_path"; break;
    case DomainKind::InverseReach: o["kind"] = "inverse_reach"; break;
    case DomainKind::Product:
        o["kind"] = "product";
        o["arity"] = static_cast<Nat>(d.arity); // unsigned, as the strict decoder demands
        break;
    }
    return o;
}

Domain domain_from_json(const Json& j) {
    require_keys(j, {"kind", "arity"}, "domain");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw InputError("domain: missing 'kind'");
    std::string kind = j["kind"].get<std::string>();
    if (kind != "product" && j.contains("arity"))
        throw InputError("domain: 'arity' only applies to product");
    if (kind == "path_count") return Domain::path_count();
    if (kind == "pip") return Domain::pip();
    if (kind == "shortest_path") return Domain::shortest_path();
    if (kind == "inverse_reach") return Domain::inverse_reach();
    if (kind == "product") {
        if (!j.contains("arity")) throw InputError("domain: product needs 'arity'");
        Nat arity = nat_from_json(j["arity"], "domain arity");
        if (arity < 2 || arity > 8) throw InputError("domain: product arity must be 2..8");
        Domain d = make_product_domain(Domain::path_count(), Domain::path_count());
        for (Nat i = 2; i < arity; ++i) d = make_product_domain(d, Domain::path_count());
        return d;
    }
    throw InputError("domain: unknown kind '" + kind + "'");
}

Json edge_to_json(const EdgeFunction& e) {
    Json o = Json::object();
    switch (e.kind) {
    case EdgeKind::Zero: o["kind"] = "zero"; break;
    case EdgeKind::Identity: o["kind"] = "identity"; break;
    case EdgeKind::ScaleVec:
        o["kind"] = "scale";
        o["scale"] = e.coeffs;
        break;
    case EdgeKind::MaxWith:
        o["kind"] = "max_with";
        o["max_with"] = e.prio;
        break;
    case EdgeKind::AddMinWith:
        o["kind"] = "add_min_with";
        o["add_min_with"] = e.cost.inf ? Json("inf") : Json(e.cost.finite);
        break;
    case EdgeKind::PathFilter:
        o["kind"] = "path_filter";
        o["path_filter"] = e.node;
        break;
    }
    return o;
}

EdgeFunction edge_from_json(const Json& j) {
    require_keys(j, {"kind", "scale", "max_with", "add_min_with", "path_filter"}, "edge fn");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw InputError("edge fn: missing 'kind'");
    std::string kind = j["kind"].get<std::string>();
    auto only = [&](const char* param) {
        for (const char* k : {"scale", "max_with", "add_min_with", "path_filter"})
            if (j.contains(k) && kind != k && std::string(param) != k)
                throw InputError("edge fn: '" + std::string(k) + "' does not belong to kind '" +
                                 kind + "'");
    };
    if (kind == "zero") {
        only("");
        return EdgeFunction::zero();
    }
    if (kind == "identity") {
        only("");
        return EdgeFunction::identity();
    }
    if (kind == "scale") {
        only("scale");
        if (!j.contains("scale") || !j["scale"].is_array())
            throw InputError("edge fn: scale needs a coefficient array");
        std::vector<Nat> c;
        for (const auto& x : j["scale"]) c.push_back(nat_from_json(x, "edge fn scale"));
        if (c.empty()) throw InputError("edge fn: scale coefficients must be non-empty");
        return EdgeFunction::scale_vec(std::move(c));
    }
    if (kind == "max_with") {
        only("max_with");
        if (!j.contains("max_with")) throw InputError("edge fn: max_with needs a priority");
        return EdgeFunction::max_with(nat_from_json(j["max_with"], "edge fn max_with"));
    }
    if (kind == "add_min_with") {
        only("add_min_with");
        if (!j.contains("add_min_with")) throw InputError("edge fn: add_min_with needs a cost");
        const Json& c = j["add_min_with"];
        if (c.is_string() && c.get<std::string>() == "inf")
            return EdgeFunction::add_min_with(Cost::infinity());
        return EdgeFunction::add_min_with(Cost::of(nat_from_json(c, "edge fn add_min_with")));
    }
    if (kind == "path_filter") {
        only("path_filter");
        if (!j.contains("path_filter") || !j["path_filter"].is_string())
            throw InputError("edge fn: path_filter needs a node id");
        return EdgeFunction::path_filter(j["path_filter"].get<NodeId>());
    }
    throw InputError("edge fn: unknown kind '" + kind + "'");
}

Json assignment_to_json(const FlowAssignment& a) {
    Json o = Json::object();
    for (const auto& [n, v] : a) o[n] = value_to_json(v);
    return o;
}

namespace {

FlowAssignment assignment_from_json(const Domain& d, const std::set<NodeId>& nodes, const Json& j,
                                    const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected a {node: value} object");
    FlowAssignment a;
    for (const auto& [n, v] : j.items()) {
        if (!nodes.count(n)) throw InputError(where + ": unknown node '" + n + "'");
        a[n] = value_from_json(d, v, where + " at " + n);
    }
    for (const auto& n : nodes)
        if (!a.count(n)) a[n] = d.zero();
    return a;
}

} // namespace

Json graph_file_to_json(const GraphFile& f) {
    Json o = Json::object();
    o["domain"] = domain_to_json(f.graph.domain);
    o["nodes"] = f.graph.nodes;
    Json in = Json::object();
    for (const auto& [n, v] : f.inflow)
        if (!v.is_zero()) in[n] = value_to_json(v);
    o["inflow"] = std::move(in);
    Json edges = Json::array();
    for (const auto& [key, e] : f.graph.edges) {
        Json entry = Json::object();
        entry["from"] = key.first;
        entry["to"] = key.second;
        entry["fn"] = edge_to_json(e);
        edges.push_back(std::move(entry));
    }
    o["edges"] = std::move(edges);
    if (f.flow) o["flow"] = assignment_to_json(*f.flow);
    return o;
}

GraphFile graph_file_from_json(const Json& j) {
    require_keys(j, {"domain", "nodes", "inflow", "edges", "flow"}, "graph file");
    for (const char* k : {"domain", "nodes", "inflow", "edges"})
        if (!j.contains(k))
            throw InputError("graph file: missing '" + std::string(k) + "'");
    GraphFile f;
    f.graph.domain = domain_from_json(j["domain"]);
    if (!j["nodes"].is_array()) throw InputError("graph file: 'nodes' must be an array");
    for (const auto& n : j["nodes"]) {
        if (!n.is_string()) throw InputError("graph file: node ids must be strings");
        NodeId id = n.get<NodeId>();
        if (f.graph.nodes.count(id)) throw InputError("graph file: duplicate node '" + id + "'");
        f.graph.add_node(id);
    }
    if (!j["edges"].is_array()) throw InputError("graph file: 'edges' must be an array");
    for (const auto& entry : j["edges"]) {
        require_keys(entry, {"from", "to", "fn"}, "graph file edge");
        for (const char* k : {"from", "to", "fn"})
            if (!entry.contains(k))
                throw InputError("graph file edge: missing '" + std::string(k) + "'");
        if (!entry["from"].is_string() || !entry["to"].is_string())
            throw InputError("graph file edge: 'from' and 'to' must be node ids");
        NodeId from = entry["from"].get<NodeId>();
        NodeId to = entry["to"].get<NodeId>();
        if (!f.graph.nodes.count(from))
            throw InputError("graph file edge: source '" + from + "' is not a node");
        EdgeFunction e = edge_from_json(entry["fn"]);
        if (!e.is_zero() && !edge_admitted(f.graph.domain, e))
            throw InputError("graph file edge: " + edge_kind_name(e.kind) +
                             " is not admitted by domain " + f.graph.domain.name());
        if (!f.graph.edge(from, to).is_zero())
            throw InputError("graph file edge: duplicate edge " + from + " -> " + to);
        f.graph.set_edge(from, to, e);
    }
    f.inflow = assignment_from_json(f.graph.domain, f.graph.nodes, j["inflow"], "graph inflow");
    if (j.contains("flow"))
        f.flow = assignment_from_json(f.graph.domain, f.graph.nodes, j["flow"], "graph flow");
    return f;
}

Json interface_to_json(const Interface& i) {
    Json o = Json::object();
    o["flow_domain"] = domain_to_json(i.domain);
    o["domain"] = i.dom;
    Json in = Json::object();
    for (const auto& [n, v] : i.in)
        if (!v.is_zero()) in[n] = value_to_json(v);
    o["in"] = std::move(in);
    Json out = Json::object();
    for (const auto& [n, v] : i.out) out[n] = value_to_json(v);
    o["out"] = std::move(out);
    return o;
}

Interface interface_from_json(const Json& j) {
    require_keys(j, {"domain", "in", "out", "flow_domain"}, "interface file");
    for (const char* k : {"domain", "in", "out"})
        if (!j.contains(k))
            throw InputError("interface file: missing '" + std::string(k) + "'");
    Interface i;
    i.domain = j.contains("flow_domain") ? domain_from_json(j["flow_domain"])
                                         : Domain::path_count();
    if (!j["domain"].is_array()) throw InputError("interface file: 'domain' must be a node array");
    for (const auto& n : j["domain"]) {
        if (!n.is_string()) throw InputError("interface file: node ids must be strings");
        if (!i.dom.insert(n.get<NodeId>()).second)
            throw InputError("interface file: duplicate node in domain");
    }
    i.in = assignment_from_json(i.domain, i.dom, j["in"], "interface in");
    if (!j["out"].is_object()) throw InputError("interface file: 'out' must be an object");
    for (const auto& [n, v] : j["out"].items()) {
        if (i.dom.count(n))
            throw InputError("interface file: out entry '" + n + "' lies inside the domain");
        Value val = value_from_json(i.domain, v, "interface out at " + n);
        if (val.is_zero())
            throw InputError("interface file: out entry '" + n + "' must be nonzero");
        i.out[n] = std::move(val);
    }
    return i;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw InputError("parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << dump_json(j);
}

std::string dump_json(const Json& j) {
    return j.dump(2) + "\n";
}

} // namespace flow
