#pragma once

// JSON readers for test functions, boundary operators, vertex ensembles,
// bulk fields and modular data. Malformed documents raise SchemaError with a
// JSON pointer to the offending field.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcft/boundary.hpp"
#include "bcft/modular.hpp"
#include "bcft/testfn.hpp"
#include "bcft/vertex.hpp"

namespace bcft::io {

using json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string pointer, const std::string& what)
        : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(std::move(pointer))
    {
    }
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

inline std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
inline std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

inline void expect_object(const json& j, const std::string& ptr)
{
    if (!j.is_object()) throw SchemaError(ptr, "expected an object");
}

inline const json& require(const json& j, const std::string& key, const std::string& ptr)
{
    expect_object(j, ptr);
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(child(ptr, key), "missing required field");
    return *it;
}

inline double as_number(const json& j, const std::string& ptr)
{
    if (!j.is_number()) throw SchemaError(ptr, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw SchemaError(ptr, "expected a finite number");
    return x;
}

inline double number_field(const json& j, const std::string& key, const std::string& ptr)
{
    return as_number(require(j, key, ptr), child(ptr, key));
}

inline std::optional<double> optional_number(const json& j, const std::string& key, const std::string& ptr)
{
    expect_object(j, ptr);
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return as_number(*it, child(ptr, key));
}

inline double positive_field(const json& j, const std::string& key, const std::string& ptr)
{
    const double x = number_field(j, key, ptr);
    if (!(x > 0.0)) throw SchemaError(child(ptr, key), "must be positive");
    return x;
}

inline std::string string_field(const json& j, const std::string& key, const std::string& ptr)
{
    const auto& v = require(j, key, ptr);
    if (!v.is_string()) throw SchemaError(child(ptr, key), "expected a string");
    return v.get<std::string>();
}

inline const json& array_field(const json& j, const std::string& key, const std::string& ptr)
{
    const auto& v = require(j, key, ptr);
    if (!v.is_array()) throw SchemaError(child(ptr, key), "expected an array");
    return v;
}

inline PrimitiveKind kind_at(const json& j, const std::string& key, const std::string& ptr)
{
    const auto s = string_field(j, key, ptr);
    try {
        return parse_kind(s);
    } catch (const Error&) {
        throw SchemaError(child(ptr, key), "unknown kind '" + s + "'");
    }
}

/// {"primitives":[{"kind":"gaussian-step","q":1.0,"c":0.0,"w":0.5}, ...], "offset": 0}
inline SmearedFunction parse_test_function(const json& j, const std::string& ptr = "")
{
    const auto& prims = array_field(j, "primitives", ptr);
    std::vector<Primitive> out;
    for (std::size_t i = 0; i < prims.size(); ++i) {
        const auto p = child(child(ptr, "primitives"), i);
        out.push_back({kind_at(prims[i], "kind", p), number_field(prims[i], "q", p), number_field(prims[i], "c", p),
            positive_field(prims[i], "w", p)});
    }
    return SmearedFunction(std::move(out), optional_number(j, "offset", ptr).value_or(0.0));
}

inline json to_json(const SmearedFunction& f)
{
    json prims = json::array();
    for (const auto& p : f.placed())
        prims.push_back({{"kind", std::string(kind_name(p.kind))}, {"q", p.q}, {"c", p.c}, {"w", p.w}});
    return {{"primitives", prims}};
}

/// {"quad":[t1,t2,t3,t4],"q":1.0,"w":0.2,"kind":"bump-step"}, optional
/// "center_J" and "center_I".
inline BoundaryOperator parse_boundary_operator(const json& j, const std::string& ptr = "")
{
    const auto& quad = array_field(j, "quad", ptr);
    if (quad.size() != 4) throw SchemaError(child(ptr, "quad"), "expected four times");
    double t[4];
    for (std::size_t i = 0; i < 4; ++i) t[i] = as_number(quad[i], child(child(ptr, "quad"), i));
    if (!(t[0] < t[1] && t[1] < t[2] && t[2] < t[3])) throw SchemaError(child(ptr, "quad"), "times must be strictly increasing");
    const auto kind = kind_at(j, "kind", ptr);
    if (!is_step(kind)) throw SchemaError(child(ptr, "kind"), "boundary operators need a step kind");
    StepPlacement place{optional_number(j, "center_J", ptr), optional_number(j, "center_I", ptr)};
    return make_boundary_operator(IntervalQuad(t[0], t[1], t[2], t[3]), number_field(j, "q", ptr), positive_field(j, "w", ptr),
        kind, place);
}

/// {"entries":[{"q":1,"u":3.0}, ...],"epsilon":1e-8}
inline vertex::VertexEnsemble parse_vertex_ensemble(const json& j, const std::string& ptr = "",
    std::optional<double> epsilon_override = {})
{
    const auto& es = array_field(j, "entries", ptr);
    std::vector<vertex::VertexEntry> entries;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const auto p = child(child(ptr, "entries"), i);
        entries.push_back({number_field(es[i], "q", p), number_field(es[i], "u", p)});
    }
    auto eps = epsilon_override ? epsilon_override : optional_number(j, "epsilon", ptr);
    if (eps && !(*eps > 0.0)) throw SchemaError(child(ptr, "epsilon"), "must be positive");
    return vertex::VertexEnsemble(std::move(entries), eps);
}

/// {"q":..,"t":..,"x":..} or {"q":..,"u":..,"v":..}
inline vertex::BulkField parse_bulk_field(const json& j, const std::string& ptr = "")
{
    expect_object(j, ptr);
    const double q = number_field(j, "q", ptr);
    if (j.contains("u") || j.contains("v")) return vertex::from_lightrays(q, number_field(j, "u", ptr), number_field(j, "v", ptr));
    return {q, number_field(j, "t", ptr), number_field(j, "x", ptr)};
}

/// {"model":"su2k","k":1}
inline modular::RationalModel parse_model(const json& j, const std::string& ptr = "")
{
    const auto name = string_field(j, "model", ptr);
    if (name != "su2k") throw SchemaError(child(ptr, "model"), "unknown model '" + name + "'");
    const auto& k = require(j, "k", ptr);
    if (!k.is_number_integer()) throw SchemaError(child(ptr, "k"), "expected an integer level");
    const auto level = k.get<long long>();
    if (level < 1 || level > 16) throw SchemaError(child(ptr, "k"), "level must be in 1..16");
    return modular::su2k_model(static_cast<int>(level));
}

inline modular::ZMatrix parse_z(const json& j, const std::string& ptr)
{
    if (!j.is_array() || j.empty()) throw SchemaError(ptr, "expected a nonempty matrix");
    const std::size_t n = j.size();
    modular::ZMatrix z{modular::RealMatrix::Zero(static_cast<long>(n), static_cast<long>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        const auto pi = child(ptr, i);
        if (!j[i].is_array() || j[i].size() != n) throw SchemaError(pi, "expected a row of length " + std::to_string(n));
        for (std::size_t k = 0; k < n; ++k) z.entries(static_cast<long>(i), static_cast<long>(k)) = as_number(j[i][k], child(pi, k));
    }
    return z;
}

}  // namespace bcft::io
