#include "bimodconn/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace bimodconn {

using nlohmann::json;

ModelError::ModelError(std::string path, const std::string& message, json witness)
    : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + message),
      path_(std::move(path)),
      witness_(std::move(witness)) {}

const Connection& ModelFile::connection(const std::string& name) const {
    for (const auto& c : connections) {
        if (c.name() == name) return c;
    }
    throw ModelError("/connections", "no connection named '" + name + "'");
}

namespace {

// A cursor into the document that remembers how it got there.
struct Node {
    const json& value;
    std::string path;

    [[nodiscard]] Node operator[](const std::string& key) const {
        if (!value.is_object()) throw ModelError(path, "expected an object");
        const auto it = value.find(key);
        if (it == value.end()) throw ModelError(path + "/" + key, "missing field");
        return {*it, path + "/" + key};
    }
    [[nodiscard]] Node operator[](std::size_t i) const { return {value.at(i), path + "/" + std::to_string(i)}; }
    [[nodiscard]] bool has(const std::string& key) const { return value.is_object() && value.contains(key); }

    [[nodiscard]] std::size_t size() const {
        if (!value.is_array()) throw ModelError(path, "expected an array");
        return value.size();
    }
    void expect_size(std::size_t n) const {
        if (size() != n) {
            throw ModelError(path, "expected " + std::to_string(n) + " entries, found " + std::to_string(size()));
        }
    }

    [[nodiscard]] std::string string() const {
        if (!value.is_string()) throw ModelError(path, "expected a string");
        return value.get<std::string>();
    }
    [[nodiscard]] std::size_t natural() const {
        if (!value.is_number_integer() || value.get<long long>() < 0) {
            throw ModelError(path, "expected a non-negative integer");
        }
        return value.get<std::size_t>();
    }
    [[nodiscard]] Rational rational() const {
        if (!value.is_string()) throw ModelError(path, "rationals are written as strings, e.g. \"-3/4\"");
        try {
            return parse_rational(value.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ModelError(path, std::string("bad rational: ") + e.what());
        }
    }
    [[nodiscard]] Vector vector(std::size_t n) const {
        expect_size(n);
        Vector out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back((*this)[i].rational());
        return out;
    }
    [[nodiscard]] Matrix matrix(std::size_t rows, std::size_t cols) const {
        expect_size(rows);
        std::vector<Vector> r;
        for (std::size_t i = 0; i < rows; ++i) r.push_back((*this)[i].vector(cols));
        return Matrix::from_rows(cols, r);
    }
    [[nodiscard]] std::vector<Matrix> matrices(std::size_t count, std::size_t dim) const {
        expect_size(count);
        std::vector<Matrix> out;
        for (std::size_t i = 0; i < count; ++i) out.push_back((*this)[i].matrix(dim, dim));
        return out;
    }
};

void require(const Verdict& v, const std::string& path, const std::string& what) {
    if (v.status == Status::fail) throw ModelError(path, what + ": " + v.message, v.witness);
}

AlgebraPtr parse_algebra(const Node& node) {
    const Node basis = node["basis"];
    std::vector<std::string> names;
    for (std::size_t i = 0; i < basis.size(); ++i) names.push_back(basis[i].string());
    const std::size_t n = names.size();
    if (n == 0) throw ModelError(basis.path, "the algebra needs at least one basis element");
    if (std::set<std::string>(names.begin(), names.end()).size() != n) {
        throw ModelError(basis.path, "basis names must be distinct");
    }
    const Node structure = node["structure"];
    structure.expect_size(n);
    std::vector<std::vector<Vector>> table(n);
    for (std::size_t i = 0; i < n; ++i) {
        structure[i].expect_size(n);
        for (std::size_t j = 0; j < n; ++j) table[i].push_back(structure[i][j].vector(n));
    }
    const Vector unit = node["unit"].vector(n);
    if (std::all_of(unit.begin(), unit.end(), [](const Rational& q) { return sgn(q) == 0; })) {
        throw ModelError(node.path + "/unit", "the unit is zero");
    }
    const std::string name = node.has("name") ? node["name"].string() : "A";
    auto algebra = std::make_shared<const Algebra>(name, std::move(names), std::move(table), unit);
    require(check_algebra(*algebra), node.path, "algebra axioms");
    return algebra;
}

std::vector<Generator> parse_generators(const Node& node, std::size_t n) {
    std::vector<Generator> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const Node g = node[i];
        const std::size_t degree = g["degree"].natural();
        if (degree == 0) throw ModelError(g.path + "/degree", "ideal generators have degree at least 1");
        out.push_back({degree, g["tensor"].vector(power(n, degree + 1))});
    }
    return out;
}

Module parse_module(const Node& node, const AlgebraPtr& algebra) {
    const std::string name = node["name"].string();
    const std::string kind = node["kind"].string();
    const std::size_t n = algebra->dim();
    Module m;
    if (kind == "regular") {
        m = Module::regular(algebra);
    } else if (kind == "free") {
        const std::size_t rank = node["rank"].natural();
        if (rank == 0) throw ModelError(node.path + "/rank", "rank must be positive");
        m = Module::free(algebra, rank);
    } else if (kind == "bimodule" || kind == "right") {
        const std::size_t dim = node["dim"].natural();
        std::vector<Matrix> right = node["right"].matrices(n, dim);
        if (kind == "bimodule") {
            m = Module::bimodule(name, algebra, dim, node["left"].matrices(n, dim), std::move(right));
        } else {
            m = Module::right_module(name, algebra, dim, std::move(right));
        }
        if (node.has("basis")) {
            const Node b = node["basis"];
            b.expect_size(dim);
            std::vector<std::string> names;
            for (std::size_t i = 0; i < dim; ++i) names.push_back(b[i].string());
            m = m.with_basis_names(std::move(names));
        }
    } else {
        throw ModelError(node.path + "/kind", "unknown module kind '" + kind + "'");
    }
    m = m.renamed(name);
    require(check_module(m), node.path, "module axioms");
    return m;
}

Connection parse_connection(const Node& node, const std::vector<Module>& modules, const CalculusPtr& calculus) {
    const std::string name = node["name"].string();
    const Node module_ref = node["module"];
    const std::string module_name = module_ref.string();
    const auto it = std::find_if(modules.begin(), modules.end(),
                                 [&](const Module& m) { return m.name() == module_name; });
    if (it == modules.end()) throw ModelError(module_ref.path, "no module named '" + module_name + "'");
    FormSpace forms(*it, calculus);

    Matrix nabla;
    if (node.has("preset") == node.has("nabla")) {
        throw ModelError(node.path, "give exactly one of 'preset' and 'nabla'");
    }
    if (node.has("preset")) {
        const Node preset = node["preset"];
        const std::string kind = preset.string();
        if (kind == "differential" || kind == "trivial") {
            const std::size_t n = calculus->algebra().dim();
            if (it->dim() % n != 0) {
                throw ModelError(preset.path, "'" + kind + "' needs a free module");
            }
            nabla = trivial_connection_matrix(forms, it->dim() / n);
        } else if (kind == "particular") {
            const ConnectionSpace space = connection_space(forms);
            if (!space.particular) throw ModelError(preset.path, "module '" + module_name + "' has no connection");
            nabla = *space.particular;
        } else {
            throw ModelError(preset.path, "unknown preset '" + kind + "'");
        }
    } else {
        // row b holds the coefficients of b_m . d e_a at index m * n + a
        const Node rows = node["nabla"];
        rows.expect_size(it->dim());
        nabla = Matrix(forms.dim(1), it->dim());
        for (std::size_t b = 0; b < it->dim(); ++b) {
            nabla.set_column(b, forms.project(rows[b].vector(forms.ambient_dim(1)), 1));
        }
    }
    Connection c(name, std::move(forms), std::move(nabla));
    require(check_right_leibniz(c), node.path, "connection '" + name + "'");
    return c;
}

Route parse_route(const Node& node) {
    const std::string r = node.string();
    for (Route route : {Route::induced, Route::nu_hat, Route::sigma}) {
        if (to_string(route) == r) return route;
    }
    throw ModelError(node.path, "unknown route '" + r + "'");
}

}  // namespace

ModelFile parse_model(const json& doc, const ParseOptions& options) {
    const Node root{doc, ""};
    if (!doc.is_object()) throw ModelError("", "expected an object");
    if (root["schema"].natural() != 1) throw ModelError("/schema", "unsupported schema version");

    ModelFile model;
    model.name = root.has("name") ? root["name"].string() : "model";
    model.algebra = parse_algebra(root["algebra"]);

    const Node calc = root["calculus"];
    std::size_t truncation = calc.has("truncation") ? calc["truncation"].natural() : default_truncation;
    if (options.truncation) truncation = *options.truncation;
    if (truncation == 0) throw ModelError(calc.path + "/truncation", "truncation must be at least 1");
    const CalculusPtr universal = universal_graded(model.algebra, truncation);
    if (calc.has("generators")) model.generators = parse_generators(calc["generators"], model.algebra->dim());
    const std::vector<Generator>& generators = model.generators;
    const std::string calc_name = calc.has("name") ? calc["name"].string() : "calculus";
    try {
        model.calculus = generators.empty() ? universal : quotient_calculus(*universal, generators, calc_name);
    } catch (const PreconditionError& e) {
        throw ModelError(calc.path + "/generators", e.what());
    }
    require(check_graded_calculus(*model.calculus), calc.path, "calculus");

    const Node modules = root["modules"];
    std::set<std::string> seen;
    for (std::size_t i = 0; i < modules.size(); ++i) {
        model.modules.push_back(parse_module(modules[i], model.algebra));
        if (!seen.insert(model.modules.back().name()).second) {
            throw ModelError(modules[i].path + "/name", "duplicate module name");
        }
    }

    const Node connections = root["connections"];
    seen.clear();
    for (std::size_t i = 0; i < connections.size(); ++i) {
        model.connections.push_back(parse_connection(connections[i], model.modules, model.calculus));
        if (!seen.insert(model.connections.back().name()).second) {
            throw ModelError(connections[i].path + "/name", "duplicate connection name");
        }
    }

    if (root.has("tensor")) {
        const Node tensors = root["tensor"];
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            const Node t = tensors[i];
            TensorRequest req{t["n"].string(), t["m"].string(), t.has("route") ? parse_route(t["route"]) : Route::sigma};
            for (const auto& [key, ref] : {std::pair{"n", req.n_connection}, std::pair{"m", req.m_connection}}) {
                if (!seen.contains(ref)) throw ModelError(t.path + "/" + key, "no connection named '" + ref + "'");
            }
            if (!model.connection(req.m_connection).module().has_left()) {
                throw ModelError(t.path + "/m", "the second factor must be a bimodule");
            }
            model.tensors.push_back(std::move(req));
        }
    }
    return model;
}

ModelFile parse_model(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw ModelError("", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_model(doc, options);
}

json to_json(const ModelFile& model) {
    const Algebra& a = *model.algebra;
    json structure = json::array();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(to_json(a.product(i, j)));
        structure.push_back(std::move(row));
    }
    json generators = json::array();
    for (const auto& g : model.generators) generators.push_back({{"degree", g.degree}, {"tensor", to_json(g.tensor)}});
    json modules = json::array();
    for (const auto& m : model.modules) {
        json mats_right = json::array();
        json mats_left = json::array();
        for (const auto& r : m.right_matrices()) mats_right.push_back(to_json(r));
        if (m.has_left()) {
            for (const auto& l : m.left_matrices()) mats_left.push_back(to_json(l));
        }
        json names = json::array();
        for (std::size_t i = 0; i < m.dim(); ++i) names.push_back(m.basis_name(i));
        json entry{{"name", m.name()}, {"kind", m.has_left() ? "bimodule" : "right"}, {"dim", m.dim()},
                   {"basis", names}, {"right", mats_right}};
        if (m.has_left()) entry["left"] = mats_left;
        modules.push_back(std::move(entry));
    }
    json connections = json::array();
    for (const auto& c : model.connections) {
        json rows = json::array();
        for (std::size_t b = 0; b < c.module().dim(); ++b) {
            rows.push_back(to_json(c.forms().lift(c.nabla().column(b), 1)));
        }
        connections.push_back({{"name", c.name()}, {"module", c.module().name()}, {"nabla", rows}});
    }
    json tensors = json::array();
    for (const auto& t : model.tensors) {
        tensors.push_back({{"n", t.n_connection}, {"m", t.m_connection}, {"route", to_string(t.route)}});
    }
    json out{{"schema", 1},
             {"name", model.name},
             {"algebra", {{"name", a.name()}, {"basis", a.basis_names()}, {"unit", to_json(a.unit())},
                          {"structure", structure}}},
             {"calculus", {{"name", model.calculus->name()}, {"truncation", model.calculus->truncation()},
                           {"generators", generators}}},
             {"modules", modules},
             {"connections", connections}};
    if (!tensors.empty()) out["tensor"] = tensors;
    return out;
}

}  // namespace bimodconn
