// Writes the shipped model files from the fixture library.

#include "bimodconn/fixtures.hpp"
#include "bimodconn/model.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

using namespace bimodconn;

namespace {

// Like dump(1), but arrays of scalars stay on one line.
void print(std::ostream& out, const nlohmann::json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1), ' ');
    if (j.is_array() && std::none_of(j.begin(), j.end(), [](const auto& x) { return x.is_structured(); })) {
        out << j.dump();
    } else if (j.is_array()) {
        out << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out << inner;
            print(out, j[i], indent + 1);
            out << (i + 1 < j.size() ? ",\n" : "\n");
        }
        out << pad << ']';
    } else if (j.is_object()) {
        out << "{\n";
        std::size_t i = 0;
        for (const auto& [key, value] : j.items()) {
            out << inner << nlohmann::json(key).dump() << ": ";
            print(out, value, indent + 1);
            out << (++i < j.size() ? ",\n" : "\n");
        }
        out << pad << '}';
    } else {
        out << j.dump();
    }
}

void write(const std::filesystem::path& dir, const std::string& name, ModelFile model) {
    model.name = name;
    std::ofstream out(dir / (name + ".model"), std::ios::binary);
    print(out, to_json(model), 0);
    out << '\n';
    std::cout << "wrote " << (dir / (name + ".model")).string() << '\n';
}

ModelFile single(const Connection& c, std::vector<Generator> generators, std::vector<Module> extra = {}) {
    ModelFile m;
    m.algebra = c.calculus().algebra_ptr();
    m.calculus = c.forms().calculus_ptr();
    m.generators = std::move(generators);
    m.modules.push_back(c.module());
    for (auto& e : extra) m.modules.push_back(std::move(e));
    m.connections.push_back(c);
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "models";
    std::filesystem::create_directories(dir);

    const Vector e1e2{0, 1, 0, 0};
    const CalculusPtr quotient = fixtures::e1e2_quotient();
    const Connection qd = differential_connection(quotient);
    write(dir, "a2_quotient", single(Connection("d", qd.forms(), qd.nabla()), {{1, e1e2}}));

    const Connection twist = fixtures::twist_connection();
    write(dir, "twist", single(Connection("twist", twist.forms(), twist.nabla()), {{1, e1e2}}));

    const Connection grass = fixtures::grass_connection();
    ModelFile g = single(Connection("grass", grass.forms(), grass.nabla()), {});
    write(dir, "grass", g);
    return 0;
}
