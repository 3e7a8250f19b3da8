#pragma once

// Model files: an algebra, one calculus, named modules, named connections and
// tensor requests, read from JSON with rationals written as strings.

#include "bimodconn/tensor.hpp"

#include <filesystem>
#include <map>

namespace bimodconn {

/// Schema violations and axiom failures. `path` points at the offending
/// field, e.g. "/connections/1/nabla/0/3".
class ModelError : public std::runtime_error {
public:
    ModelError(std::string path, const std::string& message, nlohmann::json witness = nullptr);

    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] const nlohmann::json& witness() const { return witness_; }

private:
    std::string path_;
    nlohmann::json witness_;
};

struct TensorRequest {
    std::string n_connection;
    std::string m_connection;
    Route route = Route::sigma;
};

struct ModelFile {
    std::string name;
    AlgebraPtr algebra;
    CalculusPtr calculus;
    std::vector<Generator> generators;
    std::vector<Module> modules;
    std::vector<Connection> connections;
    std::vector<TensorRequest> tensors;

    [[nodiscard]] const Connection& connection(const std::string& name) const;
};

struct ParseOptions {
    std::optional<std::size_t> truncation;  ///< overrides the file
};

ModelFile parse_model(const nlohmann::json& doc, const ParseOptions& options = {});
ModelFile parse_model(const std::filesystem::path& path, const ParseOptions& options = {});

/// The inverse of parse_model up to the connection encoding: nabla rows are
/// written as ambient representatives.
nlohmann::json to_json(const ModelFile& model);

}  // namespace bimodconn
