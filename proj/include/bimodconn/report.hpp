#pragma once

// Command pipelines over a parsed model and the ordered check report they
// produce.

#include "bimodconn/model.hpp"

namespace bimodconn {

enum class Command { check, induce, sigma, curvature, tensor, compare, all };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& text);

struct Record {
    std::string check_id;
    std::string paper_anchor;
    Status status = Status::pass;
    nlohmann::json witness;  ///< null when there is nothing to show
    nlohmann::json dims;     ///< null when not applicable
};

struct Report {
    std::string model;
    std::string command;
    std::size_t truncation = 0;
    std::vector<Record> records;

    [[nodiscard]] std::size_t count(Status s) const;
    /// fail when any record fails; absent and unavailable records are not failures.
    [[nodiscard]] Status summary() const;
    [[nodiscard]] int exit_code() const { return summary() == Status::fail ? 1 : 0; }
    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string to_text() const;
};

/// Every anchor string a record may carry.
const std::vector<std::string>& known_anchors();

/// Runs `command` on every connection of the model, or only on `connection`
/// (and the tensor requests that mention it).
Report run(Command command, const ModelFile& model, const std::optional<std::string>& connection = std::nullopt);

}  // namespace bimodconn
