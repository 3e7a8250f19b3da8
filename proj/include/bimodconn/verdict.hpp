#pragma once

#include "json.hpp"

#include <string>

namespace bimodconn {

enum class Status { pass, fail, absent, unavailable };

std::string to_string(Status s);

/// Outcome of one identity check. A failure carries a witness that lets the
/// reader reproduce the violation by hand.
struct Verdict {
    Status status = Status::pass;
    std::string message;
    nlohmann::json witness;

    [[nodiscard]] bool passed() const { return status == Status::pass; }

    static Verdict pass(std::string message = {}) { return {Status::pass, std::move(message), nullptr}; }
    static Verdict fail(std::string message, nlohmann::json witness = nullptr) {
        return {Status::fail, std::move(message), std::move(witness)};
    }
};

}  // namespace bimodconn
