#include "bimodconn/report.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace bimodconn;

int main(int argc, char** argv) {
    CLI::App app{"Connections on bimodules and the calculi they induce"};
    std::string command_text;
    std::string model_path;
    std::optional<std::size_t> truncation;
    std::optional<std::string> connection;
    std::string json_path;
    app.add_option("command", command_text, "check, induce, sigma, curvature, tensor, compare or all")->required();
    app.add_option("--model", model_path, "model file")->required();
    app.add_option("--truncation", truncation, "highest form degree D");
    app.add_option("--connection", connection, "restrict to one named connection");
    app.add_option("--json", json_path, "write the report as JSON ('-' for stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::optional<Command> command = parse_command(command_text);
    if (!command) {
        std::cerr << "unknown command '" << command_text << "'\n";
        return 2;
    }
    try {
        const ModelFile model = parse_model(std::filesystem::path(model_path), ParseOptions{truncation});
        if (connection) static_cast<void>(model.connection(*connection));
        const Report report = run(*command, model, connection);
        const std::string json_text = report.to_json().dump(2) + "\n";
        if (json_path == "-") {
            std::cout << json_text;
        } else {
            std::cout << report.to_text();
            if (!json_path.empty()) {
                std::ofstream out(json_path, std::ios::binary);
                if (!out) {
                    std::cerr << "cannot write " << json_path << '\n';
                    return 2;
                }
                out << json_text;
            }
        }
        return report.exit_code();
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        if (!e.witness().is_null()) std::cerr << e.witness().dump() << '\n';
        return 2;
    }
}
