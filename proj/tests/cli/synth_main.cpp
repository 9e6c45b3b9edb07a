// Writes a small synthetic project for the CLI smoke test.
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyloc/io.hpp"

#include "synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic project generator"};
    std::string root;
    hyloc::synth::Options o;
    o.versions = 3;
    o.train_versions = 2;
    o.files = 4;
    o.methods_per_file = 6;
    o.planted_per_version = 6;
    o.random_per_version = 8;
    int trees = 10;
    app.add_option("root", root)->required();
    app.add_option("--seed", o.seed);
    app.add_option("--versions", o.versions);
    app.add_option("--train-versions", o.train_versions);
    app.add_option("--failing", o.failing_tests);
    app.add_option("--trees", trees);
    CLI11_PARSE(app, argc, argv);

    auto project = hyloc::synth::write_project(root, o);
    auto config = nlohmann::json::parse(hyloc::io::read_file(project.config_path));
    config["forest"]["trees"] = trees;
    hyloc::io::write_file(project.config_path, config.dump(2) + "\n");
    for (const auto& id : project.version_ids) std::cout << id << '\n';
    return 0;
}
