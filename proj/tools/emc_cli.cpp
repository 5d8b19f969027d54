#include "emc/cli_reports.hpp"
#include "emc/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char **argv) {
    CLI::App app{"Entangled Markov chain toolkit"};
    app.set_help_flag("-h,--help", "Show help");

    std::string command;
    app.add_option("command", command, "classify | density | correlate | cluster | groupwalk | selftest")
        ->required();
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; flags override it");

    const std::map<std::string, std::string> help{
        {"input", "transition matrix: CSV/JSON file or inline CSV (rows ';')"},
        {"group", "group spec JSON file or inline JSON"},
        {"phases", "\"random\", or phase JSON file / inline JSON"},
        {"alpha", "mixture weights, comma separated"},
        {"k", "density block length"},
        {"gap-max", "number of shift-correlation points"},
        {"out", "output directory"},
        {"seed", "random seed"},
        {"word", "correlate: sites separated by spaces (1, e:i:j, d:v0,v1,...)"},
        {"obs-a", "first observable for shift correlations"},
        {"obs-b", "second observable for shift correlations"},
        {"inject", "selftest fault injection: sqrt_cache | phase_modulus"},
    };
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    for (const auto &key : emc::setting_keys()) {
        const auto it = help.find(key);
        options[key] = app.add_option("--" + key, values[key],
                                      it != help.end() ? it->second : "tolerance override");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        std::map<std::string, std::string> flags, file;
        for (const auto &[key, opt] : options)
            if (opt->count() > 0)
                flags[key] = values[key];
        if (!config_path.empty())
            file = emc::read_config_file(config_path);
        const auto config = emc::RunConfig::resolve(emc::parse_command(command), file, flags);
        return emc::run(config, std::cout, std::cerr);
    } catch (const emc::ValidationError &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    }
}
