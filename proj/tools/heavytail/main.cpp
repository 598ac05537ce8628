// heavytail: command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 data, 3 estimation.

#include "commands.hpp"

#include "heavytail/error.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    using namespace heavytail;
    CLI::App app{"Heavy-tailed event catalogs: tail estimation, severity dynamics, rates and projections",
                 "heavytail"};
    app.set_version_flag("--version", "heavytail 0.1.0");
    app.require_subcommand(1);
    std::vector<cli::Command> commands;
    cli::register_summary(app, commands);
    cli::register_fit(app, commands);
    cli::register_project(app, commands);
    cli::register_simulate(app, commands);
    cli::register_diagnose(app, commands);

    try {
        app.parse(argc, argv);
        for (auto& c : commands)
            if (c.app->parsed())
                c.run();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
