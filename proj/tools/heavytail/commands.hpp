#pragma once

#include "common.hpp"

#include "heavytail/severity.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace heavytail::cli {

struct Command {
    CLI::App* app = nullptr;
    std::function<void()> run;
};

void register_summary(CLI::App& root, std::vector<Command>& out);
void register_fit(CLI::App& root, std::vector<Command>& out);
void register_project(CLI::App& root, std::vector<Command>& out);
void register_simulate(CLI::App& root, std::vector<Command>& out);
void register_diagnose(CLI::App& root, std::vector<Command>& out);

// D2 endpoint from --nu0/--nu1, or converted from an M3 fit at --u-log.
struct EndpointFlags {
    std::optional<double> nu0;
    std::optional<double> nu1;
    double u_log = 15.5;
};

void add_endpoint_flags(CLI::App& app, EndpointFlags& e);
EndpointLine resolve_endpoint(const EndpointFlags& e, const BreachCatalog& catalog, const Common& c);

} // namespace heavytail::cli
