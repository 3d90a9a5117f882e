#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entropic/agreement.hpp"
#include "entropic/basisrisk.hpp"
#include "entropic/market.hpp"

namespace entropic {

struct SolverSettings {
    double tol = 1e-10;
    double newton_tol = 1e-12;
    double replication_tol = 1e-9;
};

/// One self-contained pricing problem: a tree, named claims, one or two
/// agents, and optional basis-risk inputs. All fields are immutable after
/// loading.
struct Scenario {
    MarketTree tree;
    std::vector<AgentProfile> agents;
    std::map<std::string, Claim> claims;
    SolverSettings solver;

    std::optional<BasisRiskModel> basis_model;
    std::map<std::string, PayoffFn> payoffs;
    std::vector<double> profile_gammas;

    const Claim& claim(const std::string& name) const;
};

/// Parses and fully validates a scenario document (JSON, UTF-8). Tree nodes
/// carry `id`, `parent`, `prob`, `prices`; claims are leaf-ordered arrays
/// (depth-first by id); agents reference claims by name.
Scenario load_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);

} // namespace entropic
