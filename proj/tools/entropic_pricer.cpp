#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "entropic/agreement.hpp"
#include "entropic/asymptotics.hpp"
#include "entropic/basisrisk.hpp"
#include "entropic/equilibrium.hpp"
#include "entropic/hedging.hpp"
#include "entropic/market.hpp"
#include "entropic/measures.hpp"
#include "entropic/pricing.hpp"
#include "entropic/report.hpp"
#include "entropic/scenario.hpp"

namespace {

using entropic::Claim;
using json = nlohmann::json;

struct Options {
    std::string scenario_path;
    std::string format = "json";
    std::string output;
    std::vector<std::string> claims;
    int agent = 0;
    int jobs = 1;
    unsigned seed = 0;
    double tol = 1e-10;
    std::vector<double> gamma_grid;
    std::vector<double> eps_grid{0.1, 0.05, 0.025, 0.0125};
};

bool log_enabled() {
    const char* v = std::getenv("ENTROPIC_PRICER_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

std::vector<std::string> selected_claims(const entropic::Scenario& sc, const Options& opt) {
    if (!opt.claims.empty()) {
        for (const auto& name : opt.claims) sc.claim(name); // validate
        return opt.claims;
    }
    std::vector<std::string> names;
    for (const auto& [name, c] : sc.claims) names.push_back(name);
    if (names.empty()) entropic::raise(entropic::Errc::SchemaViolation, "scenario has no claims");
    return names;
}

const entropic::AgentProfile& agent_at(const entropic::Scenario& sc, int i) {
    if (i < 0 || static_cast<size_t>(i) >= sc.agents.size())
        entropic::raise(entropic::Errc::SchemaViolation,
                        "agent index " + std::to_string(i) + " out of range");
    return sc.agents[static_cast<size_t>(i)];
}

const entropic::AgentProfile& require_two_agents(const entropic::Scenario& sc, int i) {
    if (sc.agents.size() < 2)
        entropic::raise(entropic::Errc::SchemaViolation, "command needs two agents");
    return sc.agents[static_cast<size_t>(i)];
}

json json_vector(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json json_matrix_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(json_vector(m.row(i)));
    return rows;
}

json json_claim(const Claim& c) {
    return json(c.values);
}

json run_price(const entropic::Scenario& sc, const Options& opt) {
    const auto& agent = agent_at(sc, opt.agent);
    const auto names = selected_claims(sc, opt);

    std::vector<json> quotes(names.size());
    json measures = json::object();
    std::mutex measures_mutex;

    auto price_one = [&](size_t i) {
        const std::string& name = names[i];
        const auto quote = entropic::writer_price(sc.tree, agent.gamma, agent.endowment,
                                                  sc.claim(name));
        const std::string measure_id = "dual:" + name;
        json q{{"claim", name},
               {"endowment", agent.endowment_name},
               {"gamma", quote.gamma},
               {"writer", quote.writer},
               {"buyer", quote.buyer},
               {"bounds", json::array({quote.bounds.first, quote.bounds.second})},
               {"dual_measure_id", measure_id}};
        quotes[i] = std::move(q);
        std::lock_guard<std::mutex> lock(measures_mutex);
        measures[measure_id] = json(quote.dual_measure.leaf_probs);
    };

    if (opt.jobs > 1 && names.size() > 1) {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        const int workers = std::min<int>(opt.jobs, static_cast<int>(names.size()));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < names.size(); i = next.fetch_add(1))
                    price_one(i);
            });
        for (auto& t : pool) t.join();
    } else {
        for (size_t i = 0; i < names.size(); ++i) price_one(i);
    }

    return json{{"quotes", quotes}, {"dual_measures", measures}};
}

json run_agree(const entropic::Scenario& sc, const Options& opt) {
    const auto& a1 = require_two_agents(sc, 0);
    const auto& a2 = require_two_agents(sc, 1);
    json out = json::array();
    for (const auto& name : selected_claims(sc, opt)) {
        const auto r = entropic::agreement_interval(sc.tree, a1, a2, sc.claim(name));
        json jr{{"claim", name},         {"writer", r.writer},
                {"buyer", r.buyer},      {"strict", r.strict},
                {"sigma", r.sigma},      {"bstar_replicable", r.bstar_replicable}};
        jr["interval"] = r.interval ? json::array({r.interval->first, r.interval->second})
                                    : json();
        out.push_back(std::move(jr));
    }
    return json{{"agreements", out}};
}

json run_equilibrium(const entropic::Scenario& sc, const Options& opt) {
    const auto& a1 = require_two_agents(sc, 0);
    const auto& a2 = require_two_agents(sc, 1);
    std::vector<Claim> claims;
    for (const auto& name : selected_claims(sc, opt)) claims.push_back(sc.claim(name));
    const auto r = entropic::solve_pepq(sc.tree, a1, a2, claims, opt.tol);
    const bool ok = entropic::verify_clearing(r, sc.tree, a1, a2, claims, opt.tol);
    return json{{"a_hat", json_vector(r.quantity)},
                {"p_hat", json_vector(r.price)},
                {"grad_norm", r.grad_norm},
                {"iters", r.iterations},
                {"clearing_ok", ok}};
}

json run_expand(const entropic::Scenario& sc, const Options& opt) {
    const auto& agent = agent_at(sc, opt.agent);
    std::vector<Claim> claims;
    for (const auto& name : selected_claims(sc, opt)) claims.push_back(sc.claim(name));
    const Eigen::VectorXd a =
        Eigen::VectorXd::Ones(static_cast<Eigen::Index>(claims.size()));
    const auto expansion =
        entropic::price_expansion(sc.tree, agent.gamma, agent.endowment, claims,
                                  Eigen::VectorXd::Zero(a.size()));
    json table = json::array();
    for (double eps : opt.eps_grid) {
        Claim bundle = Claim::zeros(sc.tree.num_leaves());
        for (size_t i = 0; i < claims.size(); ++i)
            bundle = bundle + a(static_cast<Eigen::Index>(i)) * claims[i];
        const double exact = entropic::writer_price_value(sc.tree, agent.gamma,
                                                          agent.endowment, eps * bundle);
        const double approx = expansion.value_at(a, eps);
        table.push_back(json{{"eps", eps},
                             {"exact", exact},
                             {"approx", approx},
                             {"error", std::abs(exact - approx)}});
    }
    return json{{"a", json_vector(a)},
                {"grad", json_vector(expansion.gradient)},
                {"hessian", json_matrix_rows(expansion.hessian)},
                {"eps_table", table}};
}

json run_hedge(const entropic::Scenario& sc, const Options& opt) {
    const auto& agent = agent_at(sc, opt.agent);
    const auto names = selected_claims(sc, opt);
    json out = json::array();
    std::vector<Claim> claims;
    for (const auto& name : names) {
        claims.push_back(sc.claim(name));
        const auto d = entropic::residual_risk(sc.tree, agent.gamma, agent.endowment,
                                               sc.claim(name), entropic::Side::Writer);
        json positions = json::object();
        for (const auto& n : sc.tree.nodes())
            if (!n.children.empty())
                positions[std::to_string(n.id)] =
                    json_vector(d.strategy.positions[static_cast<size_t>(n.id)]);
        out.push_back(json{{"claim", name},
                           {"price", d.price},
                           {"strategy", positions},
                           {"residual", json_claim(d.residual)},
                           {"residual_process", json(d.residual_process)},
                           {"residual_sup", d.residual.sup_norm()}});
    }
    const auto q0 =
        entropic::minimal_entropy_measure(sc.tree, Claim::zeros(sc.tree.num_leaves()));
    const auto proj = entropic::projected_variance(sc.tree, q0.measure, claims);
    return json{{"decompositions", out},
                {"projected_variance", json_matrix_rows(proj.matrix)},
                {"claim_order", names}};
}

json run_basisrisk(const entropic::Scenario& sc, const Options& opt) {
    if (!sc.basis_model)
        entropic::raise(entropic::Errc::SchemaViolation, "scenario has no 'basisrisk' block");
    const auto& model = *sc.basis_model;
    const auto [mean, variance] = entropic::q0_law(model);
    json out{{"q0_law", json{{"mean", mean}, {"variance", variance}}}};

    json prices = json::object();
    for (const auto& [name, payoff] : sc.payoffs) {
        json per_gamma = json::array();
        std::vector<double> gammas;
        for (const auto& a : sc.agents) gammas.push_back(a.gamma);
        if (gammas.empty()) gammas.push_back(1.0);
        for (double g : gammas) {
            // payoffs that defeat the quadrature gate are reported, not fatal
            try {
                per_gamma.push_back(json{
                    {"gamma", g},
                    {"writer", entropic::closed_form_price(model, g, payoff)}});
            } catch (const entropic::Error& e) {
                per_gamma.push_back(
                    json{{"gamma", g}, {"error", entropic::errc_name(e.code())}});
            }
        }
        prices[name] = per_gamma;
    }
    out["prices"] = prices;

    const std::vector<double>& grid =
        !opt.gamma_grid.empty() ? opt.gamma_grid : sc.profile_gammas;
    const auto x1 = sc.payoffs.find("x1");
    const auto x2 = sc.payoffs.find("x2");
    if (!grid.empty() && x1 != sc.payoffs.end() && x2 != sc.payoffs.end()) {
        const auto profile = entropic::gamma_profile(model, x1->second, x2->second, grid);
        json rows = json::array();
        for (const auto& [g, f] : profile.values)
            rows.push_back(json{{"gamma", g}, {"f", f}});
        out["profile"] = rows;
        out["f_zero"] = profile.f_zero;
        out["f_inf"] = profile.f_inf;
    }
    return out;
}

int run(const std::string& command, const Options& opt) {
    const auto started = std::chrono::steady_clock::now();

    std::ifstream in(opt.scenario_path);
    if (!in) {
        std::cerr << "error: cannot open '" << opt.scenario_path << "'\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string scenario_text = buf.str();

    json report;
    try {
        const entropic::Scenario sc = entropic::load_scenario(scenario_text);
        json result;
        if (command == "price")
            result = run_price(sc, opt);
        else if (command == "agree")
            result = run_agree(sc, opt);
        else if (command == "equilibrium")
            result = run_equilibrium(sc, opt);
        else if (command == "expand")
            result = run_expand(sc, opt);
        else if (command == "hedge")
            result = run_hedge(sc, opt);
        else if (command == "basisrisk")
            result = run_basisrisk(sc, opt);

        report = json{{"command", command},
                      {"scenario_digest", entropic::digest64(scenario_text)},
                      {"tolerances",
                       json{{"tol", opt.tol},
                            {"newton_tol", sc.solver.newton_tol},
                            {"replication_tol", sc.solver.replication_tol}}},
                      {"diagnostics", json{{"seed", opt.seed}, {"jobs", opt.jobs}}},
                      {"result", result}};
    } catch (const entropic::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return entropic::is_validation_error(e.code()) ? 2 : 3;
    }

    const std::string text = (opt.format == "csv") ? entropic::to_csv(report)
                                                   : entropic::dump_stable(report) + "\n";
    if (opt.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(opt.output, std::ios::binary);
        if (!os) {
            std::cerr << "error: cannot write '" << opt.output << "'\n";
            return 2;
        }
        os << text;
    }

    if (log_enabled()) {
        const auto elapsed = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        std::cerr << "entropic-pricer: " << command << " finished in " << elapsed << " ms\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-market engine for exponential-utility indifference pricing, "
                 "agreement intervals and partial equilibrium"};
    app.require_subcommand(1);

    Options opt;
    for (const char* name :
         {"price", "agree", "equilibrium", "expand", "hedge", "basisrisk"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("scenario", opt.scenario_path, "scenario file (JSON)")->required();
        sub->add_option("--format", opt.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", opt.output, "write the report to a file");
        sub->add_option("--claim", opt.claims, "restrict to named claims");
        sub->add_option("--agent", opt.agent, "agent index for single-agent commands");
        sub->add_option("--jobs", opt.jobs, "parallel workers for independent claims")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "seed echoed into diagnostics");
        sub->add_option("--tol", opt.tol, "solver exit tolerance");
        sub->add_option("--gamma-grid", opt.gamma_grid, "gamma grid for profiles");
        sub->add_option("--eps-grid", opt.eps_grid, "epsilon grid for expansions");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    return run(app.get_subcommands().front()->get_name(), opt);
}
