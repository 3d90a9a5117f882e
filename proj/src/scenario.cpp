#include "entropic/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entropic {

using nlohmann::json;

const Claim& Scenario::claim(const std::string& name) const {
    const auto it = claims.find(name);
    if (it == claims.end()) raise(Errc::SchemaViolation, "unknown claim '" + name + "'");
    return it->second;
}

namespace {

json parse(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) raise(Errc::ParseError, "scenario is not valid JSON");
    if (!doc.is_object()) raise(Errc::SchemaViolation, "scenario root must be an object");
    return doc;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) raise(Errc::SchemaViolation, where + " must be a number");
    return j.get<double>();
}

std::vector<double> number_array(const json& j, const std::string& where) {
    if (!j.is_array()) raise(Errc::SchemaViolation, where + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(number(v, where + " entry"));
    return out;
}

MarketTree load_tree(const json& doc) {
    if (!doc.contains("tree")) raise(Errc::SchemaViolation, "missing 'tree'");
    const json& jt = doc.at("tree");
    if (!jt.is_array() || jt.empty())
        raise(Errc::SchemaViolation, "'tree' must be a nonempty node array");
    std::vector<TreeNodeSpec> specs;
    specs.reserve(jt.size());
    for (const auto& jn : jt) {
        if (!jn.is_object()) raise(Errc::SchemaViolation, "tree node must be an object");
        TreeNodeSpec s;
        if (!jn.contains("id") || !jn.at("id").is_number_integer())
            raise(Errc::SchemaViolation, "tree node needs an integer 'id'");
        s.id = jn.at("id").get<int>();
        if (jn.contains("parent") && !jn.at("parent").is_null()) {
            if (!jn.at("parent").is_number_integer())
                raise(Errc::SchemaViolation, "'parent' must be an integer or null");
            s.parent = jn.at("parent").get<int>();
        }
        if (jn.contains("prob")) s.prob = number(jn.at("prob"), "'prob'");
        if (!jn.contains("prices"))
            raise(Errc::SchemaViolation, "tree node needs a 'prices' array");
        s.prices = number_array(jn.at("prices"), "'prices'");
        specs.push_back(std::move(s));
    }
    return MarketTree::build(specs);
}

PayoffFn load_payoff(const json& jp, const std::string& name) {
    if (!jp.is_object() || !jp.contains("y") || !jp.contains("v"))
        raise(Errc::SchemaViolation, "payoff '" + name + "' needs 'y' and 'v' arrays");
    return PayoffFn(number_array(jp.at("y"), "payoff grid"),
                    number_array(jp.at("v"), "payoff values"));
}

} // namespace

Scenario load_scenario(const std::string& text) {
    const json doc = parse(text);
    Scenario sc{load_tree(doc), {}, {}, {}, std::nullopt, {}, {}};

    if (doc.contains("claims")) {
        const json& jc = doc.at("claims");
        if (!jc.is_object()) raise(Errc::SchemaViolation, "'claims' must be an object");
        for (const auto& [name, arr] : jc.items()) {
            std::vector<double> v = number_array(arr, "claim '" + name + "'");
            if (v.size() != static_cast<size_t>(sc.tree.num_leaves()))
                raise(Errc::SchemaViolation,
                      "claim '" + name + "' has " + std::to_string(v.size()) +
                          " values for " + std::to_string(sc.tree.num_leaves()) + " leaves");
            Claim c(std::move(v));
            check_claim(sc.tree, c, "load_scenario");
            sc.claims.emplace(name, std::move(c));
        }
    }

    if (doc.contains("agents")) {
        const json& ja = doc.at("agents");
        if (!ja.is_array() || ja.empty() || ja.size() > 2)
            raise(Errc::SchemaViolation, "'agents' must list one or two agents");
        for (const auto& jagent : ja) {
            AgentProfile a;
            if (!jagent.contains("gamma"))
                raise(Errc::SchemaViolation, "agent needs 'gamma'");
            a.gamma = number(jagent.at("gamma"), "'gamma'");
            if (!(a.gamma >= 1e-6 && a.gamma <= 1e6))
                raise(Errc::SchemaViolation, "agent gamma outside [1e-6, 1e6]");
            if (jagent.contains("endowment") && !jagent.at("endowment").is_null()) {
                const std::string name = jagent.at("endowment").get<std::string>();
                a.endowment = sc.claim(name);
                a.endowment_name = name;
            } else {
                a.endowment = Claim::zeros(sc.tree.num_leaves());
            }
            sc.agents.push_back(std::move(a));
        }
    } else {
        sc.agents.push_back(
            AgentProfile{1.0, Claim::zeros(sc.tree.num_leaves()), ""});
    }

    if (doc.contains("solver")) {
        const json& js = doc.at("solver");
        if (!js.is_object()) raise(Errc::SchemaViolation, "'solver' must be an object");
        if (js.contains("tol")) sc.solver.tol = number(js.at("tol"), "'tol'");
        if (js.contains("newton_tol"))
            sc.solver.newton_tol = number(js.at("newton_tol"), "'newton_tol'");
        if (js.contains("replication_tol"))
            sc.solver.replication_tol = number(js.at("replication_tol"), "'replication_tol'");
        for (double t : {sc.solver.tol, sc.solver.newton_tol, sc.solver.replication_tol})
            if (!(t > 0.0)) raise(Errc::SchemaViolation, "solver tolerances must be positive");
    }

    if (doc.contains("basisrisk")) {
        const json& jb = doc.at("basisrisk");
        if (!jb.is_object()) raise(Errc::SchemaViolation, "'basisrisk' must be an object");
        BasisRiskModel m;
        m.mu = number(jb.value("mu", json(m.mu)), "'mu'");
        m.sigma = number(jb.value("sigma", json(m.sigma)), "'sigma'");
        m.b = number(jb.value("b", json(m.b)), "'b'");
        m.a = number(jb.value("a", json(m.a)), "'a'");
        m.rho = number(jb.value("rho", json(m.rho)), "'rho'");
        m.y0 = number(jb.value("y0", json(m.y0)), "'y0'");
        m.horizon = number(jb.value("T", json(m.horizon)), "'T'");
        m.validate();
        sc.basis_model = m;
        if (jb.contains("payoffs")) {
            const json& jp = jb.at("payoffs");
            if (!jp.is_object()) raise(Errc::SchemaViolation, "'payoffs' must be an object");
            for (const auto& [name, p] : jp.items())
                sc.payoffs.emplace(name, load_payoff(p, name));
        }
        if (jb.contains("gamma_grid"))
            sc.profile_gammas = number_array(jb.at("gamma_grid"), "'gamma_grid'");
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

} // namespace entropic
