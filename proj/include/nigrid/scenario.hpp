#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nigrid/controller.hpp"
#include "nigrid/errors.hpp"
#include "nigrid/grid.hpp"
#include "nigrid/state_space.hpp"
#include "nigrid/swing.hpp"
#include "nigrid/transfer_function.hpp"

namespace nigrid {

struct BusSpec {
    int id = 0;
    double m = 0.0, d = 0.0, k = 0.0;
    double theta_bar_rad = 0.0;
};

struct LineSpec {
    int from = 0, to = 0;
    double p_max = 0.0;
};

struct ControllerSpec {
    int from = 0, to = 0;
    double k = 0.0, tau = 0.0;
    bool virtual_line = false;
};

struct SimSpec {
    double t_end_s = 120.0;
    double dt_s = 1e-3;
    std::uint64_t seed = 42;
    FaultSpec fault;
};

/// Parsed scenario: the network, the edge controllers, and the simulation
/// settings. Field names mirror the JSON schema one-to-one.
struct ScenarioConfig {
    double omega0_hz = 50.0;
    std::vector<BusSpec> buses;
    std::vector<LineSpec> lines;
    std::vector<ControllerSpec> controllers;
    SimSpec sim;
};

/// Result of parse_config: either a config, or every validation error found
/// (parsing does not stop at the first problem).
struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value() && errors.empty(); }

    std::string error_text() const {
        std::string out;
        for (const auto& e : errors) {
            out += e;
            out += '\n';
        }
        return out;
    }
};

namespace detail {

using nlohmann::json;

inline bool require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional,
                         std::vector<std::string>& errors) {
    bool ok = true;
    if (!obj.is_object()) {
        errors.push_back(where + ": expected an object");
        return false;
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) {
            errors.push_back(where + "." + key + ": required field missing");
            ok = false;
        }
    }
    for (const auto& item : obj.items()) {
        if (!required.contains(item.key()) && !optional.contains(item.key())) {
            errors.push_back(where + "." + item.key() + ": unknown field");
            ok = false;
        }
    }
    return ok;
}

inline std::optional<double> get_number(const json& obj, const std::string& where,
                                        const std::string& key,
                                        std::vector<std::string>& errors) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        errors.push_back(where + "." + key + ": expected a number");
        return std::nullopt;
    }
    return v.get<double>();
}

inline std::optional<int> get_int(const json& obj, const std::string& where,
                                  const std::string& key, std::vector<std::string>& errors) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        errors.push_back(where + "." + key + ": expected an integer");
        return std::nullopt;
    }
    return v.get<int>();
}

}  // namespace detail

/// Parses and validates a scenario from JSON text. All schema violations
/// and referential errors are collected; the config is returned only when
/// none were found.
inline ParseResult parse_config(const std::string& text) {
    using nlohmann::json;
    ParseResult result;
    auto& errors = result.errors;

    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        errors.push_back(std::string("syntax error: ") + e.what());
        return result;
    }

    ScenarioConfig cfg;
    detail::require_keys(root, "config", {"omega0_hz", "buses", "lines", "controllers"},
                         {"sim"}, errors);
    if (!root.is_object()) return result;

    if (auto v = detail::get_number(root, "config", "omega0_hz", errors)) {
        if (*v > 0.0) {
            cfg.omega0_hz = *v;
        } else {
            errors.push_back("config.omega0_hz: must be positive");
        }
    }

    // buses
    if (root.contains("buses")) {
        if (!root["buses"].is_array() || root["buses"].empty()) {
            errors.push_back("config.buses: expected a nonempty array");
        } else {
            for (size_t i = 0; i < root["buses"].size(); ++i) {
                const std::string where = "buses[" + std::to_string(i) + "]";
                const auto& jb = root["buses"][i];
                if (!detail::require_keys(jb, where, {"id", "M", "D", "K", "theta_bar_rad"}, {},
                                          errors)) {
                    continue;
                }
                BusSpec bus;
                if (auto v = detail::get_int(jb, where, "id", errors)) bus.id = *v;
                if (auto v = detail::get_number(jb, where, "M", errors)) bus.m = *v;
                if (auto v = detail::get_number(jb, where, "D", errors)) bus.d = *v;
                if (auto v = detail::get_number(jb, where, "K", errors)) bus.k = *v;
                if (auto v = detail::get_number(jb, where, "theta_bar_rad", errors)) {
                    bus.theta_bar_rad = *v;
                }
                if (!(bus.m > 0.0)) errors.push_back(where + ".M: must be positive");
                if (!(bus.d > 0.0)) errors.push_back(where + ".D: must be positive");
                if (bus.k < 0.0) errors.push_back(where + ".K: must be nonnegative");
                cfg.buses.push_back(bus);
            }
        }
    }

    const int n = static_cast<int>(cfg.buses.size());
    std::set<int> ids;
    for (const auto& bus : cfg.buses) ids.insert(bus.id);
    if (static_cast<int>(ids.size()) != n ||
        (n > 0 && (*ids.begin() != 1 || *ids.rbegin() != n))) {
        errors.push_back("config.buses: ids must be exactly 1.." + std::to_string(n));
    }
    auto valid_bus = [&](int id) { return ids.contains(id); };

    // lines
    std::set<std::pair<int, int>> line_pairs;
    if (root.contains("lines")) {
        if (!root["lines"].is_array()) {
            errors.push_back("config.lines: expected an array");
        } else {
            for (size_t i = 0; i < root["lines"].size(); ++i) {
                const std::string where = "lines[" + std::to_string(i) + "]";
                const auto& jl = root["lines"][i];
                if (!detail::require_keys(jl, where, {"from", "to", "p_max"}, {}, errors)) {
                    continue;
                }
                LineSpec line;
                if (auto v = detail::get_int(jl, where, "from", errors)) line.from = *v;
                if (auto v = detail::get_int(jl, where, "to", errors)) line.to = *v;
                if (auto v = detail::get_number(jl, where, "p_max", errors)) line.p_max = *v;
                if (!valid_bus(line.from)) {
                    errors.push_back(where + ".from: no bus with id " + std::to_string(line.from));
                }
                if (!valid_bus(line.to)) {
                    errors.push_back(where + ".to: no bus with id " + std::to_string(line.to));
                }
                if (line.from == line.to) errors.push_back(where + ": self-loop");
                if (!(line.p_max > 0.0)) errors.push_back(where + ".p_max: must be positive");
                const auto key = std::minmax(line.from, line.to);
                if (!line_pairs.insert(key).second) {
                    errors.push_back(where + ": duplicate line between buses " +
                                     std::to_string(key.first) + " and " +
                                     std::to_string(key.second));
                }
                cfg.lines.push_back(line);
            }
        }
    }

    // controllers
    std::set<std::pair<int, int>> ctrl_pairs;
    if (root.contains("controllers")) {
        if (!root["controllers"].is_array()) {
            errors.push_back("config.controllers: expected an array");
        } else {
            for (size_t i = 0; i < root["controllers"].size(); ++i) {
                const std::string where = "controllers[" + std::to_string(i) + "]";
                const auto& jc = root["controllers"][i];
                if (!detail::require_keys(jc, where, {"from", "to", "k", "tau"}, {"virtual"},
                                          errors)) {
                    continue;
                }
                ControllerSpec ctrl;
                if (auto v = detail::get_int(jc, where, "from", errors)) ctrl.from = *v;
                if (auto v = detail::get_int(jc, where, "to", errors)) ctrl.to = *v;
                if (auto v = detail::get_number(jc, where, "k", errors)) ctrl.k = *v;
                if (auto v = detail::get_number(jc, where, "tau", errors)) ctrl.tau = *v;
                if (jc.contains("virtual")) {
                    if (!jc["virtual"].is_boolean()) {
                        errors.push_back(where + ".virtual: expected a boolean");
                    } else {
                        ctrl.virtual_line = jc["virtual"].get<bool>();
                    }
                }
                if (!valid_bus(ctrl.from)) {
                    errors.push_back(where + ".from: no bus with id " + std::to_string(ctrl.from));
                }
                if (!valid_bus(ctrl.to)) {
                    errors.push_back(where + ".to: no bus with id " + std::to_string(ctrl.to));
                }
                if (ctrl.from == ctrl.to) errors.push_back(where + ": self-loop");
                if (!(ctrl.k > 0.0)) errors.push_back(where + ".k: must be positive");
                if (!(ctrl.tau > 0.0)) errors.push_back(where + ".tau: must be positive");
                const auto key = std::minmax(ctrl.from, ctrl.to);
                if (!ctrl_pairs.insert(key).second) {
                    errors.push_back(where + ": duplicate controller between buses " +
                                     std::to_string(key.first) + " and " +
                                     std::to_string(key.second));
                }
                // a controller needs a physical line unless declared virtual
                if (valid_bus(ctrl.from) && valid_bus(ctrl.to) && !ctrl.virtual_line &&
                    !line_pairs.contains(key)) {
                    errors.push_back(where + ": no physical line between buses " +
                                     std::to_string(key.first) + " and " +
                                     std::to_string(key.second) +
                                     " (set \"virtual\": true for a virtual line)");
                }
                cfg.controllers.push_back(ctrl);
            }
        }
    }

    // sim
    if (root.contains("sim")) {
        const auto& js = root["sim"];
        if (detail::require_keys(js, "sim", {}, {"t_end_s", "dt_s", "seed", "fault"}, errors)) {
            if (auto v = detail::get_number(js, "sim", "t_end_s", errors)) cfg.sim.t_end_s = *v;
            if (auto v = detail::get_number(js, "sim", "dt_s", errors)) cfg.sim.dt_s = *v;
            if (js.contains("seed")) {
                if (!js["seed"].is_number_unsigned() && !js["seed"].is_number_integer()) {
                    errors.push_back("sim.seed: expected an integer");
                } else {
                    cfg.sim.seed = js["seed"].get<std::uint64_t>();
                }
            }
            if (js.contains("fault")) {
                const auto& jf = js["fault"];
                if (detail::require_keys(jf, "sim.fault", {"dtheta_max_rad", "domega_max_rad_s"},
                                         {}, errors)) {
                    if (auto v = detail::get_number(jf, "sim.fault", "dtheta_max_rad", errors)) {
                        cfg.sim.fault.dtheta_max = *v;
                    }
                    if (auto v = detail::get_number(jf, "sim.fault", "domega_max_rad_s", errors)) {
                        cfg.sim.fault.domega_max = *v;
                    }
                    if (cfg.sim.fault.dtheta_max < 0.0) {
                        errors.push_back("sim.fault.dtheta_max_rad: must be nonnegative");
                    }
                    if (cfg.sim.fault.domega_max < 0.0) {
                        errors.push_back("sim.fault.domega_max_rad_s: must be nonnegative");
                    }
                }
            }
            if (!(cfg.sim.dt_s > 0.0)) errors.push_back("sim.dt_s: must be positive");
            if (!(cfg.sim.t_end_s >= cfg.sim.dt_s)) {
                errors.push_back("sim.t_end_s: must be at least dt_s");
            }
        }
    }

    // connectivity of the grid and of the controller graph
    if (errors.empty()) {
        auto check_graph = [&](const std::set<std::pair<int, int>>& pairs, const char* what) {
            std::vector<LineParams> edges;
            for (const auto& [a, b] : pairs) edges.push_back(LineParams{a, b, 1.0, 0.0});
            try {
                build_topology(n, std::move(edges));
            } catch (const ValidationError& e) {
                errors.push_back(std::string("config.") + what + ": " + e.what());
            }
        };
        check_graph(line_pairs, "lines");
        check_graph(ctrl_pairs, "controllers");
    }

    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

inline ParseResult parse_config(std::string_view text) {
    return parse_config(std::string(text));
}

/// Everything derived from a valid config: network model, controller layer,
/// plant descriptions, and the congruence seen by the controllers.
struct ScenarioSystem {
    NominalFrequency w0;
    std::vector<BusParams> buses;
    Topology grid;             // physical lines
    SwingModel model;
    ClosedLoopController controller;  // may act on a supergraph of grid
    TfMatrix plant_tf;                // diag{1/(M s^2 + D s + K)}
    CongruenceTf plant_congruence;    // Qc^T G(s) Qc with the controller's incidence
    SimSpec sim;
};

/// Assembles the simulation/verification objects from a parsed config.
/// Steady-state mechanical powers are solved from the equilibrium relation
/// (the paper's example leaves them unspecified).
inline ScenarioSystem build_system(const ScenarioConfig& cfg) {
    const auto w0 = NominalFrequency::from_hz(cfg.omega0_hz);
    const int n = static_cast<int>(cfg.buses.size());

    std::vector<BusParams> buses(static_cast<size_t>(n));
    for (const auto& spec : cfg.buses) {
        BusParams bus;
        bus.id = spec.id;
        bus.m_inertia = spec.m;
        bus.d_damping = spec.d;
        bus.k_stiffness = spec.k;
        bus.theta_bar = spec.theta_bar_rad;
        buses[static_cast<size_t>(spec.id - 1)] = bus;
    }
    auto theta_of = [&](int id) { return buses[static_cast<size_t>(id - 1)].theta_bar; };

    std::vector<LineParams> lines;
    lines.reserve(cfg.lines.size());
    for (const auto& spec : cfg.lines) {
        lines.push_back(
            LineParams{spec.from, spec.to, spec.p_max, theta_of(spec.from) - theta_of(spec.to)});
    }
    Topology grid = build_topology(n, std::move(lines));
    balance_mech_power(buses, grid, w0);

    std::vector<LineParams> ctrl_lines;
    std::vector<EdgeController> edge_ctrls;
    for (size_t e = 0; e < cfg.controllers.size(); ++e) {
        const auto& spec = cfg.controllers[e];
        ctrl_lines.push_back(
            LineParams{spec.from, spec.to, 0.0, theta_of(spec.from) - theta_of(spec.to)});
        edge_ctrls.push_back(EdgeController{static_cast<int>(e), spec.k, spec.tau});
    }
    Topology ctrl_graph = build_topology(n, std::move(ctrl_lines));

    // built directly from (M, D, K) so degenerate stiffness reaches the NI
    // classifier instead of being rejected up front
    std::vector<RationalTf> plant_blocks;
    plant_blocks.reserve(buses.size());
    for (const auto& bus : buses) {
        plant_blocks.emplace_back(std::vector<double>{1.0},
                                  std::vector<double>{bus.k_stiffness, bus.d_damping,
                                                      bus.m_inertia});
    }
    TfMatrix plant_tf(std::move(plant_blocks));
    CongruenceTf congruence(ctrl_graph.incidence, plant_tf);

    SwingModel model(buses, grid, w0);
    ClosedLoopController controller(std::move(ctrl_graph), std::move(edge_ctrls));

    return ScenarioSystem{w0,
                          std::move(buses),
                          std::move(grid),
                          std::move(model),
                          std::move(controller),
                          std::move(plant_tf),
                          std::move(congruence),
                          cfg.sim};
}

/// The paper's 4-bus star example: the displayed per-bus transfer functions
/// diag{0.05/(s^2+0.25s+0.25), 0.2/(s^2+s+1) x3} (so M = (20,5,5,5) and
/// effective D = K = 5 everywhere) with the edge controllers
/// diag{0.4, 0.5, 0.3}/(10s+1) on lines (1,2), (1,3), (1,4).
inline ScenarioConfig paper_4bus_scenario() {
    constexpr double pi = std::numbers::pi;
    ScenarioConfig cfg;
    cfg.omega0_hz = 50.0;
    cfg.buses = {
        {1, 20.0, 5.0, 5.0, pi / 3.0},
        {2, 5.0, 5.0, 5.0, pi / 6.0},
        {3, 5.0, 5.0, 5.0, pi / 6.0},
        {4, 5.0, 5.0, 5.0, pi / 6.0},
    };
    cfg.lines = {{1, 2, 1.0}, {1, 3, 1.0}, {1, 4, 1.0}};
    cfg.controllers = {{1, 2, 0.4, 10.0, false}, {1, 3, 0.5, 10.0, false},
                       {1, 4, 0.3, 10.0, false}};
    cfg.sim.t_end_s = 120.0;
    cfg.sim.dt_s = 1e-3;
    cfg.sim.seed = 42;
    cfg.sim.fault = FaultSpec{0.5, 0.5};
    return cfg;
}

inline std::string to_json_text(const ScenarioConfig& cfg) {
    nlohmann::ordered_json root;
    root["omega0_hz"] = cfg.omega0_hz;
    for (const auto& bus : cfg.buses) {
        root["buses"].push_back({{"id", bus.id},
                                 {"M", bus.m},
                                 {"D", bus.d},
                                 {"K", bus.k},
                                 {"theta_bar_rad", bus.theta_bar_rad}});
    }
    for (const auto& line : cfg.lines) {
        root["lines"].push_back({{"from", line.from}, {"to", line.to}, {"p_max", line.p_max}});
    }
    for (const auto& ctrl : cfg.controllers) {
        nlohmann::ordered_json jc = {
            {"from", ctrl.from}, {"to", ctrl.to}, {"k", ctrl.k}, {"tau", ctrl.tau}};
        if (ctrl.virtual_line) jc["virtual"] = true;
        root["controllers"].push_back(jc);
    }
    root["sim"] = {{"t_end_s", cfg.sim.t_end_s},
                   {"dt_s", cfg.sim.dt_s},
                   {"seed", cfg.sim.seed},
                   {"fault",
                    {{"dtheta_max_rad", cfg.sim.fault.dtheta_max},
                     {"domega_max_rad_s", cfg.sim.fault.domega_max}}}};
    return root.dump(2) + "\n";
}

}  // namespace nigrid
