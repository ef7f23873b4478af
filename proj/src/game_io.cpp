#include "coopeq/game_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "coopeq/errors.hpp"

namespace coopeq {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string idx_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

const json& require_field(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path.empty() ? key + ": missing field"
                                                     : path + "." + key + ": missing field");
    return *it;
}

double require_finite_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path + ": non-finite value");
    return v;
}

std::vector<double> require_number_array(const json& j, const std::string& path,
                                         std::int64_t expected_len) {
    if (!j.is_array()) throw ParseError(path + ": expected an array");
    if (static_cast<std::int64_t>(j.size()) != expected_len) {
        throw ParseError(path + ": expected " + std::to_string(expected_len) +
                         " entries, got " + std::to_string(j.size()));
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(require_finite_number(j[k], idx_path(path, k)));
    }
    return out;
}

std::int64_t capped_product(const std::vector<int>& dims, const std::string& path) {
    std::int64_t p = 1;
    for (int m : dims) {
        if (p > kMaxTableCells / m) {
            throw CapacityError(path + ": table would exceed the cell cap of " +
                                std::to_string(kMaxTableCells));
        }
        p *= m;
    }
    return p;
}

// Canonical form: one flat array of n*n numbers in row-major order. Nested
// rows are accepted as a convenience.
PropagationMatrix parse_w_array(const json& j, int n, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        throw ParseError(path + ": expected an array");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    if (j[0].is_array()) {
        if (static_cast<int>(j.size()) != n) {
            throw ParseError(path + ": expected " + std::to_string(n) + " rows");
        }
        for (int i = 0; i < n; ++i) {
            const json& row = j[static_cast<std::size_t>(i)];
            const std::string row_path = idx_path(path, static_cast<std::size_t>(i));
            if (!row.is_array() || static_cast<int>(row.size()) != n) {
                throw ParseError(row_path + ": expected " + std::to_string(n) + " entries");
            }
            for (int k = 0; k < n; ++k) {
                flat.push_back(
                    require_finite_number(row[static_cast<std::size_t>(k)],
                                          idx_path(row_path, static_cast<std::size_t>(k))));
            }
        }
    } else {
        if (static_cast<std::int64_t>(j.size()) !=
            static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n)) {
            throw ParseError(path + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                             " row-major entries, got " + std::to_string(j.size()));
        }
        for (std::size_t k = 0; k < j.size(); ++k) {
            flat.push_back(require_finite_number(j[k], idx_path(path, k)));
        }
    }
    return w_from_flat(n, std::move(flat));
}

}  // namespace

ParsedGameFile parse_game_file(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("top level: expected an object");

    const json& kind = require_field(j, "kind", "");
    if (!kind.is_string()) throw ParseError("kind: expected a string");
    const std::string kind_s = kind.get<std::string>();
    if (kind_s != "normal_form" && kind_s != "factored") {
        throw ParseError("kind: expected \"normal_form\" or \"factored\", got \"" + kind_s + "\"");
    }

    const json& players = require_field(j, "players", "");
    if (!players.is_array() || players.empty()) {
        throw ParseError("players: expected a non-empty array");
    }
    const int n = static_cast<int>(players.size());

    Game g;
    g.flavor = (kind_s == "normal_form") ? GameFlavor::NormalForm : GameFlavor::Factored;
    for (int i = 0; i < n; ++i) {
        const json& pl = players[static_cast<std::size_t>(i)];
        const std::string path = idx_path("players", static_cast<std::size_t>(i));
        if (!pl.is_object()) throw ParseError(path + ": expected an object");
        const json& name = require_field(pl, "name", path);
        if (!name.is_string()) throw ParseError(path + ".name: expected a string");
        const json& actions = require_field(pl, "actions", path);
        if (!actions.is_array() || actions.empty()) {
            throw ParseError(path + ".actions: expected a non-empty array");
        }
        std::vector<std::string> labels;
        labels.reserve(actions.size());
        for (std::size_t k = 0; k < actions.size(); ++k) {
            const json& lab = actions[k];
            if (!lab.is_string()) {
                throw ParseError(idx_path(path + ".actions", k) + ": expected a string");
            }
            labels.push_back(lab.get<std::string>());
        }
        g.player_names.push_back(name.get<std::string>());
        g.action_counts.push_back(static_cast<int>(labels.size()));
        g.action_labels.push_back(std::move(labels));
    }

    if (g.flavor == GameFlavor::NormalForm) {
        const std::int64_t cells = capped_product(g.action_counts, "players");
        const json& payoffs = require_field(j, "payoffs", "");
        if (!payoffs.is_array() || static_cast<int>(payoffs.size()) != n) {
            throw ParseError("payoffs: expected " + std::to_string(n) + " tables");
        }
        std::vector<int> full(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) full[static_cast<std::size_t>(k)] = k;
        for (int i = 0; i < n; ++i) {
            std::vector<double> table =
                require_number_array(payoffs[static_cast<std::size_t>(i)],
                                     idx_path("payoffs", static_cast<std::size_t>(i)), cells);
            g.subs.push_back(SubObjective{i, full, std::move(table)});
        }
    } else {
        const json& subs = require_field(j, "subobjectives", "");
        if (!subs.is_array() || static_cast<int>(subs.size()) != n) {
            throw ParseError("subobjectives: expected " + std::to_string(n) + " entries");
        }
        g.subs.resize(static_cast<std::size_t>(n));
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (std::size_t s = 0; s < subs.size(); ++s) {
            const json& so = subs[s];
            const std::string path = idx_path("subobjectives", s);
            if (!so.is_object()) throw ParseError(path + ": expected an object");
            const json& owner_j = require_field(so, "owner", path);
            if (!owner_j.is_number_integer()) {
                throw ParseError(path + ".owner: expected an integer");
            }
            const int owner = owner_j.get<int>() - 1;
            if (owner < 0 || owner >= n) {
                throw ParseError(path + ".owner: out of range [1, " + std::to_string(n) + "]");
            }
            if (seen[static_cast<std::size_t>(owner)]) {
                throw ParseError("subobjectives: duplicate owner " + std::to_string(owner + 1));
            }
            seen[static_cast<std::size_t>(owner)] = 1;

            const json& scope_j = require_field(so, "scope", path);
            if (!scope_j.is_array() || scope_j.empty()) {
                throw ParseError(path + ".scope: expected a non-empty array");
            }
            std::vector<int> scope;
            std::vector<int> dims;
            int prev = -1;
            bool has_owner = false;
            for (std::size_t k = 0; k < scope_j.size(); ++k) {
                const json& e = scope_j[k];
                if (!e.is_number_integer()) {
                    throw ParseError(idx_path(path + ".scope", k) + ": expected an integer");
                }
                const int v = e.get<int>() - 1;
                if (v < 0 || v >= n) {
                    throw ParseError(idx_path(path + ".scope", k) + ": out of range [1, " +
                                     std::to_string(n) + "]");
                }
                if (v <= prev) {
                    throw ParseError(path + ".scope: indices must be strictly ascending");
                }
                prev = v;
                if (v == owner) has_owner = true;
                scope.push_back(v);
                dims.push_back(g.action_counts[static_cast<std::size_t>(v)]);
            }
            if (!has_owner) throw ParseError(path + ".scope: must contain the owner");

            const std::int64_t cells = capped_product(dims, path + ".table");
            std::vector<double> table =
                require_number_array(require_field(so, "table", path), path + ".table", cells);
            g.subs[static_cast<std::size_t>(owner)] =
                SubObjective{owner, std::move(scope), std::move(table)};
        }
        for (int i = 0; i < n; ++i) {
            if (!seen[static_cast<std::size_t>(i)]) {
                throw ParseError("subobjectives: missing sub-objective for player " +
                                 std::to_string(i + 1));
            }
        }
    }

    validate_game(g);

    ParsedGameFile out;
    out.game = std::move(g);
    if (auto it = j.find("w"); it != j.end()) {
        if (it->is_string()) {
            const std::string w_name = it->get<std::string>();
            if (w_name != "uniform" && w_name != "offdiag") {
                throw ParseError("w: unknown matrix name \"" + w_name + "\"");
            }
            out.w_name = w_name;
        } else {
            out.w_dense = parse_w_array(*it, n, "w");
        }
    }
    return out;
}

Game parse_game(const std::string& text) { return parse_game_file(text).game; }

namespace {

std::string default_player_name(int i) { return "p" + std::to_string(i + 1); }
std::string default_action_label(int a) { return "a" + std::to_string(a + 1); }

}  // namespace

std::string serialize_game_file(const ParsedGameFile& f) {
    const Game& g = f.game;
    ordered_json j;
    j["kind"] = (g.flavor == GameFlavor::NormalForm) ? "normal_form" : "factored";

    ordered_json players = ordered_json::array();
    for (int i = 0; i < g.num_agents(); ++i) {
        ordered_json pl;
        pl["name"] = (static_cast<int>(g.player_names.size()) > i && !g.player_names.empty())
                         ? g.player_names[static_cast<std::size_t>(i)]
                         : default_player_name(i);
        ordered_json actions = ordered_json::array();
        for (int a = 0; a < g.num_actions(i); ++a) {
            if (static_cast<int>(g.action_labels.size()) > i &&
                static_cast<int>(g.action_labels[static_cast<std::size_t>(i)].size()) > a) {
                actions.push_back(g.action_labels[static_cast<std::size_t>(i)]
                                                 [static_cast<std::size_t>(a)]);
            } else {
                actions.push_back(default_action_label(a));
            }
        }
        pl["actions"] = std::move(actions);
        players.push_back(std::move(pl));
    }
    j["players"] = std::move(players);

    if (g.flavor == GameFlavor::NormalForm) {
        ordered_json payoffs = ordered_json::array();
        for (const SubObjective& sub : g.subs) payoffs.push_back(sub.table);
        j["payoffs"] = std::move(payoffs);
    } else {
        ordered_json subs = ordered_json::array();
        for (const SubObjective& sub : g.subs) {
            ordered_json so;
            so["owner"] = sub.owner + 1;
            ordered_json scope = ordered_json::array();
            for (int v : sub.scope) scope.push_back(v + 1);
            so["scope"] = std::move(scope);
            so["table"] = sub.table;
            subs.push_back(std::move(so));
        }
        j["subobjectives"] = std::move(subs);
    }

    if (f.w_name) {
        j["w"] = *f.w_name;
    } else if (f.w_dense) {
        j["w"] = f.w_dense->w;  // flat row-major, the canonical file form
    }

    return j.dump(2) + "\n";
}

std::string serialize_game(const Game& g) {
    ParsedGameFile f;
    f.game = g;
    return serialize_game_file(f);
}

ParsedGameFile load_game_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open game file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_game_file(ss.str());
}

PropagationMatrix parse_w_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) {
        throw ParseError("w file: expected a non-empty array");
    }
    int n = 0;
    if (j[0].is_array()) {
        n = static_cast<int>(j.size());
    } else {
        // Flat row-major form: the side length is the square root.
        while (static_cast<std::int64_t>(n) * n < static_cast<std::int64_t>(j.size())) ++n;
        if (static_cast<std::int64_t>(n) * n != static_cast<std::int64_t>(j.size())) {
            throw ParseError("w file: flat form needs a square number of entries, got " +
                             std::to_string(j.size()));
        }
    }
    return parse_w_array(j, n, "w");
}

PropagationMatrix load_w_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open w file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_w_json(ss.str());
}

}  // namespace coopeq
