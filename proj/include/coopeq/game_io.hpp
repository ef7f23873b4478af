#pragma once

#include <optional>
#include <string>

#include "coopeq/model.hpp"
#include "coopeq/propagation.hpp"

namespace coopeq {

// A parsed game file: the game itself plus whatever propagation-matrix
// request the file carried ("uniform", "offdiag", or a dense matrix).
struct ParsedGameFile {
    Game game;
    std::optional<std::string> w_name;
    std::optional<PropagationMatrix> w_dense;
};

// Parses the JSON game format. Error messages cite the failing field path;
// NaN/Inf payloads are rejected.
ParsedGameFile parse_game_file(const std::string& text);
Game parse_game(const std::string& text);

std::string serialize_game_file(const ParsedGameFile& f);
std::string serialize_game(const Game& g);

ParsedGameFile load_game_file(const std::string& path);

// A W file is a bare JSON array of n rows of n numbers.
PropagationMatrix parse_w_json(const std::string& text);
PropagationMatrix load_w_file(const std::string& path);

}  // namespace coopeq
