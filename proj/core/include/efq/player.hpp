#pragma once

#include <string>

namespace efq {

enum class Player { I, II };

inline Player other(Player p) { return p == Player::I ? Player::II : Player::I; }
inline std::string to_string(Player p) { return p == Player::I ? "Player I" : "Player II"; }

/// One line of a game transcript.
struct TranscriptEntry {
  std::string position;
  std::string actor;
  std::string move;
  std::string note;
};

}  // namespace efq
