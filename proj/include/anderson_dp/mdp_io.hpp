#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "anderson_dp/mdp.hpp"

namespace anderson_dp {

/**
 * Plain-text MDP document, version 1:
 *
 *     anderson-dp-mdp 1
 *     num_states <S>
 *     num_actions <A>
 *     gamma <g>
 *     rewards
 *     <R(s,0)> ... <R(s,A-1)>          one line per state
 *     transitions
 *     <s> <a> <k> <s'_1> <p_1> ... <s'_k> <p_k>   one line per (s,a), row-major
 *
 * Reals are written with 17 significant digits, so reading back restores every
 * double bit-exactly.
 */
void write_mdp(std::ostream& out, const Mdp& mdp);
std::string to_text(const Mdp& mdp);
Mdp read_mdp(std::istream& in);
Mdp mdp_from_text(const std::string& text);

void save_mdp(const std::filesystem::path& path, const Mdp& mdp);
Mdp load_mdp(const std::filesystem::path& path);

}  // namespace anderson_dp
