#pragma once

// Built-in instances shipped with the library and the CLI.

#include <string>
#include <string_view>
#include <vector>

#include "edchan/channel.hpp"
#include "edchan/dynamics.hpp"
#include "edchan/io.hpp"

namespace edchan::fixtures {

struct FixtureInfo {
  std::string name;
  std::string description;
};

std::vector<FixtureInfo> list();

/// The named fixture as a JSON document. Throws std::out_of_range for unknown names.
io::Json document(std::string_view name);

/// Qubit amplitude damping: phi = |a|^2, B = a, omega = 1 - |a|^2, gamma = 1.
EDMap amplitude_damping(double a);

/// d_e = 2, d_g = 1 semigroup with dissipator, coherence shift and a trace preserving psi.
SemigroupSpec semigroup_demo();

/// Time-dependent dynamics that is CP at every time but not CP-divisible.
SinkWindowSpec non_cp_divisible();
io::GridSpec non_cp_divisible_grid();

}  // namespace edchan::fixtures
