#include "edchan/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace edchan::fixtures {

namespace detail {
extern const char* const kNonCpDivisibleJson;
}

namespace {

const io::Json& non_cp_divisible_document() {
  static const io::Json doc = io::parse(detail::kNonCpDivisibleJson);
  return doc;
}

}  // namespace

std::vector<FixtureInfo> list() {
  return {
      {"amplitude_damping", "qubit amplitude damping, a = 0.8 (CPTP)"},
      {"qubit_non_cp", "qubit map a = 0.8, b = 0.9, |q|^2 = 1 - |a|^2 (TP, not CP)"},
      {"semigroup", "d_e = 2, d_g = 1 CPTP semigroup"},
      {"non_cp_divisible", "CP at every time, not CP-divisible (sink turns non-CP in a window)"},
  };
}

EDMap amplitude_damping(double a) { return qubit_map(a, a, std::sqrt(1.0 - a * a), 1.0); }

SemigroupSpec semigroup_demo() {
  SemigroupSpec spec;
  spec.gen.h = CMatrix{{0.5, {0.2, -0.1}}, {{0.2, 0.1}, -0.3}};
  spec.gen.g = CMatrix{{0.6, 0.1}, {0.1, 0.4}};
  spec.gen.f = {CMatrix{{0.0, 0.3}, {0.0, 0.0}}};
  spec.c = {0.5};
  spec.epsilon = 0.3;
  spec.kappa = 0.4;
  spec.psi = psi_from_sink(spec.gen.g, LinearMap::identity(1), 1e-12).psi;
  return spec;
}

SinkWindowSpec non_cp_divisible() { return io::sink_window_from_json(non_cp_divisible_document()); }

io::GridSpec non_cp_divisible_grid() { return *io::grid_from_json(non_cp_divisible_document()); }

io::Json document(std::string_view name) {
  if (name == "amplitude_damping") return io::to_json(amplitude_damping(0.8));
  if (name == "qubit_non_cp") return io::to_json(qubit_map(0.8, 0.9, 0.6, 1.0));
  if (name == "semigroup") {
    io::Json doc = io::to_json(semigroup_demo());
    doc["grid"] = io::to_json(io::GridSpec{2.0, 200});
    return doc;
  }
  if (name == "non_cp_divisible") return non_cp_divisible_document();
  throw std::out_of_range("unknown fixture \"" + std::string(name) + "\"");
}

}  // namespace edchan::fixtures
