// Seeded search for a sink-window instance that is CP at every grid time but
// not CP-divisible. Prints the first accepted instance as a JSON document.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "edchan/cpcheck.hpp"
#include "edchan/dynamics.hpp"
#include "edchan/io.hpp"

namespace {

using edchan::CMatrix;
using edchan::Complex;

CMatrix gaussian_matrix(std::mt19937_64& rng, std::size_t d, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  CMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"search for a CP but not CP-divisible sink-window instance"};
  std::uint64_t seed = 1;
  int max_tries = 200;
  double t_max = 4.0;
  std::size_t steps = 400;
  double tol = 1e-9;
  double required_negativity = 1e-4;
  std::string output;
  app.add_option("--seed", seed);
  app.add_option("--max-tries", max_tries);
  app.add_option("--t-max", t_max);
  app.add_option("--steps", steps);
  app.add_option("--tol", tol);
  app.add_option("--negativity", required_negativity);
  app.add_option("--output", output);
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto grid = edchan::uniform_grid(t_max, steps);

  for (int attempt = 0; attempt < max_tries; ++attempt) {
    edchan::SinkWindowSpec spec;
    spec.h = edchan::hermitian_part(gaussian_matrix(rng, 2, 0.7));
    const CMatrix a = gaussian_matrix(rng, 2, 0.5);
    spec.g = edchan::hermitian_part(a.adjoint() * a);
    spec.kappa = 0.0;
    spec.window_start = 0.5 + 2.0 * unit(rng);
    spec.window_end = spec.window_start + 0.2 + 0.8 * unit(rng);
    spec.strength = 0.05 + 0.45 * unit(rng);
    if (spec.window_end >= t_max) continue;

    const auto traj = edchan::sink_window_trajectory(spec, grid);
    double min_map = 0.0;
    bool all_cp = true;
    for (const auto& m : traj.maps) {
      const auto rep = edchan::is_cp_ed(m, tol);
      all_cp = all_cp && rep.cp;
      min_map = std::min(min_map, rep.min_choi_eigenvalue);
    }
    const auto div = edchan::is_cp_divisible(traj, tol);
    std::fprintf(stderr, "attempt %d: maps_cp=%d min_map=%.3e divisibility_min=%.3e\n", attempt,
                 all_cp ? 1 : 0, min_map, div.min_eigenvalue);
    if (!all_cp || div.min_eigenvalue > -required_negativity) continue;

    edchan::io::Json doc = edchan::io::to_json(spec);
    doc["grid"] = edchan::io::to_json(edchan::io::GridSpec{t_max, steps});
    doc["search"] = {{"seed", seed}, {"attempt", attempt}};
    const std::string text = edchan::io::dump_canonical(doc);
    if (output.empty()) {
      std::cout << text;
    } else {
      std::ofstream(output) << text;
    }
    return 0;
  }
  std::fprintf(stderr, "no instance accepted\n");
  return 1;
}
