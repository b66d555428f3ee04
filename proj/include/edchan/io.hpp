#pragma once

// JSON serialization. Complex entries are [re, im] pairs, matrices are
// arrays of rows. The canonical writer sorts object keys and prints every
// floating-point value with %.17g, so equal values give byte-identical text.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "edchan/channel.hpp"
#include "edchan/dynamics.hpp"
#include "edchan/matcore.hpp"

namespace edchan::io {

using Json = nlohmann::json;

/// Malformed or ill-shaped input. The message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json parse(std::string_view text);
std::string dump_canonical(const Json& value);

std::string format_double(double x);

Json to_json(Complex z);
Json to_json(const CMatrix& m);
Json to_json(std::span<const Complex> v);
Json to_json(const EDMap& map);
Json to_json(const BlockOperator& op);
Json to_json(const SemigroupSpec& spec);
Json to_json(const GeneratorTable& table);
Json to_json(const SinkWindowSpec& spec);
Json to_json(const ChannelTrajectory& traj);

/// Real numbers are accepted wherever a complex entry is expected.
Complex complex_from_json(const Json& j, const std::string& where);
CMatrix matrix_from_json(const Json& j, const std::string& where);
std::vector<Complex> vector_from_json(const Json& j, const std::string& where);

EDMap edmap_from_json(const Json& j);
SemigroupSpec semigroup_from_json(const Json& j);
GeneratorTable table_from_json(const Json& j);
SinkWindowSpec sink_window_from_json(const Json& j);
ChannelTrajectory trajectory_from_json(const Json& j);

/// Value of the "type" field; documents without one are read as "edmap".
std::string document_type(const Json& j);

/// Time grid carried by a dynamics document, when present.
struct GridSpec {
  double t_max = 1.0;
  std::size_t steps = 100;
};
std::optional<GridSpec> grid_from_json(const Json& j);
Json to_json(const GridSpec& grid);

using DynamicsInput = std::variant<SemigroupSpec, GeneratorTable, SinkWindowSpec, ChannelTrajectory>;

/// Any document accepted by the time-dependent commands.
DynamicsInput dynamics_from_json(const Json& j);

/// Builds (or returns) the trajectory of a dynamics input on a uniform grid.
/// Stored trajectories ignore the grid.
ChannelTrajectory trajectory_of(const DynamicsInput& input, const GridSpec& grid);

}  // namespace edchan::io
