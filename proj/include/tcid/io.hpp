#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcid/codec.hpp"
#include "tcid/errors.hpp"
#include "tcid/identify.hpp"

namespace tcid {

using Json = nlohmann::ordered_json;

// Observation CSV: one vector per line, comma separated. Lines starting with
// '#' are comments; a leading `# dim=N count=P` header is checked against the
// body. Blank lines are skipped.
std::vector<Vector> read_observations(std::istream& in);
std::vector<Vector> read_observations_file(const std::string& path);

// `digits` significant digits per field; 0 means the full working precision.
void write_observations(std::ostream& out, const std::vector<Vector>& observations,
                        unsigned digits = 0);
void write_observations_file(const std::string& path, const std::vector<Vector>& observations,
                             unsigned digits = 0);

Json matrix_to_json(const Matrix& m);  // array of rows
// Accepts an array of rows or a flat row-major array of a square matrix.
Matrix matrix_from_json(const Json& j);

Json result_to_json(const Identification& id);
Json rank_deficiency_to_json(const RankDeficiencyError& e);

// Sidecar written next to simulated observations.
struct GroundTruth {
  TransformSpec transform;
  Matrix transform_matrix;
  Vector steps;
  SourceSpec source;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

Json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tcid
