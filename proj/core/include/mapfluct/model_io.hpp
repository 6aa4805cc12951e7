#ifndef MAPFLUCT_MODEL_IO_HPP
#define MAPFLUCT_MODEL_IO_HPP

#include <string>

#include "mapfluct/model.hpp"

namespace mapfluct {

// Thrown by the strict parser; what() carries the offending field path.
class ModelParseError : public std::runtime_error {
public:
  explicit ModelParseError(const std::string& w) : std::runtime_error(w) {}
};

// Schema: {n_states, Q, states: [{drift, sigma2, jumps: [{rate, law}]}],
//          trans_jumps: [law], spectrally_negative}
// law: {family: "degenerate"|"exponential"|"mixture", params: {...}, sign: "+"|"-"}
// Unknown fields are rejected with their JSON path.
MapSpec parse_model_json(const std::string& text);
MapSpec load_model_file(const std::string& path);

std::string model_to_json(const MapSpec& spec, int indent = 2);

}  // namespace mapfluct

#endif
