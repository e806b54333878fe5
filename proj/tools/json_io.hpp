#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kdvlab/potential.hpp"

namespace kdvlab::cli {

using Json = nlohmann::ordered_json;

/// Malformed input; maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"mean": float, "modes": [{"n": int, "re": float, "im": float}]}; "im"
/// and "mean" default to 0.
Potential potential_from_json(const Json& j);
Json potential_to_json(const Potential& q);

/// `source` is inline JSON when it starts with '{', else a file path.
Potential load_potential(const std::string& source);

/// Serialize with fixed key order and doubles printed as %.17g; non-finite
/// numbers become null. `indent` < 0 gives a single line.
void write_json(std::ostream& os, const Json& j, int indent = 2);
std::string dump_json(const Json& j, int indent = 2);

/// %.17g, or "nan"/"inf"/"-inf".
std::string fmt_double(double v);

/// Array of doubles from v[first..].
Json json_array(const std::vector<double>& v, std::size_t first = 0);

/// "a..b", "a,b,c" or "a"; all entries >= 1.
std::vector<int> parse_index_list(const std::string& s);

}  // namespace kdvlab::cli
