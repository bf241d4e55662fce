#ifndef WEAKGRAD_IO_HPP
#define WEAKGRAD_IO_HPP

#include "weakgrad/dyadic.hpp"
#include "weakgrad/field.hpp"
#include "weakgrad/levelset.hpp"
#include "weakgrad/spaces.hpp"
#include "weakgrad/weights.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace weakgrad {

using json = nlohmann::json;

void to_json(json& j, const FunctionSpec& f);
void from_json(const json& j, FunctionSpec& f);
void to_json(json& j, const WeightSpec& w);
void from_json(const json& j, WeightSpec& w);
void to_json(json& j, const OrliczSpec& phi);
void from_json(const json& j, OrliczSpec& phi);
void to_json(json& j, const ExponentProfile& r);
void from_json(const json& j, ExponentProfile& r);
void to_json(json& j, const DyadicCube& c);
void from_json(const json& j, DyadicCube& c);
void to_json(json& j, const LambdaGridSpec& g);
void from_json(const json& j, LambdaGridSpec& g);

json space_to_json(const SpaceSpec& space);
SpaceSpec space_from_json(const json& j);

/// Accepts a number or the strings "inf" / "infinity".
double number_or_inf(const json& j);
json inf_or_number(double v);

/// Parses inline JSON text, or reads the file it names when the text does
/// not start with '{'.
json parse_json_argument(const std::string& text);

json profile_summary(const LevelSetProfile& profile);
/// CSV: lambda,value,r_max_cells,pair_count
void write_profile_csv(std::ostream& out, const LevelSetProfile& profile);

}  // namespace weakgrad

#endif  // WEAKGRAD_IO_HPP
