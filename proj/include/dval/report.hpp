#pragma once

#include <json.hpp>

#include "dval/algorithms.hpp"

namespace dval {

using Json = nlohmann::ordered_json;

/// Report schemas: keys keep insertion order, field values are canonical
/// strings, so two runs on the same input print the same bytes.
Json to_json(const Value& v);
Json to_json(const UniformizerResult& r);
Json to_json(const ResidueFieldReport& r);
Json to_json(const OrderCheck& c);
Json to_json(const ExtensionReport& x);
Json to_json(const std::vector<TruncatedXSeries>& ws);

}  // namespace dval
