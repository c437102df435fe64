#pragma once

#include "roadhawk/model.hpp"

#include <filesystem>

namespace roadhawk {

// Self-describing JSON document: domain, config, rates, enabled flags and
// every curve (mixture metadata plus the evaluated cache), enough to
// re-evaluate the model without the original catalog. Doubles round-trip
// value-exactly.
void save_model(const ModelComponents& model, const std::filesystem::path& path);
ModelComponents load_model(const std::filesystem::path& path);

} // namespace roadhawk
