#pragma once

#include <string>
#include <vector>

#include "smr/config.hpp"

namespace smr {

struct CatalogEntry {
    std::string name;
    std::string summary;
    nlohmann::json config;  // base config; the seed is overridden per run

    ScenarioConfig make(std::uint64_t seed) const;
};

const std::vector<CatalogEntry>& catalog();
// Throws std::invalid_argument for unknown names.
const CatalogEntry& catalog_entry(const std::string& name);

}  // namespace smr
