#pragma once
// Flat `key = value` config files whose keys match TrainConfig field
// names exactly. CLI flags arrive as the same key/value pairs and
// override file values.

#include <string>
#include <utility>
#include <vector>

#include "hilonet/trainer.hpp"

namespace hilonet {

// Parses one file; '#' starts a comment, blank lines are skipped.
// Unknown keys and malformed values raise ParseError naming the key.
TrainConfig parse_config_file(const std::string& path, TrainConfig base = {});

// Applies key/value overrides on top of a config.
void apply_config_entry(TrainConfig& config, const std::string& key, const std::string& value);

void apply_overrides(TrainConfig& config,
                     const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace hilonet
