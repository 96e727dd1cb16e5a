#pragma once

#include <string>

#include <json.hpp>

#include "bwb/model.hpp"

namespace bwb {

/// Malformed model document; the message carries the offending field path.
class ModelParseError : public std::runtime_error {
  public:
    explicit ModelParseError(const std::string& what) : std::runtime_error(what) {}
};

ModelSpec model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const ModelSpec& spec);

ModelSpec load_model_file(const std::string& path);
void save_model_file(const ModelSpec& spec, const std::string& path);

}  // namespace bwb
