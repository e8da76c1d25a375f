#pragma once

// JSON reading and writing of instances.
//
// Sites are the facilities followed by the clients; ids must be unique
// across both lists. Explicit matrices are indexed in that order.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "meddis/instance.hpp"

namespace meddis {

// Thrown for documents that parse but do not follow the instance schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Instance& instance);

// Parses a file; malformed JSON raises Error with the parser's message.
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

Instance read_instance(const std::filesystem::path& path);

}  // namespace meddis
