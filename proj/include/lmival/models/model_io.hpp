#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "model.hpp"

namespace lmival::models {

/// Raised for malformed model documents; what() starts with the JSON path
/// of the offending field, e.g. "cells[1].field: ...".
class ModelFormatError : public std::invalid_argument {
  public:
    ModelFormatError(std::string path, std::string const& msg)
        : std::invalid_argument(path + ": " + msg), path_(std::move(path))
    {
    }
    std::string const& path() const noexcept { return path_; }

  private:
    std::string path_;
};

inline constexpr char const* model_format_tag = "lmival-model/1";

nlohmann::json save_model(PiecewiseModel const& m);
PiecewiseModel load_model(nlohmann::json const& doc);

PiecewiseModel load_model_file(std::filesystem::path const& path);
void save_model_file(PiecewiseModel const& m, std::filesystem::path const& path);

}  // namespace lmival::models
