#pragma once

#include <string>

#include <json.hpp>

#include "apm/globalmap.hpp"
#include "apm/jets.hpp"

namespace apm {

using json = nlohmann::json;

ModelMap model_from_json(const json& j);
json model_to_json(const ModelMap& m);
ModelMap load_model(const std::string& path);

JetMap2 jet_from_json(const json& j);
json jet_to_json(const JetMap2& f);
json normal_form_to_json(const NormalFormResult& r);

json read_json_file(const std::string& path);

}  // namespace apm
