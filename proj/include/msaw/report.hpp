#pragma once

#include <string>

#include <json.hpp>

#include "msaw/estimators.hpp"

namespace msaw {

using Json = nlohmann::ordered_json;

// temp file + rename so interrupted runs never leave partial files
void write_text_atomic(const std::string& path, const std::string& text);
void write_json_atomic(const std::string& path, const Json& j);

Json check_report_json(const CheckReport& rep);

// MSAW_LOG=0 silences progress notes, 2 adds detail; default 1
int log_level();
void log_note(int level, const std::string& msg);

}  // namespace msaw
