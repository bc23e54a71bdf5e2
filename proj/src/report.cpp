#include "msaw/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace msaw {

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open for write: " + tmp);
  const size_t n = std::fwrite(text.data(), 1, text.size(), f);
  const bool ok = (n == text.size()) && std::fflush(f) == 0;
  std::fclose(f);
  if (!ok) {
    std::remove(tmp.c_str());
    throw std::runtime_error("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

void write_json_atomic(const std::string& path, const Json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

Json check_report_json(const CheckReport& rep) {
  Json out;
  out["ok"] = rep.ok;
  Json lines = Json::array();
  for (const auto& l : rep.lines) {
    Json e;
    e["name"] = l.name;
    e["value"] = l.value;
    e["se"] = l.se;
    e["reference"] = l.reference;
    e["tol"] = l.tol;
    e["one_sided"] = l.one_sided;
    e["ok"] = l.ok;
    lines.push_back(std::move(e));
  }
  out["checks"] = std::move(lines);
  return out;
}

int log_level() {
  static const int lvl = [] {
    const char* env = std::getenv("MSAW_LOG");
    if (!env) return 1;
    return std::atoi(env);
  }();
  return lvl;
}

void log_note(int level, const std::string& msg) {
  if (log_level() >= level) std::fprintf(stderr, "[msaw] %s\n", msg.c_str());
}

}  // namespace msaw
