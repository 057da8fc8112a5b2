// Scripted scorer speaking the length-prefixed frame protocol on stdin/stdout.
//   fake_scorer <mode> [log-file]
// Modes: zero, first (Q = -index), last (Q = index), error, short, null, die.
// Every request is appended to log-file as one JSON line when given.
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

bool read_frame(std::string& payload) {
  std::string header;
  if (!std::getline(std::cin, header)) return false;
  payload.assign(std::stoull(header), '\0');
  std::cin.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  return std::cin.get() == '\n';
}

void write_frame(const json& j) {
  std::string s = j.dump();
  std::cout << s.size() << '\n' << s << '\n' << std::flush;
}

std::size_t candidate_count(const json& request) {
  const std::string kind = request.at("kind");
  if (kind == "graph") return request.at("candidates").size();
  if (kind == "batch") return request.at("items").size();
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "zero";
  std::ofstream log;
  if (argc > 2) log.open(argv[2], std::ios::app);

  std::string payload;
  while (read_frame(payload)) {
    json request = json::parse(payload);
    if (log) log << request.dump() << '\n' << std::flush;
    if (mode == "die") return 3;
    if (mode == "error") {
      write_frame({{"v", 1}, {"kind", "error"}, {"message", "scripted failure"}});
      continue;
    }
    std::size_t n = candidate_count(request);
    json values = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      if (mode == "first") values.push_back(-static_cast<double>(i));
      else if (mode == "last") values.push_back(static_cast<double>(i));
      else if (mode == "null") values.push_back(nullptr);
      else values.push_back(0.0);
    }
    if (mode == "short" && !values.empty()) values.erase(values.size() - 1);
    write_frame({{"v", 1}, {"kind", "q"}, {"values", values}});
  }
  return 0;
}
