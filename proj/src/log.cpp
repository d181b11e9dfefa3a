#include "gist/log.hpp"

#include <cstdlib>
#include <mutex>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace gist::log {

namespace {

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = spdlog::stderr_color_mt("gist");
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  return logger;
}

spdlog::logger& logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> instance;
  std::call_once(once, [] {
    instance = make_logger();
    configure_from_env();
  });
  return *instance;
}

}  // namespace

void configure_from_env() {
  const char* env = std::getenv("GIST_LOG");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (env != nullptr) {
    const std::string v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  if (auto l = spdlog::get("gist")) l->set_level(level);
}

void error(const std::string& msg) { logger().error(msg); }
void warn(const std::string& msg) { logger().warn(msg); }
void info(const std::string& msg) { logger().info(msg); }
void debug(const std::string& msg) { logger().debug(msg); }

}  // namespace gist::log
