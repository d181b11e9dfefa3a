#pragma once

#include <string>

// Thin logging facade so the library headers stay free of the logging backend.
// The threshold comes from GIST_LOG={error|warn|info|debug}; default is warn.
namespace gist::log {

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

// Re-reads GIST_LOG. Called once lazily; exposed for the CLI and tests.
void configure_from_env();

}  // namespace gist::log
