#pragma once

#include <string>
#include <vector>

namespace hts::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a comma-separated file. Lines starting with '#' are skipped.
// No quoting support; the engine's formats never embed commas in fields.
Table read_file(const std::string &path);
Table parse(const std::string &text);

std::string join_row(const std::vector<std::string> &fields);

// Canonical float formatting used by every emitted file, so reruns are
// byte-identical.
std::string format_double(double v);

}  // namespace hts::csv
