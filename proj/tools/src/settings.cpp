// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "spokenvec/cli/settings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spokenvec/error.hpp"
#include "spokenvec/text.hpp"

namespace spokenvec::cli {

void Settings::declare(std::string key, std::string default_value) {
  entries_.push_back({std::move(key), default_value, default_value});
}

const Settings::Entry& Settings::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return e;
  }
  throw ConfigError("unknown setting '" + std::string(key) + "'");
}

Settings::Entry& Settings::find(std::string_view key) {
  return const_cast<Entry&>(std::as_const(*this).find(key));
}

void Settings::set(std::string_view key, std::string value) {
  find(key).value = std::move(value);
}

void Settings::load_text(std::string_view content) {
  std::size_t line_no = 0;
  for (auto line : text::split(content, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    try {
      set(key, std::string(value));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    load_text(buf.str());
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

bool Settings::is_set(std::string_view key) const {
  const auto& e = find(key);
  return e.value != e.default_value;
}

const std::string& Settings::text(std::string_view key) const {
  return find(key).value;
}

namespace {

[[noreturn]] void bad_value(std::string_view key, const std::string& value,
                            const char* kind) {
  throw ConfigError(std::string(key) + " = '" + value + "' is not " + kind);
}

}  // namespace

double Settings::real(std::string_view key) const {
  const auto& v = text(key);
  auto parsed = text::parse_double(v);
  if (!parsed || !std::isfinite(*parsed)) bad_value(key, v, "a finite number");
  return *parsed;
}

int Settings::integer(std::string_view key) const {
  const auto& v = text(key);
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "an integer");
  }
  return out;
}

std::uint64_t Settings::unsigned_integer(std::string_view key) const {
  const auto& v = text(key);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

bool Settings::boolean(std::string_view key) const {
  const auto v = text::to_lower(text(key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, text(key), "true or false");
}

std::optional<double> Settings::optional_real(std::string_view key) const {
  if (text::to_lower(text(key)) == "none") return std::nullopt;
  return real(key);
}

std::string Settings::dump() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + " = " + e.value + "\n";
  return out;
}

}  // namespace spokenvec::cli
