#include "cims/config_doc.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cims {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& raw, const std::string& where) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(raw, &consumed);
    if (consumed != raw.size())
      throw ConfigError("config: trailing characters in number at " + where);
    return value;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + raw + "' at " + where);
  }
}

}  // namespace

ConfigDoc ConfigDoc::parse_string(const std::string& text) {
  ConfigDoc doc;
  doc.source_text = text;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: unterminated section header at line " +
                          std::to_string(line_no));
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError("config: empty section name at line " +
                          std::to_string(line_no));
      doc.sections[section];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(line_no));
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(line_no));
    if (section.empty())
      throw ConfigError("config: key '" + key + "' outside any [section]");
    doc.sections[section][key] = value;
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  const auto sec = sections.find(section);
  return sec != sections.end() && sec->second.count(key) > 0;
}

std::string ConfigDoc::get_string(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) const {
  const auto sec = sections.find(section);
  if (sec == sections.end()) return fallback;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? fallback : it->second;
}

double ConfigDoc::get_double(const std::string& section,
                             const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return parse_double(get_string(section, key, ""), section + "." + key);
}

std::int64_t ConfigDoc::get_int(const std::string& section,
                                const std::string& key,
                                std::int64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key, "");
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw ConfigError("config: bad integer '" + raw + "' at " + section + "." +
                      key);
  return value;
}

bool ConfigDoc::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = lower(get_string(section, key, ""));
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError("config: bad boolean '" + raw + "' at " + section + "." +
                    key);
}

std::vector<double> ConfigDoc::get_double_list(const std::string& section,
                                               const std::string& key) const {
  std::vector<double> values;
  std::istringstream in(get_string(section, key, ""));
  std::string token;
  while (in >> token)
    values.push_back(parse_double(token, section + "." + key));
  return values;
}

std::string ConfigDoc::content_hash() const {
  std::uint64_t hash = 14695981039346656037ull;
  for (const unsigned char c : source_text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace cims
