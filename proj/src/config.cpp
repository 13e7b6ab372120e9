#include "spectra/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include "spectra/errors.hpp"

namespace spectra {

using nlohmann::json;

namespace {

double number_at(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw InvalidInput(where + "." + key + ": missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw InvalidInput(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& key,
                                      const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return number_at(obj, key, where);
}

WingSpec wing_from_json(const json& node, const std::string& where) {
  if (!node.is_object()) throw InvalidInput(where + ": expected an object");
  if (!node.contains("type") || !node.at("type").is_string()) {
    throw InvalidInput(where + ".type: expected one of power, quadratic, custom-series");
  }
  const auto type = node.at("type").get<std::string>();
  try {
    if (type == "power") {
      return WingSpec::power(number_at(node, "coefficient", where), number_at(node, "exponent", where),
                             optional_number(node, "upper_exponent", where));
    }
    if (type == "quadratic") return WingSpec::quadratic(number_at(node, "curvature", where));
    if (type == "custom-series" || type == "series") {
      if (!node.contains("terms") || !node.at("terms").is_array()) {
        throw InvalidInput(where + ".terms: expected an array of {coefficient, exponent}");
      }
      std::vector<PowerTerm> terms;
      int k = 0;
      for (const auto& term : node.at("terms")) {
        const std::string at = where + ".terms[" + std::to_string(k++) + "]";
        if (term.is_array() && term.size() == 2 && term[0].is_number() && term[1].is_number()) {
          terms.push_back({term[0].get<double>(), term[1].get<double>()});
        } else if (term.is_object()) {
          terms.push_back({number_at(term, "coefficient", at), number_at(term, "exponent", at)});
        } else {
          throw InvalidInput(at + ": expected {coefficient, exponent} or [coefficient, exponent]");
        }
      }
      return WingSpec::series(std::move(terms), optional_number(node, "upper_exponent", where));
    }
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw InvalidInput(where + ": " + msg);
  }
  throw InvalidInput(where + ".type: unknown wing type '" + type + "'");
}

json wing_to_json(const WingSpec& wing) {
  switch (wing.kind()) {
    case WingKind::quadratic:
      return {{"type", "quadratic"}, {"curvature", 2.0 * wing.coefficient()}};
    case WingKind::power:
      return {{"type", "power"},
              {"exponent", wing.exponent()},
              {"coefficient", wing.coefficient()},
              {"upper_exponent", wing.upper_exponent()}};
    case WingKind::series: {
      json terms = json::array();
      for (const auto& t : wing.terms()) {
        terms.push_back({{"coefficient", t.coefficient}, {"exponent", t.exponent}});
      }
      return {{"type", "custom-series"}, {"terms", terms}, {"upper_exponent", wing.upper_exponent()}};
    }
  }
  return {};
}

// Recursive-descent reader for the TOML subset used in potential files:
// [table] headers, dotted keys, strings, numbers, booleans, arrays and inline tables.
class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_inline_space();
        auto path = key_path();
        skip_inline_space();
        expect(']');
        table = &root;
        for (const auto& part : path) {
          json& next = (*table)[part];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + part + "' is not a table");
          table = &next;
        }
      } else {
        auto path = key_path();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        assign(*table, path, value());
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto line = 1 + std::count(s_.begin(), s_.begin() + static_cast<long>(std::min(pos_, s_.size())), '\n');
    throw InvalidInput("toml line " + std::to_string(line) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_any_space() {
    while (!eof()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
  }

  std::string bare_or_quoted_key() {
    if (peek() == '"') return string_value();
    const auto start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{bare_or_quoted_key()};
    skip_inline_space();
    while (peek() == '.') {
      ++pos_;
      skip_inline_space();
      path.push_back(bare_or_quoted_key());
      skip_inline_space();
    }
    return path;
  }

  void assign(json& table, const std::vector<std::string>& path, json v) {
    json* node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& next = (*node)[path[i]];
      if (next.is_null()) next = json::object();
      node = &next;
    }
    if (node->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*node)[path.back()] = std::move(v);
  }

  std::string string_value() {
    expect('"');
    std::string out;
    while (!eof() && peek() != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (eof()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else if (c == '\n') {
        fail("unterminated string");
      } else {
        out += c;
      }
    }
    expect('"');
    return out;
  }

  json number_value() {
    const auto start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                      peek() == '-' || peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string token(s_.substr(start, pos_ - start));
    token.erase(std::remove(token.begin(), token.end(), '_'), token.end());
    if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    const char* first = token.data();
    if (!token.empty() && token.front() == '+') ++first;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(first, token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size() || token.empty()) {
      fail("invalid value '" + token + "'");
    }
    const bool integral = token.find_first_of(".eE") == std::string::npos;
    if (integral) return static_cast<long long>(v);
    return v;
  }

  json value() {
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      skip_any_space();
      while (peek() != ']') {
        arr.push_back(value());
        skip_any_space();
        if (peek() == ',') {
          ++pos_;
          skip_any_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      return arr;
    }
    if (c == '{') {
      ++pos_;
      json obj = json::object();
      skip_inline_space();
      while (peek() != '}') {
        auto path = key_path();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        assign(obj, path, value());
        skip_inline_space();
        if (peek() == ',') {
          ++pos_;
          skip_inline_space();
        } else if (peek() != '}') {
          fail("expected ',' or '}' in inline table");
        }
      }
      ++pos_;
      return obj;
    }
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number_value();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("potential: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

PiecewisePotential potential_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("potential: expected an object");
  if (!doc.contains("plateau")) throw InvalidInput("plateau: missing");
  const json& plateau = doc.at("plateau");
  if (!plateau.is_array() || plateau.size() != 2 || !plateau[0].is_number() || !plateau[1].is_number()) {
    throw InvalidInput("plateau: expected [a, b]");
  }
  const double a = plateau[0].get<double>();
  const double b = plateau[1].get<double>();
  if (!(a <= b)) throw InvalidInput("plateau: need a <= b");
  for (const char* key : {"left_wing", "right_wing"}) {
    if (!doc.contains(key)) throw InvalidInput(std::string(key) + ": missing");
  }
  return PiecewisePotential(a, b, wing_from_json(doc.at("left_wing"), "left_wing"),
                            wing_from_json(doc.at("right_wing"), "right_wing"));
}

json potential_to_json(const PiecewisePotential& pot) {
  return {{"plateau", {pot.plateau_left(), pot.plateau_right()}},
          {"left_wing", wing_to_json(pot.left_wing())},
          {"right_wing", wing_to_json(pot.right_wing())}};
}

json parse_toml(std::string_view text) { return TomlReader(text).parse(); }

PiecewisePotential load_potential(const std::string& name) {
  if (name == "counterexample") return potentials::counterexample();
  if (name == "gaussian") return potentials::gaussian();
  if (name == "quartic") return potentials::quartic();
  static const std::regex asym(R"(\s*asymmetric\s*\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(name, m, asym)) {
    double kl = 0.0;
    double kr = 0.0;
    const std::string sl = m[1].str();
    const std::string sr = m[2].str();
    const auto pl = std::from_chars(sl.data(), sl.data() + sl.size(), kl);
    const auto pr = std::from_chars(sr.data(), sr.data() + sr.size(), kr);
    if (pl.ec != std::errc() || pr.ec != std::errc() || pl.ptr != sl.data() + sl.size() ||
        pr.ptr != sr.data() + sr.size()) {
      throw InvalidInput("potential: asymmetric(ka, kb) needs two numbers");
    }
    return potentials::asymmetric(kl, kr);
  }
  const std::string text = read_file(name);
  if (ends_with(name, ".toml")) return potential_from_json(parse_toml(text));
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput("potential: '" + name + "' is not valid JSON: " + e.what());
  }
  return potential_from_json(doc);
}

}  // namespace spectra
