// Line-oriented dataset format.
//
//   # portsym-dataset v1 family=<name> state_dim=<n> obs_dim=<m> seed=<k>
//   <task_id> <option_id> <success> <duration> <reward> | <state> | <obs> | <next_state> | <next_obs>
//
// Values are space separated; reals use the shortest decimal form that parses
// back to the identical double.

#include "portsym/core.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace portsym {
namespace {

constexpr const char* kMagic = "# portsym-dataset v1";

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

void append_vector(std::string& out, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back(' ');
    append_double(out, v[i]);
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(tok) + "'",
                     line);
  return value;
}

Vector parse_group(std::string_view group, std::size_t line) {
  const auto toks = split_ws(group);
  Vector v(static_cast<Index>(toks.size()));
  for (std::size_t i = 0; i < toks.size(); ++i) v[Index(i)] = parse_number<double>(toks[i], line, "real");
  return v;
}

}  // namespace

std::string format_dataset(const Dataset& ds) {
  ds.validate();
  if (ds.domain_family.empty() || ds.domain_family.find_first_of(" \t\n") != std::string::npos)
    throw ValidationError("domain family must be a non-empty token");
  std::string out = kMagic;
  out += " family=" + ds.domain_family + " state_dim=" + std::to_string(ds.state_dim()) +
         " obs_dim=" + std::to_string(ds.obs_dim()) + " seed=" + std::to_string(ds.rng_seed) + "\n";
  for (const Transition& t : ds.transitions) {
    if (t.task_id.empty() || t.task_id.find_first_of(" \t\n|") != std::string::npos)
      throw ValidationError("task id '" + t.task_id + "' must be a non-empty token without '|'");
    out += t.task_id;
    out += ' ' + std::to_string(t.option_id) + ' ' + (t.success ? '1' : '0') + ' ' +
           std::to_string(t.duration) + ' ';
    append_double(out, t.reward);
    out += " |";
    append_vector(out, t.state);
    out += " |";
    append_vector(out, t.obs);
    out += " |";
    append_vector(out, t.next_state);
    out += " |";
    append_vector(out, t.next_obs);
    out += '\n';
  }
  return out;
}

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("line 1: missing dataset header", 1);
  ++lineno;
  if (line.rfind(kMagic, 0) != 0) throw ParseError("line 1: not a portsym dataset header", 1);

  Dataset ds;
  Index state_dim = -1, obs_dim = -1;
  for (auto tok : split_ws(std::string_view(line).substr(std::string_view(kMagic).size()))) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ParseError("line 1: bad header field '" + std::string(tok) + "'", 1);
    const auto key = tok.substr(0, eq);
    const auto val = tok.substr(eq + 1);
    if (key == "family") ds.domain_family = std::string(val);
    else if (key == "state_dim") state_dim = parse_number<Index>(val, 1, "state_dim");
    else if (key == "obs_dim") obs_dim = parse_number<Index>(val, 1, "obs_dim");
    else if (key == "seed") ds.rng_seed = parse_number<std::uint64_t>(val, 1, "seed");
    else throw ParseError("line 1: unknown header field '" + std::string(key) + "'", 1);
  }
  if (ds.domain_family.empty() || state_dim < 0 || obs_dim < 0)
    throw ParseError("line 1: header must declare family, state_dim and obs_dim", 1);

  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    ++record;
    const std::string where = "record " + std::to_string(record) + " (line " + std::to_string(lineno) + ")";
    std::vector<std::string_view> groups;
    std::string_view rest(line);
    for (std::size_t bar; (bar = rest.find('|')) != std::string_view::npos; rest = rest.substr(bar + 1))
      groups.push_back(rest.substr(0, bar));
    groups.push_back(rest);
    if (groups.size() != 5) throw ParseError(where + ": expected 5 '|'-separated groups", lineno);

    const auto head = split_ws(groups[0]);
    if (head.size() != 5) throw ParseError(where + ": expected task, option, success, duration, reward", lineno);
    Transition t;
    t.task_id = std::string(head[0]);
    t.option_id = parse_number<int>(head[1], lineno, "option id");
    const int success = parse_number<int>(head[2], lineno, "success flag");
    if (success != 0 && success != 1) throw ParseError(where + ": success flag must be 0 or 1", lineno);
    t.success = success == 1;
    t.duration = parse_number<int>(head[3], lineno, "duration");
    t.reward = parse_number<double>(head[4], lineno, "reward");
    t.state = parse_group(groups[1], lineno);
    t.obs = parse_group(groups[2], lineno);
    t.next_state = parse_group(groups[3], lineno);
    t.next_obs = parse_group(groups[4], lineno);

    auto check = [&](const Vector& v, Index expected, const char* name) {
      if (v.size() != expected)
        throw ValidationError(where + ": " + name + " has " + std::to_string(v.size()) +
                              " values, expected " + std::to_string(expected));
    };
    check(t.state, state_dim, "state");
    check(t.next_state, state_dim, "next_state");
    check(t.obs, obs_dim, "obs");
    check(t.next_obs, obs_dim, "next_obs");
    if (t.duration < 1) throw ValidationError(where + ": duration must be positive");
    if (!t.success && (t.state != t.next_state || t.obs != t.next_obs))
      throw ValidationError(where + ": failed execution changed the state");
    ds.transitions.push_back(std::move(t));
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  const std::string text = format_dataset(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

}  // namespace portsym
