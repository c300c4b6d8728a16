#include "portsym/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace portsym {
namespace {

using nlohmann::json;

constexpr int kVersion = 1;

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

Vector vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), Index(v.size()));
}

Matrix matrix_from(const json& j, Index cols = -1) {
  if (!j.is_array()) throw ParseError("expected an array of rows", 0);
  const Index rows = Index(j.size());
  if (rows == 0) return Matrix(0, std::max<Index>(cols, 0));
  const Index c = Index(j.front().size());
  Matrix m(rows, c);
  for (Index r = 0; r < rows; ++r) {
    if (Index(j[std::size_t(r)].size()) != c) throw ParseError("ragged matrix row " + std::to_string(r), 0);
    m.row(r) = vector_from(j[std::size_t(r)]).transpose();
  }
  return m;
}

json to_json(const RangeScaling& s) { return {{"offset", to_json(s.offset)}, {"scale", to_json(s.scale)}}; }
RangeScaling scaling_from(const json& j) { return {vector_from(j.at("offset")), vector_from(j.at("scale"))}; }

json to_json(const GaussianKde& k) { return {{"centers", to_json(k.centers())}, {"bandwidth", to_json(k.bandwidth())}}; }
GaussianKde kde_from(const json& j) {
  Vector bw = vector_from(j.at("bandwidth"));
  Matrix c = matrix_from(j.at("centers"), bw.size());
  return GaussianKde(std::move(c), std::move(bw));
}

json to_json(const ProbabilisticClassifier& c) {
  const auto p = c.parameters();
  return {{"scaling", to_json(p.scaling)}, {"support", to_json(p.support)}, {"coef", to_json(p.coef)},
          {"rho", p.rho},         {"gamma", p.gamma},           {"platt_a", p.platt_a},
          {"platt_b", p.platt_b}};
}
ProbabilisticClassifier classifier_from(const json& j) {
  ProbabilisticClassifier::Parameters p;
  p.scaling = scaling_from(j.at("scaling"));
  p.support = matrix_from(j.at("support"), p.scaling.dim());
  p.coef = vector_from(j.at("coef"));
  p.rho = j.at("rho").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.platt_a = j.at("platt_a").get<double>();
  p.platt_b = j.at("platt_b").get<double>();
  return ProbabilisticClassifier::from_parameters(std::move(p));
}

json portable_json(const PortableModel& m) {
  json vocab = json::array();
  for (const auto& s : m.vocabulary.symbols())
    vocab.push_back({{"id", s.id},
                     {"name", s.name},
                     {"mask", std::vector<Index>(s.mask)},
                     {"density", to_json(s.density)},
                     {"min_train_log_density", s.min_train_log_density}});
  json rules = json::array();
  for (const auto& r : m.rules) {
    json outcomes = json::array();
    for (const auto& o : r.outcomes) outcomes.push_back({{"probability", o.probability}, {"effects", o.effects}});
    rules.push_back({{"option_id", r.option_id},
                     {"partition", r.partition},
                     {"option_name", r.option_name},
                     {"classifier", to_json(r.precondition.classifier)},
                     {"symbolic", r.precondition.symbolic},
                     {"outcomes", outcomes}});
  }
  return {{"format", "portsym-model"},
          {"version", kVersion},
          {"family", m.family},
          {"obs_dim", m.obs_dim},
          {"obs_noise", to_json(m.obs_noise)},
          {"vocabulary", vocab},
          {"rules", rules},
          {"experience", format_dataset(m.experience)}};
}

void expect_format(const json& j, const std::string& tag) {
  if (!j.is_object() || j.value("format", std::string()) != tag)
    throw ParseError("expected a '" + tag + "' document", 0);
  if (j.value("version", 0) != kVersion)
    throw ParseError("unsupported " + tag + " version " + std::to_string(j.value("version", 0)), 0);
}

PortableModel portable_from(const json& j) {
  expect_format(j, "portsym-model");
  PortableModel m;
  m.family = j.at("family").get<std::string>();
  m.obs_dim = j.at("obs_dim").get<Index>();
  m.obs_noise = vector_from(j.at("obs_noise"));
  for (const auto& s : j.at("vocabulary")) {
    Symbol sym;
    sym.name = s.at("name").get<std::string>();
    sym.mask = s.at("mask").get<std::vector<Index>>();
    sym.density = kde_from(s.at("density"));
    sym.min_train_log_density = s.at("min_train_log_density").get<double>();
    const int id = m.vocabulary.add(std::move(sym));
    if (id != s.at("id").get<int>()) throw ParseError("vocabulary ids must be dense and ordered", 0);
  }
  for (const auto& r : j.at("rules")) {
    PortableRule rule;
    rule.option_id = r.at("option_id").get<OptionId>();
    rule.partition = r.at("partition").get<int>();
    rule.option_name = r.at("option_name").get<std::string>();
    rule.precondition.classifier = classifier_from(r.at("classifier"));
    rule.precondition.symbolic = r.at("symbolic").get<SymbolicCondition>();
    for (const auto& o : r.at("outcomes")) {
      Outcome out;
      out.probability = o.at("probability").get<double>();
      out.effects = o.at("effects").get<std::vector<int>>();
      for (int e : out.effects)
        if (e < 0 || std::size_t(e) >= m.vocabulary.size())
          throw ValidationError("rule references unknown symbol " + std::to_string(e));
      rule.outcomes.push_back(std::move(out));
    }
    m.rules.push_back(std::move(rule));
  }
  m.experience = parse_dataset(j.at("experience").get<std::string>());
  return m;
}

json entries_json(const std::vector<LinkingEntry>& es) {
  json out = json::array();
  for (const auto& e : es)
    out.push_back({{"end_label", e.end_label}, {"outcome", e.outcome}, {"probability", e.probability}});
  return out;
}
std::vector<LinkingEntry> entries_from(const json& j) {
  std::vector<LinkingEntry> out;
  for (const auto& e : j)
    out.push_back({e.at("end_label").get<int>(), e.at("outcome").get<int>(), e.at("probability").get<double>()});
  return out;
}

template <typename F>
auto guarded(const std::string& text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, e.byte);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad document: ") + e.what(), 0);
  }
}

}  // namespace

std::string format_portable_model(const PortableModel& model) { return portable_json(model).dump(1) + "\n"; }

PortableModel parse_portable_model(const std::string& text) {
  return guarded(text, [](const json& j) { return portable_from(j); });
}

std::string format_grounded_model(const GroundedModel& gm) {
  json labels = {{"scaling", to_json(gm.labels.scaling)},
                 {"eps", gm.labels.eps},
                 {"points", to_json(gm.labels.points)},
                 {"point_label", gm.labels.point_label},
                 {"trivial", gm.labels.trivial}};
  json densities = json::array();
  for (const auto& d : gm.labels.densities) densities.push_back(to_json(d));
  labels["densities"] = densities;
  json linking = json::array();
  for (const auto& [key, entries] : gm.linking.rows) {
    const auto count = gm.linking.counts.count(key) ? gm.linking.counts.at(key) : 0;
    linking.push_back({{"option_id", std::get<0>(key)},
                       {"partition", std::get<1>(key)},
                       {"start_label", std::get<2>(key)},
                       {"count", count},
                       {"entries", entries_json(entries)}});
  }
  json ops = json::array();
  for (const auto& op : gm.operators)
    ops.push_back({{"option_id", op.option_id},
                   {"partition", op.partition},
                   {"start_label", op.start_label},
                   {"outcomes", entries_json(op.outcomes)}});
  json doc = {{"format", "portsym-grounded"},
              {"version", kVersion},
              {"portable", portable_json(*gm.portable)},
              {"labels", labels},
              {"linking", linking},
              {"operators", ops},
              {"goal", gm.goal ? to_json(*gm.goal) : json(nullptr)},
              {"label_goal_probability", to_json(gm.label_goal_probability)},
              {"warnings", gm.warnings}};
  return doc.dump(1) + "\n";
}

GroundedModel parse_grounded_model(const std::string& text) {
  return guarded(text, [](const json& j) {
    expect_format(j, "portsym-grounded");
    GroundedModel gm;
    gm.portable = std::make_shared<const PortableModel>(portable_from(j.at("portable")));
    const json& l = j.at("labels");
    gm.labels.scaling = scaling_from(l.at("scaling"));
    gm.labels.eps = l.at("eps").get<double>();
    gm.labels.points = matrix_from(l.at("points"), gm.labels.scaling.dim());
    gm.labels.point_label = l.at("point_label").get<std::vector<int>>();
    gm.labels.trivial = l.at("trivial").get<bool>();
    for (const auto& d : l.at("densities")) gm.labels.densities.push_back(kde_from(d));
    for (const auto& row : j.at("linking")) {
      const LinkingFunction::Key key{row.at("option_id").get<int>(), row.at("partition").get<int>(),
                                     row.at("start_label").get<int>()};
      gm.linking.rows[key] = entries_from(row.at("entries"));
      gm.linking.counts[key] = row.at("count").get<std::size_t>();
    }
    for (const auto& op : j.at("operators"))
      gm.operators.push_back({op.at("option_id").get<int>(), op.at("partition").get<int>(),
                              op.at("start_label").get<int>(), entries_from(op.at("outcomes"))});
    if (!j.at("goal").is_null()) gm.goal = classifier_from(j.at("goal"));
    gm.label_goal_probability = vector_from(j.at("label_goal_probability"));
    gm.warnings = j.at("warnings").get<std::vector<std::string>>();
    gm.index();
    return gm;
  });
}

std::string format_partitions(const PartitionFile& file) {
  json parts = json::array();
  for (const auto& p : file.partitions)
    parts.push_back({{"option_id", p.option_id}, {"label", p.index}, {"members", p.members}, {"outcomes", p.outcomes}});
  return json{{"format", "portsym-partitions"}, {"version", kVersion}, {"space", to_string(file.space)}, {"partitions", parts}}
             .dump(1) +
         "\n";
}

PartitionFile parse_partitions(const std::string& text) {
  return guarded(text, [](const json& j) {
    expect_format(j, "portsym-partitions");
    PartitionFile f;
    f.space = parse_space(j.at("space").get<std::string>());
    for (const auto& p : j.at("partitions")) {
      Partition part;
      part.option_id = p.at("option_id").get<int>();
      part.index = p.at("label").get<int>();
      part.space = f.space;
      part.members = p.at("members").get<std::vector<std::size_t>>();
      part.outcomes = p.at("outcomes").get<std::vector<std::vector<std::size_t>>>();
      f.partitions.push_back(std::move(part));
    }
    return f;
  });
}

std::string format_goals(const GoalSamples& goals) {
  return json{{"format", "portsym-goals"}, {"version", kVersion}, {"states", to_json(goals.states)}, {"in_goal", goals.in_goal}}
             .dump(1) +
         "\n";
}

GoalSamples parse_goals(const std::string& text) {
  return guarded(text, [](const json& j) {
    expect_format(j, "portsym-goals");
    GoalSamples g;
    g.states = matrix_from(j.at("states"));
    g.in_goal = j.at("in_goal").get<std::vector<bool>>();
    if (g.in_goal.size() != std::size_t(g.states.rows()))
      throw ValidationError("goal file: " + std::to_string(g.states.rows()) + " states but " +
                            std::to_string(g.in_goal.size()) + " labels");
    return g;
  });
}

std::string format_starts(const StartSamples& starts) {
  return json{{"format", "portsym-starts"},
              {"version", kVersion},
              {"states", to_json(starts.states)},
              {"observations", to_json(starts.observations)}}
             .dump(1) +
         "\n";
}

StartSamples parse_starts(const std::string& text) {
  return guarded(text, [](const json& j) {
    expect_format(j, "portsym-starts");
    StartSamples s{matrix_from(j.at("states")), matrix_from(j.at("observations"))};
    if (s.states.rows() != s.observations.rows())
      throw ValidationError("start file: states and observations differ in count");
    return s;
  });
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_portable_model(const PortableModel& model, const std::filesystem::path& path) {
  write_text_file(path, format_portable_model(model));
}
PortableModel load_portable_model(const std::filesystem::path& path) {
  return parse_portable_model(read_text_file(path));
}
void save_grounded_model(const GroundedModel& gm, const std::filesystem::path& path) {
  write_text_file(path, format_grounded_model(gm));
}
GroundedModel load_grounded_model(const std::filesystem::path& path) { return parse_grounded_model(read_text_file(path)); }

}  // namespace portsym
