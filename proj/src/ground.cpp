#include "portsym/ground.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace portsym {
namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Components of the eps-graph over the rows of X listed in `idx`.
void eps_components(const Matrix& X, const std::vector<std::size_t>& idx, double eps, UnionFind& uf) {
  const Matrix P = select_rows(X, idx);
  constexpr Index kBlock = 512;
  for (Index s = 0; s < P.rows(); s += kBlock) {
    const Index rows = std::min(kBlock, P.rows() - s);
    const Matrix D = pairwise_sq_distances(P.middleRows(s, rows), P);
    for (Index r = 0; r < rows; ++r)
      for (Index c = s + r + 1; c < P.rows(); ++c)
        if (D(r, c) <= eps * eps) uf.unite(idx[std::size_t(s + r)], idx[std::size_t(c)]);
  }
}

}  // namespace

int LabelSet::assign(const Eigen::Ref<const Vector>& state) const {
  if (trivial) return 0;
  if (points.rows() == 0) return -1;
  const Vector z = scaling.apply(state);
  Index best = 0;
  const double d2 = (points.rowwise() - z.transpose()).rowwise().squaredNorm().minCoeff(&best);
  return d2 <= eps * eps ? point_label[std::size_t(best)] : -1;
}

LabelResult label_problem_partitions(const Dataset& ds, const GroundParams& params) {
  LabelResult out;
  LabelSet& L = out.labels;
  L.eps = params.partition.eps;
  out.start_label.assign(ds.size(), -1);
  out.end_label.assign(ds.size(), -1);
  if (ds.empty()) {
    L.scaling = fit_space_scaling(ds, Space::Problem);
    return out;
  }

  // Points: every start state, then every successful end state.
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> succ;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.transitions[i].success) succ.push_back(i);
  const Index n = Index(ds.size() + succ.size());
  Matrix raw(n, ds.state_dim());
  raw.topRows(Index(ds.size())) = start_matrix(ds, all, Space::Problem);
  if (!succ.empty()) raw.bottomRows(Index(succ.size())) = end_matrix(ds, succ, Space::Problem);
  // Problem-space coordinates share task units, so one scale serves every dimension.
  L.scaling = fit_isotropic_scaling(raw);
  const Matrix X = L.scaling.apply_rows(raw);

  // Signature: per problem-space partition, whether the point lies within eps of its start set.
  const auto parts = partition_options(ds, Space::Problem, params.partition, L.scaling);
  std::vector<std::vector<int>> signature(std::size_t(n), std::vector<int>(parts.size(), 0));
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto keep = subsample_indices(parts[p].members.size(), params.partition.overlap_cap, derive_seed(params.seed, p));
    std::vector<std::size_t> m;
    for (auto k : keep) m.push_back(parts[p].members[k]);
    const Matrix S = L.scaling.apply_rows(start_matrix(ds, m, Space::Problem));
    const Vector nearest = pairwise_sq_distances(X, S).rowwise().minCoeff();
    for (Index i = 0; i < n; ++i) signature[std::size_t(i)][p] = nearest[i] <= L.eps * L.eps ? 1 : 0;
  }
  std::map<std::vector<int>, std::vector<std::size_t>> groups;
  for (Index i = 0; i < n; ++i) groups[signature[std::size_t(i)]].push_back(std::size_t(i));
  UnionFind uf{std::size_t(n)};
  for (const auto& [sig, idx] : groups) eps_components(X, idx, L.eps, uf);

  // Canonical numbering by lexicographic centroid.
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (Index i = 0; i < n; ++i) comps[uf.find(std::size_t(i))].push_back(std::size_t(i));
  std::vector<std::pair<std::vector<double>, std::vector<std::size_t>>> keyed;
  for (auto& [root, idx] : comps) {
    const Vector c = select_rows(X, idx).colwise().mean().transpose();
    keyed.emplace_back(std::vector<double>(c.data(), c.data() + c.size()), std::move(idx));
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> label(std::size_t(n), -1);
  std::vector<std::size_t> rep;
  for (std::size_t l = 0; l < keyed.size(); ++l) {
    const auto& idx = keyed[l].second;
    for (auto i : idx) label[i] = int(l);
    L.densities.push_back(GaussianKde::fit(select_rows(raw, idx), 1e-3, 400, derive_seed(params.seed, 41, l)));
    for (auto k : subsample_indices(idx.size(), params.max_label_points, derive_seed(params.seed, 43, l)))
      rep.push_back(idx[k]);
  }
  L.points = select_rows(X, rep);
  for (auto r : rep) L.point_label.push_back(label[r]);

  for (std::size_t i = 0; i < ds.size(); ++i) out.start_label[i] = out.end_label[i] = label[i];
  for (std::size_t k = 0; k < succ.size(); ++k) out.end_label[succ[k]] = label[ds.size() + k];
  return out;
}

std::map<int, double> LinkingFunction::end_distribution(const Key& key) const {
  std::map<int, double> out;
  const auto it = rows.find(key);
  if (it == rows.end()) return out;
  for (const auto& e : it->second) out[e.end_label] += e.probability;
  return out;
}

int classify_partition(const PortableModel& model, OptionId option, const Eigen::Ref<const Vector>& obs) {
  int best = -1;
  double best_p = -1.0;
  for (const auto& r : model.rules) {
    if (r.option_id != option) continue;
    const double p = r.precondition.classifier.probability(obs);
    if (p > best_p) best_p = p, best = r.partition;
  }
  return best;
}

int match_outcome(const PortableModel& model, const PortableRule& rule, const Eigen::Ref<const Vector>& next_obs,
                  double margin) {
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rule.outcomes.size(); ++k) {
    double score = 0.0;
    for (int id : rule.outcomes[k].effects) {
      const Symbol& s = model.vocabulary.at(id);
      score += s.log_density(next_obs) - s.min_train_log_density;
    }
    if (score > best_score) best_score = score, best = int(k);
  }
  return best_score >= -margin ? best : -1;
}

LinkingFunction learn_linking(const Dataset& ds, const LabelResult& labels, const PortableModel& model,
                              const GroundParams& params) {
  std::map<LinkingFunction::Key, std::map<std::pair<int, int>, std::size_t>> counts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Transition& t = ds.transitions[i];
    if (!t.success || labels.start_label[i] < 0 || labels.end_label[i] < 0) continue;
    const int part = classify_partition(model, t.option_id, t.obs);
    if (part < 0) continue;
    const PortableRule* rule = model.find_rule(t.option_id, part);
    const int outcome = match_outcome(model, *rule, t.next_obs, params.outcome_margin);
    if (outcome < 0) continue;
    ++counts[{t.option_id, part, labels.start_label[i]}][{labels.end_label[i], outcome}];
  }
  LinkingFunction f;
  for (const auto& [key, row] : counts) {
    std::size_t total = 0;
    for (const auto& [k, c] : row) total += c;
    auto& entries = f.rows[key];
    for (const auto& [k, c] : row) entries.push_back({k.first, k.second, double(c) / double(total)});
    f.counts[key] = total;
  }
  return f;
}

const GroundedOperator* GroundedModel::find(OptionId option, int partition, int label) const {
  const auto it = lookup_.find({option, partition, label});
  return it == lookup_.end() ? nullptr : &operators[it->second];
}

void GroundedModel::index() {
  lookup_.clear();
  for (std::size_t i = 0; i < operators.size(); ++i)
    lookup_[{operators[i].option_id, operators[i].partition, operators[i].start_label}] = i;
}

Vector label_goal_probabilities(const LabelSet& labels, const ProbabilisticClassifier& goal, std::size_t samples,
                                std::uint64_t seed) {
  Vector out(labels.size());
  Rng rng(seed);
  for (int l = 0; l < labels.size(); ++l) {
    const Matrix x = labels.densities[std::size_t(l)].sample(samples, rng);
    out[l] = goal.probabilities(x).mean();
  }
  return out;
}

void fit_goal(GroundedModel& gm, const GoalSamples* goals, const GroundParams& params) {
  if (!goals) return;
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < goals->in_goal.size(); ++i) (goals->in_goal[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw InsufficientDataError("goal samples need both in-goal and out-of-goal states");
  gm.goal = ProbabilisticClassifier::fit(select_rows(goals->states, pos), select_rows(goals->states, neg), params.goal_svm);
  if (!gm.labels.trivial)
    gm.label_goal_probability = label_goal_probabilities(gm.labels, *gm.goal, params.goal_samples, derive_seed(params.seed, 77));
}

GroundedModel ground_rules(std::shared_ptr<const PortableModel> model, const LinkingFunction& linking, LabelSet labels,
                           const GoalSamples* goals, const GroundParams& params, const Dataset* task_data,
                           const LabelResult* label_result) {
  GroundedModel gm;
  gm.portable = model;
  gm.labels = std::move(labels);
  gm.linking = linking;
  for (const auto& rule : model->rules) {
    for (int l = 0; l < gm.labels.size(); ++l) {
      const auto it = linking.rows.find({rule.option_id, rule.partition, l});
      if (it != linking.rows.end()) gm.operators.push_back({rule.option_id, rule.partition, l, it->second});
    }
  }
  // An operator is missing when the precondition holds at a label's observations but no row links it.
  if (task_data && label_result) {
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < task_data->size(); ++i)
      if (label_result->start_label[i] >= 0) by_label[label_result->start_label[i]].push_back(i);
    for (const auto& rule : model->rules) {
      for (const auto& [l, idx] : by_label) {
        if (linking.rows.count({rule.option_id, rule.partition, l})) continue;
        const auto keep = subsample_indices(idx.size(), 16, derive_seed(params.seed, std::uint64_t(l)));
        double score = 0.0;
        for (auto k : keep) score += rule.precondition.classifier.probability(task_data->transitions[idx[k]].obs);
        if (score / double(keep.size()) >= 0.5)
          gm.warnings.push_back("missing operator: option " + std::to_string(rule.option_id) + " partition " +
                                std::to_string(rule.partition) + " at label " + std::to_string(l) +
                                " (no linking row)");
      }
    }
  }
  fit_goal(gm, goals, params);
  gm.index();
  return gm;
}

GroundedModel ground(std::shared_ptr<const PortableModel> model, const Dataset& task_data, const GoalSamples* goals,
                     const GroundParams& params) {
  const LabelResult labels = label_problem_partitions(task_data, params);
  const LinkingFunction linking = learn_linking(task_data, labels, *model, params);
  return ground_rules(std::move(model), linking, labels.labels, goals, params, &task_data, &labels);
}

GroundedModel ground_trivially(std::shared_ptr<const PortableModel> model, const GoalSamples* goals,
                               const GroundParams& params) {
  LabelSet labels;
  labels.trivial = true;
  labels.densities.resize(1);
  LinkingFunction linking;
  for (const auto& rule : model->rules) {
    auto& row = linking.rows[{rule.option_id, rule.partition, 0}];
    for (std::size_t k = 0; k < rule.outcomes.size(); ++k) row.push_back({0, int(k), rule.outcomes[k].probability});
    linking.counts[{rule.option_id, rule.partition, 0}] = 0;
  }
  return ground_rules(std::move(model), linking, std::move(labels), goals, params);
}

Dataset problem_space_view(const Dataset& ds) {
  Dataset out = ds;
  for (auto& t : out.transitions) {
    t.obs = t.state;
    t.next_obs = t.next_state;
  }
  return out;
}

}  // namespace portsym
