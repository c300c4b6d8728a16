#include "portsym/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace portsym {

Vector Symbol::project(const Eigen::Ref<const Vector>& full) const {
  Vector out(Index(mask.size()));
  for (std::size_t i = 0; i < mask.size(); ++i) out[Index(i)] = full[mask[i]];
  return out;
}

void Symbol::apply_sample(Vector& full, Rng& rng) const {
  const Vector s = density.sample(rng);
  for (std::size_t i = 0; i < mask.size(); ++i) full[mask[i]] = s[Index(i)];
}

int Vocabulary::add(Symbol s) {
  s.id = int(symbols_.size());
  if (s.name.empty()) s.name = "symbol_" + std::to_string(s.id);
  symbols_.push_back(std::move(s));
  return symbols_.back().id;
}

const Symbol& Vocabulary::at(int id) const {
  if (id < 0 || std::size_t(id) >= symbols_.size())
    throw std::out_of_range("vocabulary has no symbol " + std::to_string(id));
  return symbols_[std::size_t(id)];
}

std::vector<Index> effect_mask(const Matrix& starts, const Matrix& ends, const Vector& noise, double factor) {
  const Vector change = (ends - starts).cwiseAbs().colwise().mean().transpose();
  std::vector<Index> mask;
  for (Index i = 0; i < change.size(); ++i) {
    const double sigma = noise.size() == change.size() ? noise[i] : 0.0;
    if (change[i] > std::max(factor * sigma, 1e-9)) mask.push_back(i);
  }
  return mask;
}

ProbabilisticClassifier fit_precondition(const Matrix& positives, const Matrix& negatives, const SymbolParams& params) {
  if (positives.rows() < Index(params.min_class_samples) || negatives.rows() < Index(params.min_class_samples))
    throw InsufficientDataError("precondition needs at least " + std::to_string(params.min_class_samples) +
                                " samples per class, got " + std::to_string(positives.rows()) + " positive and " +
                                std::to_string(negatives.rows()) + " negative");
  return ProbabilisticClassifier::fit(positives, negatives, params.svm);
}

Symbol fit_effect(const Matrix& ends, const std::vector<Index>& mask, const SymbolParams& params) {
  if (ends.rows() < Index(params.min_samples))
    throw InsufficientDataError("effect needs at least " + std::to_string(params.min_samples) + " samples, got " +
                                std::to_string(ends.rows()));
  if (mask.empty()) throw std::invalid_argument("effect mask must be non-empty");
  Matrix projected(ends.rows(), Index(mask.size()));
  for (std::size_t i = 0; i < mask.size(); ++i) projected.col(Index(i)) = ends.col(mask[i]);
  Symbol s;
  s.mask = mask;
  s.density = GaussianKde::fit(projected, params.bandwidth_floor, params.max_centers, derive_seed(params.seed, 17));
  s.min_train_log_density = s.density.log_density_rows(projected).minCoeff();
  return s;
}

Symbol fit_effect(const Matrix& starts, const Matrix& ends, const SymbolParams& params) {
  return fit_effect(ends, effect_mask(starts, ends, params.noise, params.mask_factor), params);
}

double density_distance(const GaussianKde& p, const GaussianKde& q, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix xp = p.sample(samples, rng);
  const Matrix xq = q.sample(samples, rng);
  const double pp = p.log_density_rows(xp).array().exp().mean();
  const double qq = q.log_density_rows(xq).array().exp().mean();
  const double pq = 0.5 * (q.log_density_rows(xp).array().exp().mean() + p.log_density_rows(xq).array().exp().mean());
  const double denom = pp + qq;
  if (!(denom > 0)) return 1.0;
  return std::clamp((pp + qq - 2.0 * pq) / denom, 0.0, 1.0);
}

namespace {

// Means differ by more than six combined spreads in some coordinate.
bool clearly_apart(const GaussianKde& p, const GaussianKde& q) {
  const Vector sp = (column_std(p.centers()).array().square() + p.bandwidth().array().square()).sqrt();
  const Vector sq = (column_std(q.centers()).array().square() + q.bandwidth().array().square()).sqrt();
  const Vector gap = (p.mean() - q.mean()).cwiseAbs();
  return ((gap.array() - 6.0 * sp.cwiseMax(sq).array()) > 0).any();
}

}  // namespace

std::vector<int> dedupe(Vocabulary& vocab, const SymbolParams& params) {
  auto& syms = vocab.mutable_symbols();
  const std::size_t n = syms.size();
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  auto widened = [&](const Symbol& s) {
    Vector floor(Index(s.mask.size()));
    for (std::size_t i = 0; i < s.mask.size(); ++i)
      floor[Index(i)] = params.noise.size() > s.mask[i] ? params.mask_factor * params.noise[s.mask[i]] : 0.0;
    return s.density.widened(floor.cwiseMax(params.bandwidth_floor));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (syms[i].mask != syms[j].mask || find(i) == find(j)) continue;
      const GaussianKde p = widened(syms[i]), q = widened(syms[j]);
      if (clearly_apart(p, q)) continue;
      const double d = density_distance(p, q, params.similarity_samples, derive_seed(params.seed, i, j));
      if (d < params.similarity_threshold) root[std::max(find(i), find(j))] = std::min(find(i), find(j));
    }
  }
  std::vector<int> remap(n, -1);
  std::vector<Symbol> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) != i) continue;
    remap[i] = int(kept.size());
    kept.push_back(std::move(syms[i]));
    kept.back().id = remap[i];
    if (kept.back().name.rfind("symbol_", 0) == 0) kept.back().name = "symbol_" + std::to_string(remap[i]);
  }
  for (std::size_t i = 0; i < n; ++i) remap[i] = remap[find(i)];
  syms = std::move(kept);
  return remap;
}

void remap_symbols(std::vector<PortableRule>& rules, const std::vector<int>& remap) {
  auto fix = [&](std::vector<int>& ids) {
    for (int& id : ids) id = remap.at(std::size_t(id));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  };
  for (auto& r : rules) {
    for (auto& o : r.outcomes) fix(o.effects);
    for (auto& clause : r.precondition.symbolic) fix(clause);
  }
}

SymbolicCondition symbolic_precondition(const ProbabilisticClassifier& classifier, const Matrix& starts,
                                        const Vocabulary& vocab, std::uint64_t seed) {
  constexpr std::size_t kProbes = 64;
  Rng rng(seed);
  const auto rows = subsample_indices(std::size_t(starts.rows()), kProbes, derive_seed(seed, 3));
  std::map<std::vector<Index>, std::pair<std::vector<int>, bool>> groups;  // mask -> (passing ids, any failing)
  for (const Symbol& s : vocab.symbols()) {
    double total = 0.0;
    for (std::size_t k = 0; k < kProbes; ++k) {
      Vector x = starts.row(Index(rows[k % rows.size()])).transpose();
      s.apply_sample(x, rng);
      total += classifier.probability(x);
    }
    auto& g = groups[s.mask];
    if (total / double(kProbes) >= 0.5) g.first.push_back(s.id);
    else g.second = true;
  }
  std::vector<std::pair<std::vector<Index>, std::vector<int>>> informative;
  for (auto& [mask, g] : groups)
    if (g.second && !g.first.empty()) informative.emplace_back(mask, g.first);
  std::stable_sort(informative.begin(), informative.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  SymbolicCondition out;
  std::set<Index> used;
  for (auto& [mask, ids] : informative) {
    if (std::any_of(mask.begin(), mask.end(), [&](Index i) { return used.count(i) > 0; })) continue;
    used.insert(mask.begin(), mask.end());
    out.push_back(ids);
  }
  return out;
}

std::vector<PortableRule> build_portable_rules(const Dataset& ds, const std::vector<Partition>& partitions,
                                               Vocabulary& vocab, const SymbolParams& params) {
  std::vector<PortableRule> rules;
  for (const Partition& part : partitions) {
    if (part.space != Space::Egocentric) throw std::invalid_argument("portable rules need egocentric partitions");
    if (part.members.size() < params.min_class_samples) continue;

    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const Transition& t = ds.transitions[i];
      const bool own = t.option_id == part.option_id;
      const bool failed = own && !t.success;
      const bool other_succeeded = !own && t.success;
      if (params.negatives == NegativeSource::FailedInitiations ? failed : other_succeeded) negatives.push_back(i);
    }
    for (const Partition& other : partitions)
      if (other.option_id == part.option_id && other.index != part.index)
        negatives.insert(negatives.end(), other.members.begin(), other.members.end());

    PortableRule rule;
    rule.option_id = part.option_id;
    rule.partition = part.index;
    const Matrix pos = start_matrix(ds, part.members, Space::Egocentric);
    if (negatives.size() < params.min_class_samples) {
      rule.precondition.classifier = ProbabilisticClassifier::constant(1.0 - 1e-6, pos.cols());
    } else {
      SymbolParams p = params;
      p.svm.seed = derive_seed(params.seed, std::uint64_t(part.option_id), std::uint64_t(part.index));
      rule.precondition.classifier = fit_precondition(pos, start_matrix(ds, negatives, Space::Egocentric), p);
    }

    double kept = 0.0;
    for (const auto& members : part.outcomes) {
      const double freq = double(members.size()) / double(part.members.size());
      if (freq < params.discard_threshold || members.size() < params.min_samples) continue;
      Outcome out;
      out.probability = freq;
      const Matrix starts = start_matrix(ds, members, Space::Egocentric);
      const Matrix ends = end_matrix(ds, members, Space::Egocentric);
      const auto mask = effect_mask(starts, ends, params.noise, params.mask_factor);
      if (!mask.empty()) {
        SymbolParams p = params;
        p.seed = derive_seed(params.seed, std::uint64_t(part.option_id), vocab.size());
        out.effects.push_back(vocab.add(fit_effect(ends, mask, p)));
      }
      kept += freq;
      rule.outcomes.push_back(std::move(out));
    }
    if (rule.outcomes.empty()) continue;
    for (auto& o : rule.outcomes) o.probability /= kept;
    rules.push_back(std::move(rule));
  }
  return rules;
}

PortableModel learn_portable(const Dataset& ds, const LearnParams& params) {
  PortableModel model;
  model.family = ds.domain_family;
  model.obs_dim = ds.obs_dim();
  model.obs_noise = params.symbols.noise;
  model.experience = ds;
  if (ds.empty()) return model;
  const RangeScaling scaling = fit_space_scaling(ds, Space::Egocentric);
  const auto parts = partition_options(ds, Space::Egocentric, params.partition, scaling);
  model.rules = build_portable_rules(ds, parts, model.vocabulary, params.symbols);
  remap_symbols(model.rules, dedupe(model.vocabulary, params.symbols));
  for (auto& rule : model.rules)
    rule.option_name = std::size_t(rule.option_id) < params.option_names.size()
                           ? params.option_names[std::size_t(rule.option_id)]
                           : "option" + std::to_string(rule.option_id);
  if (params.symbolic_preconditions) {
    for (auto& rule : model.rules) {
      const Partition* part = nullptr;
      for (const auto& p : parts)
        if (p.option_id == rule.option_id && p.index == rule.partition) part = &p;
      rule.precondition.symbolic =
          symbolic_precondition(rule.precondition.classifier, start_matrix(ds, part->members, Space::Egocentric),
                                model.vocabulary, derive_seed(params.symbols.seed, 5, std::uint64_t(rule.option_id)));
    }
  }
  return model;
}

const PortableRule* PortableModel::find_rule(OptionId option, int partition) const {
  for (const auto& r : rules)
    if (r.option_id == option && r.partition == partition) return &r;
  return nullptr;
}

}  // namespace portsym
