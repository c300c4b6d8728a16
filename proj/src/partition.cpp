#include "portsym/partition.hpp"

#include "portsym/dbscan.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace portsym {
namespace {

std::vector<double> centroid(const Dataset& ds, const std::vector<std::size_t>& idx, Space space,
                             const RangeScaling& scaling) {
  const Vector c = scaling.apply_rows(end_matrix(ds, idx, space)).colwise().mean().transpose();
  return {c.data(), c.data() + c.size()};
}

void sort_outcomes(Partition& p, const Dataset& ds, const RangeScaling& scaling) {
  for (auto& o : p.outcomes) std::sort(o.begin(), o.end());
  std::vector<std::pair<std::vector<double>, std::vector<std::size_t>>> keyed;
  for (auto& o : p.outcomes) keyed.emplace_back(centroid(ds, o, p.space, scaling), std::move(o));
  std::sort(keyed.begin(), keyed.end());
  p.outcomes.clear();
  p.members.clear();
  for (auto& [k, o] : keyed) {
    p.members.insert(p.members.end(), o.begin(), o.end());
    p.outcomes.push_back(std::move(o));
  }
  std::sort(p.members.begin(), p.members.end());
}

// Connected components of the eps-graph, used when DBSCAN finds no core point.
std::vector<int> eps_components(const Matrix& X, double eps) {
  const Matrix D = pairwise_sq_distances(X, X);
  std::vector<int> label(std::size_t(X.rows()), -1);
  int next = 0;
  for (Index s = 0; s < X.rows(); ++s) {
    if (label[std::size_t(s)] >= 0) continue;
    std::vector<Index> stack{s};
    label[std::size_t(s)] = next;
    while (!stack.empty()) {
      const Index p = stack.back();
      stack.pop_back();
      for (Index q = 0; q < X.rows(); ++q)
        if (label[std::size_t(q)] < 0 && D(p, q) <= eps * eps) label[std::size_t(q)] = next, stack.push_back(q);
    }
    ++next;
  }
  return label;
}

}  // namespace

RangeScaling fit_space_scaling(const Dataset& ds, Space space) {
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  if (all.empty()) return fit_range_scaling(Matrix(0, space == Space::Egocentric ? ds.obs_dim() : ds.state_dim()));
  Matrix both(Index(2 * all.size()), ds.transitions.front().start(space).size());
  both.topRows(Index(all.size())) = start_matrix(ds, all, space);
  both.bottomRows(Index(all.size())) = end_matrix(ds, all, space);
  return fit_range_scaling(both);
}

Matrix start_matrix(const Dataset& ds, const std::vector<std::size_t>& idx, Space space) {
  const Index d = idx.empty() ? 0 : ds.transitions[idx.front()].start(space).size();
  Matrix X(Index(idx.size()), d);
  for (std::size_t i = 0; i < idx.size(); ++i) X.row(Index(i)) = ds.transitions[idx[i]].start(space).transpose();
  return X;
}

Matrix end_matrix(const Dataset& ds, const std::vector<std::size_t>& idx, Space space) {
  const Index d = idx.empty() ? 0 : ds.transitions[idx.front()].end(space).size();
  Matrix X(Index(idx.size()), d);
  for (std::size_t i = 0; i < idx.size(); ++i) X.row(Index(i)) = ds.transitions[idx[i]].end(space).transpose();
  return X;
}

std::vector<Partition> cluster_effects(const Dataset& ds, OptionId option, Space space, const PartitionParams& params,
                                       const RangeScaling& scaling) {
  if (!(params.eps > 0)) throw std::invalid_argument("cluster_effects: eps must be positive");
  if (params.min_samples < 1) throw std::invalid_argument("cluster_effects: min_samples must be at least 1");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.transitions[i].option_id == option && ds.transitions[i].success) idx.push_back(i);
  if (idx.empty())
    throw InsufficientDataError("option " + std::to_string(option) + " has no successful transitions");

  const Matrix E = scaling.apply_rows(end_matrix(ds, idx, space));
  const DbscanResult db = dbscan(E, params.eps, params.min_samples);
  std::vector<int> labels = db.labels;
  int clusters = db.num_clusters;
  if (clusters == 0) {
    labels = eps_components(E, params.eps);
    clusters = 1 + *std::max_element(labels.begin(), labels.end());
  } else if (params.noise == NoisePolicy::AttachNearest) {
    std::vector<std::size_t> clustered;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] != DbscanResult::kNoise) clustered.push_back(i);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == DbscanResult::kNoise) labels[i] = db.labels[nearest_row(E, clustered, E.row(Index(i)))];
  }

  std::vector<Partition> parts(static_cast<std::size_t>(clusters));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (labels[i] < 0) continue;
    parts[std::size_t(labels[i])].outcomes.resize(1);
    parts[std::size_t(labels[i])].outcomes[0].push_back(idx[i]);
  }
  std::erase_if(parts, [](const Partition& p) { return p.outcomes.empty(); });
  for (auto& p : parts) {
    p.option_id = option;
    p.space = space;
    p.members = p.outcomes[0];
  }
  canonicalize(parts, ds, scaling);
  return parts;
}

std::vector<Partition> cluster_effects(const Dataset& ds, OptionId option, Space space,
                                       const PartitionParams& params) {
  return cluster_effects(ds, option, space, params, fit_space_scaling(ds, space));
}

double overlap_score(const Partition& a, const Partition& b, const Dataset& ds, const PartitionParams& params,
                     const RangeScaling& scaling) {
  const auto ia = subsample_indices(a.members.size(), params.overlap_cap, derive_seed(a.members.size(), 11));
  const auto ib = subsample_indices(b.members.size(), params.overlap_cap, derive_seed(b.members.size(), 13));
  std::vector<std::size_t> ma, mb;
  for (auto i : ia) ma.push_back(a.members[i]);
  for (auto i : ib) mb.push_back(b.members[i]);
  const Matrix A = scaling.apply_rows(start_matrix(ds, ma, a.space));
  const Matrix B = scaling.apply_rows(start_matrix(ds, mb, b.space));
  const Matrix D = pairwise_sq_distances(A, B);
  const double e2 = params.eps * params.eps;
  const double fa = double((D.rowwise().minCoeff().array() <= e2).count()) / double(A.rows());
  const double fb = double((D.colwise().minCoeff().array() <= e2).count()) / double(B.rows());
  return 0.5 * (fa + fb);
}

std::vector<Partition> merge_overlapping(std::vector<Partition> parts, const Dataset& ds, const PartitionParams& params,
                                         const RangeScaling& scaling) {
  for (const auto& p : parts)
    if (p.option_id != parts.front().option_id || p.space != parts.front().space)
      throw std::invalid_argument("merge_overlapping: partitions must share option and space");
  bool changed = true;
  while (changed && parts.size() > 1) {
    changed = false;
    std::vector<std::size_t> root(parts.size());
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        if (overlap_score(parts[i], parts[j], ds, params, scaling) > params.overlap_threshold) {
          const auto ri = find(i), rj = find(j);
          if (ri != rj) root[std::max(ri, rj)] = std::min(ri, rj), changed = true;
        }
    if (!changed) break;
    std::map<std::size_t, Partition> merged;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Partition& target = merged[find(i)];
      target.option_id = parts[i].option_id;
      target.space = parts[i].space;
      for (auto& o : parts[i].outcomes) target.outcomes.push_back(std::move(o));
    }
    parts.clear();
    for (auto& [r, p] : merged) parts.push_back(std::move(p));
  }
  canonicalize(parts, ds, scaling);
  return parts;
}

std::vector<Partition> merge_overlapping(std::vector<Partition> parts, const Dataset& ds,
                                         const PartitionParams& params) {
  if (parts.empty()) return parts;
  return merge_overlapping(std::move(parts), ds, params, fit_space_scaling(ds, parts.front().space));
}

void canonicalize(std::vector<Partition>& parts, const Dataset& ds, const RangeScaling& scaling) {
  for (auto& p : parts) sort_outcomes(p, ds, scaling);
  std::vector<std::pair<std::pair<OptionId, std::vector<double>>, Partition>> keyed;
  for (auto& p : parts) keyed.push_back({{p.option_id, centroid(ds, p.outcomes.front(), p.space, scaling)}, std::move(p)});
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  parts.clear();
  std::map<OptionId, int> next;
  for (auto& [k, p] : keyed) {
    p.index = next[p.option_id]++;
    parts.push_back(std::move(p));
  }
}

double check_subgoal(const Partition& part, const Dataset& ds, const RangeScaling& scaling, std::size_t min_samples,
                     std::size_t permutations, std::uint64_t seed) {
  if (part.members.size() < 2 * min_samples)
    throw InsufficientDataError("check_subgoal: partition has " + std::to_string(part.members.size()) +
                                " members, needs at least " + std::to_string(2 * min_samples));
  const auto keep = subsample_indices(part.members.size(), 200, seed);
  std::vector<std::size_t> m;
  for (auto k : keep) m.push_back(part.members[k]);
  const Matrix S = scaling.apply_rows(start_matrix(ds, m, part.space));
  const Matrix E = scaling.apply_rows(end_matrix(ds, m, part.space));
  const Matrix centered = S.rowwise() - S.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(centered.transpose() * centered);
  const Vector proj = centered * eig.eigenvectors().col(S.cols() - 1);

  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return proj[Index(a)] < proj[Index(b)]; });
  const std::size_t half = order.size() / 2;

  const Matrix D = pairwise_sq_distances(E, E).cwiseSqrt();
  auto statistic = [&](const std::vector<std::size_t>& ord) {
    double xy = 0, xx = 0, yy = 0;
    const std::size_t n = ord.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double d = D(Index(ord[i]), Index(ord[j]));
        const bool li = i < half, lj = j < half;
        if (li && lj) xx += d;
        else if (!li && !lj) yy += d;
        else if (li) xy += d;
      }
    const double nx = double(half), ny = double(n - half);
    return 2.0 * xy / (nx * ny) - xx / (nx * nx) - yy / (ny * ny);
  };
  const double observed = statistic(order);
  Rng rng(seed);
  std::size_t at_least = 0;
  std::vector<std::size_t> perm = order;
  for (std::size_t p = 0; p < permutations; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    if (statistic(perm) >= observed - 1e-12) ++at_least;
  }
  return double(1 + at_least) / double(1 + permutations);
}

std::vector<Partition> partition_options(const Dataset& ds, Space space, const PartitionParams& params,
                                         const RangeScaling& scaling) {
  std::vector<OptionId> opts;
  for (const auto& t : ds.transitions)
    if (t.success) opts.push_back(t.option_id);
  std::sort(opts.begin(), opts.end());
  opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
  std::vector<Partition> out;
  for (OptionId o : opts) {
    auto merged = merge_overlapping(cluster_effects(ds, o, space, params, scaling), ds, params, scaling);
    for (auto& p : merged) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace portsym
