#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace containment {

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when L_FF is (numerically) singular, i.e. the leader-rooted
/// spanning forest condition fails.
struct SingularBlock : GraphError {
  using GraphError::GraphError;
};

/// Weighted directed agent network. Entry (i, j) of `weights` is the weight
/// with which agent i hears agent j. An agent with an all-zero row is a
/// leader; every other agent is a follower. Immutable after construction.
class DirectedNetwork {
 public:
  static DirectedNetwork from_weights(Eigen::MatrixXd weights) {
    return DirectedNetwork(std::move(weights));
  }

  int agent_count() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const std::vector<int>& followers() const { return followers_; }
  const std::vector<int>& leaders() const { return leaders_; }
  bool is_leader(int id) const { return leader_mask_[static_cast<size_t>(id)]; }

 private:
  explicit DirectedNetwork(Eigen::MatrixXd weights)
      : weights_(std::move(weights)) {
    const auto n = weights_.rows();
    if (n == 0 || weights_.cols() != n)
      throw GraphError("weight matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (weights_(i, i) != 0.0)
        throw GraphError("self-loop weight at agent " + std::to_string(i));
      for (Eigen::Index j = 0; j < n; ++j)
        if (!(weights_(i, j) >= 0.0))
          throw GraphError("negative or non-finite weight at (" +
                           std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    leader_mask_.resize(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool leader = weights_.row(i).sum() == 0.0;
      leader_mask_[static_cast<size_t>(i)] = leader;
      (leader ? leaders_ : followers_).push_back(static_cast<int>(i));
    }
    if (leaders_.empty())
      throw GraphError("network has no leader (every row has an in-edge)");
    if (followers_.empty())
      throw GraphError("network has no follower (all rows are zero)");
  }

  Eigen::MatrixXd weights_;
  std::vector<int> followers_;
  std::vector<int> leaders_;
  std::vector<bool> leader_mask_;
};

inline std::pair<std::vector<int>, std::vector<int>> classify_agents(
    const DirectedNetwork& net) {
  return {net.followers(), net.leaders()};
}

/// Laplacian blocks of L = D - A under the followers-first ordering.
/// Leader rows of L are identically zero and are not stored.
struct LaplacianPartition {
  Eigen::MatrixXd L_ff;  // (n-m) x (n-m)
  Eigen::MatrixXd L_fr;  // (n-m) x m
  std::vector<int> follower_ids;
  std::vector<int> leader_ids;

  int follower_count() const { return static_cast<int>(L_ff.rows()); }
  int leader_count() const { return static_cast<int>(L_fr.cols()); }
};

inline LaplacianPartition build_partition(const DirectedNetwork& net) {
  const auto& F = net.followers();
  const auto& R = net.leaders();
  const auto& A = net.weights();
  LaplacianPartition part;
  part.follower_ids = F;
  part.leader_ids = R;
  const int nf = static_cast<int>(F.size());
  const int m = static_cast<int>(R.size());
  part.L_ff.setZero(nf, nf);
  part.L_fr.setZero(nf, m);
  for (int r = 0; r < nf; ++r) {
    const int i = F[static_cast<size_t>(r)];
    const double degree = A.row(i).sum();
    for (int c = 0; c < nf; ++c)
      part.L_ff(r, c) = (r == c ? degree : 0.0) - A(i, F[static_cast<size_t>(c)]);
    for (int c = 0; c < m; ++c)
      part.L_fr(r, c) = -A(i, R[static_cast<size_t>(c)]);
  }
  return part;
}

/// True iff every follower is reachable from some leader in the influence
/// digraph (edge j -> i whenever a_ij > 0): assumption (A1), equivalently the
/// existence of a directed spanning forest rooted at the leaders.
inline bool has_leader_rooted_forest(const DirectedNetwork& net) {
  const int n = net.agent_count();
  const auto& A = net.weights();
  std::vector<char> reached(static_cast<size_t>(n), 0);
  std::queue<int> frontier;
  for (int r : net.leaders()) {
    reached[static_cast<size_t>(r)] = 1;
    frontier.push(r);
  }
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int i = 0; i < n; ++i) {
      if (!reached[static_cast<size_t>(i)] && A(i, j) > 0.0) {
        reached[static_cast<size_t>(i)] = 1;
        frontier.push(i);
      }
    }
  }
  for (int f : net.followers())
    if (!reached[static_cast<size_t>(f)]) return false;
  return true;
}

/// Relative singular-value threshold below which L_FF is treated as singular.
inline constexpr double singular_block_rtol = 1e-10;

inline bool l_ff_invertible(const Eigen::MatrixXd& L_ff) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L_ff);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return false;
  return s(s.size() - 1) > singular_block_rtol * s(0);
}

/// W = -L_FF^{-1} L_FR. Rows are the convex weights of each follower's
/// steady-state target over the leader positions (nonnegative, summing to 1).
inline Eigen::MatrixXd steady_state_map(const LaplacianPartition& part) {
  if (!l_ff_invertible(part.L_ff))
    throw SingularBlock("L_FF is singular: no leader-rooted spanning forest");
  return part.L_ff.partialPivLu().solve(-part.L_fr);
}

/// Parsed network file: topology plus per-edge noise intensities.
/// sigma(i, j) is the intensity with which agent i's measurement of agent j
/// is corrupted (sigma_ji in protocol notation).
struct LoadedNetwork {
  DirectedNetwork net;
  Eigen::MatrixXd sigma;
};

/// Text format: `agents <n>`, optional `leaders <id...>` (cross-checked
/// against the zero-row rule), then `edge <i> <j> <a_ij> [sigma_ji]` lines.
/// '#' starts a comment.
inline LoadedNetwork load_network(std::istream& in, const std::string& name,
                                  double default_sigma = 1.0) {
  Eigen::MatrixXd A, sigma;
  int n = -1;
  std::vector<int> declared_leaders;
  bool have_declared = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw GraphError(name + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "agents") {
      if (!(ls >> n) || n <= 0) fail("expected positive agent count");
      A.setZero(n, n);
      sigma.setZero(n, n);
    } else if (tok == "leaders") {
      have_declared = true;
      int id;
      while (ls >> id) declared_leaders.push_back(id);
    } else if (tok == "edge") {
      if (n < 0) fail("edge before agents line");
      int i, j;
      double w;
      if (!(ls >> i >> j >> w)) fail("expected: edge <i> <j> <weight>");
      if (i < 0 || i >= n || j < 0 || j >= n) fail("agent id out of range");
      if (i == j) fail("self-loop");
      if (!(w >= 0.0)) fail("negative weight");
      double s = default_sigma;
      ls >> s;
      if (!(s >= 0.0)) fail("negative noise intensity");
      A(i, j) = w;
      sigma(i, j) = s;
    } else {
      fail("unknown directive '" + tok + "'");
    }
  }
  lineno = 0;
  if (n < 0) throw GraphError(name + ": missing agents line");
  auto net = DirectedNetwork::from_weights(A);
  if (have_declared) {
    std::vector<int> sorted = declared_leaders;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != net.leaders())
      throw GraphError(name +
                       ": declared leaders do not match zero-row leaders");
  }
  return LoadedNetwork{std::move(net), std::move(sigma)};
}

inline LoadedNetwork load_network_file(const std::string& path,
                                       double default_sigma = 1.0) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open network file: " + path);
  return load_network(in, path, default_sigma);
}

}  // namespace containment
