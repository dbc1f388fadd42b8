#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "colearn/error.hpp"

namespace colearn {

// Complete (height-balanced) tree of the given arity laid out in heap order:
// position 0 is the root and the children of position p are
// arity*p + 1 ... arity*p + arity. Agents are placed on positions by a
// permutation, so the decision order is a property of the permutation alone.
class TreeOverlay {
 public:
  TreeOverlay(std::vector<std::size_t> positions, std::size_t arity)
      : positions_(std::move(positions)), arity_(arity) {
    if (positions_.empty()) throw ConfigError("tree overlay needs at least one agent");
    if (arity_ < 1) throw ConfigError("tree arity must be at least 1");
    positionOf_.assign(positions_.size(), positions_.size());
    for (std::size_t p = 0; p < positions_.size(); ++p) {
      const auto a = positions_[p];
      if (a >= positions_.size() || positionOf_[a] != positions_.size())
        throw ConfigError("tree positions must be a permutation of agent ids");
      positionOf_[a] = p;
    }
  }

  // Random positioning of agents 0..n-1 drawn from `seed`.
  static TreeOverlay build(std::size_t numAgents, std::size_t arity, std::uint64_t seed) {
    std::vector<std::size_t> perm(numAgents);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    return {std::move(perm), arity};
  }

  std::size_t size() const { return positions_.size(); }
  std::size_t arity() const { return arity_; }
  const std::vector<std::size_t>& positions() const { return positions_; }

  std::size_t agentAt(std::size_t pos) const { return positions_[pos]; }
  std::size_t positionOf(std::size_t agent) const { return positionOf_[agent]; }
  std::size_t rootAgent() const { return positions_.front(); }

  std::optional<std::size_t> parentPosition(std::size_t pos) const {
    if (pos == 0) return std::nullopt;
    return (pos - 1) / arity_;
  }

  // Half-open range of child positions; empty for leaves.
  std::size_t firstChild(std::size_t pos) const {
    return std::min(arity_ * pos + 1, positions_.size());
  }
  std::size_t endChild(std::size_t pos) const {
    return std::min(arity_ * pos + arity_ + 1, positions_.size());
  }
  std::size_t childCount(std::size_t pos) const { return endChild(pos) - firstChild(pos); }
  bool isLeaf(std::size_t pos) const { return childCount(pos) == 0; }

  std::size_t depth(std::size_t pos) const {
    std::size_t d = 0;
    while (pos != 0) {
      pos = (pos - 1) / arity_;
      ++d;
    }
    return d;
  }

  std::size_t height() const { return depth(positions_.size() - 1); }

 private:
  std::vector<std::size_t> positions_;
  std::vector<std::size_t> positionOf_;
  std::size_t arity_;
};

}  // namespace colearn
