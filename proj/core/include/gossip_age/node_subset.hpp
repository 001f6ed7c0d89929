#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace gossip_age {

using NodeId = std::uint32_t;

/// A set of node indices drawn from [0, universe). Stored as a packed
/// bitset so membership is O(1) and small-network subsets convert to a
/// single 64-bit mask.
class NodeSubset {
 public:
  NodeSubset() = default;
  explicit NodeSubset(std::size_t universe);
  NodeSubset(std::size_t universe, std::initializer_list<NodeId> members);
  NodeSubset(std::size_t universe, std::span<const NodeId> members);

  /// Builds a subset of a universe with at most 64 nodes from a bitmask.
  static NodeSubset from_mask(std::size_t universe, std::uint64_t mask);
  static NodeSubset full(std::size_t universe);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool contains(NodeId node) const;
  void insert(NodeId node);
  void erase(NodeId node);

  /// Members in increasing order.
  std::vector<NodeId> members() const;

  /// Only valid for universe <= 64.
  std::uint64_t to_mask() const;

  /// Lowercase hex mask with a 0x prefix, padded to ceil(universe/4) digits.
  std::string to_hex() const;

  friend bool operator==(const NodeSubset&, const NodeSubset&) = default;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        fn(static_cast<NodeId>(w * 64 + static_cast<std::size_t>(b)));
        bits &= bits - 1;
      }
    }
  }

 private:
  void check(NodeId node) const;

  std::size_t universe_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace gossip_age
