#include "gossip_age/node_subset.hpp"

#include <bit>

#include <fmt/format.h>

#include "gossip_age/errors.hpp"

namespace gossip_age {

NodeSubset::NodeSubset(std::size_t universe)
    : universe_(universe), words_((universe + 63) / 64, 0) {}

NodeSubset::NodeSubset(std::size_t universe, std::initializer_list<NodeId> members)
    : NodeSubset(universe) {
  for (NodeId m : members) insert(m);
}

NodeSubset::NodeSubset(std::size_t universe, std::span<const NodeId> members)
    : NodeSubset(universe) {
  for (NodeId m : members) insert(m);
}

NodeSubset NodeSubset::from_mask(std::size_t universe, std::uint64_t mask) {
  if (universe > 64) {
    throw PreconditionError("bitmask subsets require a universe of at most 64 nodes");
  }
  if (universe < 64 && (mask >> universe) != 0) {
    throw PreconditionError(fmt::format("mask {:#x} has bits outside [0, {})", mask, universe));
  }
  NodeSubset s(universe);
  if (!s.words_.empty()) s.words_[0] = mask;
  s.size_ = static_cast<std::size_t>(std::popcount(mask));
  return s;
}

NodeSubset NodeSubset::full(std::size_t universe) {
  NodeSubset s(universe);
  for (std::size_t w = 0; w < s.words_.size(); ++w) {
    const std::size_t remaining = universe - w * 64;
    s.words_[w] = remaining >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << remaining) - 1);
  }
  s.size_ = universe;
  return s;
}

void NodeSubset::check(NodeId node) const {
  if (node >= universe_) {
    throw PreconditionError(fmt::format("node {} outside [0, {})", node, universe_));
  }
}

bool NodeSubset::contains(NodeId node) const {
  if (node >= universe_) return false;
  return (words_[node / 64] >> (node % 64)) & 1u;
}

void NodeSubset::insert(NodeId node) {
  check(node);
  std::uint64_t& w = words_[node / 64];
  const std::uint64_t bit = std::uint64_t{1} << (node % 64);
  if ((w & bit) == 0) {
    w |= bit;
    ++size_;
  }
}

void NodeSubset::erase(NodeId node) {
  check(node);
  std::uint64_t& w = words_[node / 64];
  const std::uint64_t bit = std::uint64_t{1} << (node % 64);
  if ((w & bit) != 0) {
    w &= ~bit;
    --size_;
  }
}

std::vector<NodeId> NodeSubset::members() const {
  std::vector<NodeId> out;
  out.reserve(size_);
  for_each([&](NodeId m) { out.push_back(m); });
  return out;
}

std::uint64_t NodeSubset::to_mask() const {
  if (universe_ > 64) {
    throw PreconditionError("to_mask requires a universe of at most 64 nodes");
  }
  return words_.empty() ? 0 : words_[0];
}

std::string NodeSubset::to_hex() const {
  const std::size_t digits = std::max<std::size_t>(1, (universe_ + 3) / 4);
  std::string out;
  out.reserve(digits + 2);
  for (std::size_t d = digits; d-- > 0;) {
    const std::size_t bit = d * 4;
    const std::uint64_t word = words_.empty() ? 0 : words_[bit / 64];
    const unsigned nibble = static_cast<unsigned>((word >> (bit % 64)) & 0xF);
    out.push_back("0123456789abcdef"[nibble]);
  }
  return "0x" + out;
}

}  // namespace gossip_age
