#include "modlab/rng.hpp"

namespace modlab {

RngStream derive_stream(const RngStream& parent, std::initializer_list<std::uint64_t> label) {
  RngStream s = parent;
  s.path.insert(s.path.end(), label.begin(), label.end());
  return s;
}

RngStream derive_stream(const RngStream& parent, const std::vector<std::uint64_t>& label) {
  RngStream s = parent;
  s.path.insert(s.path.end(), label.begin(), label.end());
  return s;
}

namespace {

std::mt19937_64 seeded_engine(const RngStream& s) {
  std::vector<std::uint32_t> words;
  words.reserve(3 + 2 * s.path.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(s.root);
  words.push_back(static_cast<std::uint32_t>(s.path.size()));
  for (auto p : s.path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(const RngStream& s) : eng_(seeded_engine(s)) {}

}  // namespace modlab
